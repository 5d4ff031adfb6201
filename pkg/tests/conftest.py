import numpy as np
import pytest
from hypothesis import strategies as st

from twophoton import TwoPhotonState

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(name, ok, detail)`` then assert."""
    def record(name, ok, detail=""):
        _criteria.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def random_state(rng) -> TwoPhotonState:
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return TwoPhotonState(v / np.linalg.norm(v))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi, allow_nan=False)
