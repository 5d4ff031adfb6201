"""Born-rule statistics on two-photon states.

Outcome 0 on an arm means the photon was found in that analyzer's ``e0``,
outcome 1 in ``e1``.  Joint tables are indexed ``p[outcome_A, outcome_B]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .optics import AnalyzerSetting, as_setting
from .qstate import (
    ACCUM_TOL, CANONICAL, Arm, ContractViolation, LocalOperator,
    PolarizationBasis, TwoPhotonState, apply_local, compose_history,
)

__all__ = [
    "JointDistribution", "SampleRecord", "EntanglementReport", "NoSignalingReport",
    "joint_distribution", "marginal", "correlation", "chsh", "sample",
    "sample_counts", "verify_no_signaling", "entanglement_report",
    "recover_correlation_bases",
]


@dataclass(frozen=True, eq=False)
class JointDistribution:
    p: np.ndarray
    setting_a: AnalyzerSetting
    setting_b: AnalyzerSetting

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (2, 2):
            raise ContractViolation(f"joint table must be 2x2, got {p.shape}")
        if np.any(p < -ACCUM_TOL) or np.any(p > 1 + ACCUM_TOL) or abs(p.sum() - 1.0) > ACCUM_TOL:
            raise ContractViolation(f"not a probability table: {p.tolist()}")
        p = np.clip(p, 0.0, 1.0)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def marginal_a(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def marginal_b(self) -> np.ndarray:
        return self.p.sum(axis=0)

    @property
    def correlation(self) -> float:
        p = self.p
        return float(p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0])


@dataclass(frozen=True)
class SampleRecord:
    shot: int
    outcome_a: int
    outcome_b: int


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    schmidt_coefficients: tuple[float, float]


@dataclass(frozen=True)
class NoSignalingReport:
    passed: bool
    max_deviation: float
    tol: float
    deviations: tuple[float, ...] = ()

    def __bool__(self):
        return self.passed


def _pair(a, b) -> tuple[AnalyzerSetting, AnalyzerSetting]:
    a, b = as_setting(a, Arm.A), as_setting(b, Arm.B)
    if a.arm is b.arm:
        raise ContractViolation(f"both analyzers are on arm {a.arm.value}")
    if a.arm is Arm.B:
        a, b = b, a
    return a, b


def joint_distribution(s: TwoPhotonState, a, b) -> JointDistribution:
    """Table of ``|(<a_i| x <b_j|) s>|^2``.

    ``a`` and ``b`` may be analyzers or bare bases (placed on A and B).
    If given in B, A order they are swapped so rows always index arm A.
    """
    a, b = _pair(a, b)
    amps = a.basis.matrix.conj().T @ s.amplitude_matrix @ b.basis.matrix.conj()
    return JointDistribution(np.abs(amps) ** 2, a, b)


def marginal(s: TwoPhotonState, setting: AnalyzerSetting) -> np.ndarray:
    """Outcome probabilities on the setting's arm alone."""
    if not isinstance(setting, AnalyzerSetting):
        raise ContractViolation("marginal needs an AnalyzerSetting (arm + basis)")
    c = s.amplitude_matrix
    # reduced density matrix of the measured arm
    rho = c @ c.conj().T if setting.arm is Arm.A else c.T @ c.conj()
    m = setting.basis.matrix
    probs = np.real(np.einsum("ki,kl,li->i", m.conj(), rho, m))
    return np.clip(probs, 0.0, 1.0)


def correlation(s: TwoPhotonState, a, b) -> float:
    """``E = p00 + p11 - p01 - p10``."""
    return joint_distribution(s, a, b).correlation


def chsh(s: TwoPhotonState, a0, a1, b0, b1) -> float:
    """``S = E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1)``."""
    a0, a1 = as_setting(a0, Arm.A), as_setting(a1, Arm.A)
    b0, b1 = as_setting(b0, Arm.B), as_setting(b1, Arm.B)
    if a0.arm is not Arm.A or a1.arm is not Arm.A or b0.arm is not Arm.B or b1.arm is not Arm.B:
        raise ContractViolation("CHSH needs a0, a1 on arm A and b0, b1 on arm B")
    return (correlation(s, a0, b0) + correlation(s, a0, b1)
            + correlation(s, a1, b0) - correlation(s, a1, b1))


def _uniforms(seed: int, shots: int) -> np.ndarray:
    # Philox is counter based: shot k always gets the k-th draw for a given
    # seed, independent of how many shots are requested.
    if seed < 0:
        raise ContractViolation(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed)).random(shots)


def sample_outcomes(s: TwoPhotonState, a, b, shots: int, seed: int) -> np.ndarray:
    """Flat cell indices ``2*outcome_a + outcome_b`` for each shot."""
    if shots < 1:
        raise ContractViolation(f"shots must be >= 1, got {shots}")
    p = joint_distribution(s, a, b).p.reshape(4)
    cdf = np.cumsum(p) / p.sum()
    cells = np.searchsorted(cdf, _uniforms(seed, shots), side="right")
    # rounding in cdf[-1] must not leak mass into a trailing zero cell
    return np.minimum(cells, np.flatnonzero(p > 0)[-1])


def sample(s: TwoPhotonState, a, b, shots: int, seed: int) -> list[SampleRecord]:
    """Seeded i.i.d. draws from the joint table, one record per shot."""
    cells = sample_outcomes(s, a, b, shots, seed)
    return [SampleRecord(k, int(c >> 1), int(c & 1)) for k, c in enumerate(cells.tolist())]


def sample_counts(s: TwoPhotonState, a, b, shots: int, seed: int) -> np.ndarray:
    """2x2 table of outcome counts from :func:`sample`."""
    cells = sample_outcomes(s, a, b, shots, seed)
    return np.bincount(cells, minlength=4).reshape(2, 2)


def verify_no_signaling(s: TwoPhotonState, ops_a: Sequence[LocalOperator],
                        probes_b: Sequence, tol: float = ACCUM_TOL) -> NoSignalingReport:
    """Check arm-B marginals are unchanged by operators applied on arm A.

    Uses exact marginals, not sampled frequencies.
    """
    for op in ops_a:
        if op.arm is not Arm.A:
            raise ContractViolation(f"operator {op!r} acts on arm B; only arm-A operators are allowed")
    probes = [as_setting(p, Arm.B) for p in probes_b]
    for p in probes:
        if p.arm is not Arm.B:
            raise ContractViolation("no-signaling probes must be on arm B")
    after = s
    for op in ops_a:
        after = apply_local(after, op)
    devs = tuple(float(np.max(np.abs(marginal(s, p) - marginal(after, p)))) for p in probes)
    worst = max(devs, default=0.0)
    return NoSignalingReport(worst <= tol, worst, tol, devs)


def entanglement_report(s: TwoPhotonState) -> EntanglementReport:
    """Schmidt coefficients (descending) and concurrence ``2 * l0 * l1``."""
    sv = np.linalg.svd(s.amplitude_matrix, compute_uv=False)
    l0, l1 = float(sv[0]), float(sv[1])
    return EntanglementReport(min(1.0, 2.0 * l0 * l1), (l0, l1))


def recover_correlation_bases(history_a: Sequence[LocalOperator],
                              history_b: Sequence[LocalOperator]
                              ) -> tuple[AnalyzerSetting, AnalyzerSetting]:
    """Analyzers that restore the singlet's V/H anticorrelation after known local histories.

    Returns ``{U_A|V>, U_A|H>}`` on A and ``{U_B|V>, U_B|H>}`` on B where
    ``U_A`` and ``U_B`` are the composed histories.
    """
    ua = compose_history(history_a, Arm.A).matrix
    ub = compose_history(history_b, Arm.B).matrix
    la = ("V'", "H'") if history_a else CANONICAL.labels
    lb = ("V'", "H'") if history_b else CANONICAL.labels
    ba = PolarizationBasis(ua[:, 0], ua[:, 1], la, "recovered(A)" if history_a else CANONICAL.name)
    bb = PolarizationBasis(ub[:, 0], ub[:, 1], lb, "recovered(B)" if history_b else CANONICAL.name)
    return AnalyzerSetting(Arm.A, ba), AnalyzerSetting(Arm.B, bb)
