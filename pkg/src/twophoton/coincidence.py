"""Time-tagged detector streams and coincidence counting.

A pair source emits photon pairs as a Poisson process.  Each photon may
be lost, its timestamp jittered, and each station adds dark counts.
Channels of detected pair photons come from :func:`measure.sample_outcomes`
with the same seed, so a lossless, noiseless run reproduces the sampler
exactly.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from .measure import sample_outcomes
from .qstate import Arm, ContractViolation, TwoPhotonState

__all__ = [
    "TagStream", "PairSourceSpec", "CoincidenceResult", "CoincidenceEstimate",
    "EmptyResultError", "generate_streams", "match_coincidences",
    "estimate_statistics", "write_tag_stream", "read_tag_stream",
    "format_tag_stream", "parse_tag_stream",
]


class EmptyResultError(ContractViolation):
    """No coincidences were recorded, so no statistics can be formed."""


@dataclass(frozen=True, eq=False)
class TagStream:
    station: Arm
    timestamps: np.ndarray
    channels: np.ndarray

    def __post_init__(self):
        t = np.array(self.timestamps, dtype=float).reshape(-1)
        c = np.array(self.channels, dtype=np.int8).reshape(-1)
        if t.shape != c.shape:
            raise ContractViolation("timestamps and channels differ in length")
        if np.any((c != 0) & (c != 1)):
            raise ContractViolation("channels must be 0 or 1")
        t.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "station", Arm.parse(self.station))
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "channels", c)

    def __len__(self):
        return len(self.timestamps)

    @property
    def is_sorted(self) -> bool:
        return bool(np.all(np.diff(self.timestamps) > 0))

    def singles(self) -> np.ndarray:
        return np.bincount(self.channels, minlength=2)[:2]

    def equals(self, other: "TagStream") -> bool:
        return (self.station is other.station
                and np.array_equal(self.timestamps, other.timestamps)
                and np.array_equal(self.channels, other.channels))


@dataclass(frozen=True)
class PairSourceSpec:
    pair_rate: float
    efficiency_a: float = 1.0
    efficiency_b: float = 1.0
    jitter_sigma: float = 0.0
    dark_rate_a: float = 0.0
    dark_rate_b: float = 0.0

    def __post_init__(self):
        for name in ("pair_rate", "efficiency_a", "efficiency_b", "jitter_sigma",
                     "dark_rate_a", "dark_rate_b"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ContractViolation(f"{name} must be finite and non-negative, got {v!r}")
        if self.efficiency_a > 1 or self.efficiency_b > 1:
            raise ContractViolation("detection efficiencies must not exceed 1")


@dataclass(frozen=True, eq=False)
class CoincidenceResult:
    counts: np.ndarray
    singles_a: np.ndarray
    singles_b: np.ndarray
    accidentals_estimate: float
    window: float
    duration: float
    pairs: np.ndarray  # (n, 2) indices into stream A and stream B

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class CoincidenceEstimate:
    frequencies: np.ndarray
    correlation: float
    frequency_errors: np.ndarray
    correlation_error: float
    total: int


def generate_streams(s: TwoPhotonState, a, b, src: PairSourceSpec, duration: float,
                     seed: int) -> tuple[TagStream, TagStream]:
    """Simulate both stations' detector records over ``[0, duration)``."""
    if not duration > 0:
        raise ContractViolation(f"duration must be positive, got {duration!r}")
    rng = np.random.default_rng([seed, 0x7A6])
    n_pairs = int(rng.poisson(src.pair_rate * duration))
    # a Poisson process conditioned on its count has uniform sorted epochs
    emit = np.sort(rng.uniform(0.0, duration, n_pairs))
    if n_pairs:
        cells = sample_outcomes(s, a, b, n_pairs, seed)
    else:
        cells = np.zeros(0, dtype=np.int64)
    keep_a = rng.random(n_pairs) < src.efficiency_a
    keep_b = rng.random(n_pairs) < src.efficiency_b

    def station(arm, keep, chan, dark_rate):
        t = emit[keep]
        c = chan[keep]
        if src.jitter_sigma > 0:
            t = t + rng.normal(0.0, src.jitter_sigma, t.size)
        n_dark = int(rng.poisson(dark_rate * duration))
        t = np.concatenate([t, rng.uniform(0.0, duration, n_dark)])
        c = np.concatenate([c, rng.integers(0, 2, n_dark)])
        order = np.argsort(t, kind="stable")
        return TagStream(arm, t[order], c[order])

    return (station(Arm.A, keep_a, cells >> 1, src.dark_rate_a),
            station(Arm.B, keep_b, cells & 1, src.dark_rate_b))


def match_coincidences(sa: TagStream, sb: TagStream, window: float,
                       duration: float | None = None) -> CoincidenceResult:
    """Greedy earliest-first pairing of events with ``|tA - tB| <= window``.

    ``duration`` feeds the accidentals estimate; by default it is the span
    covered by both streams.
    """
    if not window > 0:
        raise ContractViolation(f"window must be positive, got {window!r}")
    for st in (sa, sb):
        if not st.is_sorted:
            raise ContractViolation(f"stream {st.station.value} is not strictly time-ordered")
    ta, tb = sa.timestamps, sb.timestamps
    i = j = 0
    pairs = []
    while i < len(ta) and j < len(tb):
        d = tb[j] - ta[i]
        if abs(d) <= window:
            pairs.append((i, j))
            i += 1
            j += 1
        elif d > 0:
            i += 1
        else:
            j += 1
    pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (sa.channels[pairs[:, 0]], sb.channels[pairs[:, 1]]), 1)

    if duration is None:
        both = np.concatenate([ta, tb])
        duration = float(both.max() - both.min()) if both.size > 1 else 0.0
    singles_a, singles_b = sa.singles(), sb.singles()
    if duration > 0:
        # 2 tau R_A R_B T summed over channel pairs, i.e. 2 tau N_A N_B / T
        accidentals = 2 * window * int(singles_a.sum()) * int(singles_b.sum()) / duration
    else:
        accidentals = 0.0
    return CoincidenceResult(counts, singles_a, singles_b, accidentals, float(window),
                             float(duration), pairs)


def estimate_statistics(r: CoincidenceResult) -> CoincidenceEstimate:
    """Frequencies, correlation, and binomial standard errors from counts."""
    n = r.total
    if n == 0:
        raise EmptyResultError("no coincidences recorded")
    f = r.counts / n
    e = float(f[0, 0] + f[1, 1] - f[0, 1] - f[1, 0])
    return CoincidenceEstimate(
        frequencies=f,
        correlation=e,
        frequency_errors=np.sqrt(f * (1 - f) / n),
        correlation_error=float(np.sqrt(max(0.0, 1 - e * e) / n)),
        total=n,
    )


def format_tag_stream(st: TagStream) -> str:
    lines = [f"# station={st.station.value}"]
    # repr() of a float round-trips exactly
    lines += [f"{float(t)!r},{int(c)}" for t, c in zip(st.timestamps, st.channels)]
    return "\n".join(lines) + "\n"


def parse_tag_stream(text: str) -> TagStream:
    buf = io.StringIO(text)
    header = buf.readline().strip()
    if not header.startswith("# station="):
        raise ContractViolation(f"missing '# station=A|B' header, got {header!r}")
    station = header.split("=", 1)[1].strip()
    ts, cs = [], []
    for lineno, line in enumerate(buf, start=2):
        line = line.strip()
        if not line:
            continue
        try:
            t, c = line.split(",")
            ts.append(float(t))
            cs.append(int(c))
        except ValueError:
            raise ContractViolation(f"line {lineno}: expected 'timestamp,channel', got {line!r}") from None
    return TagStream(station, ts, cs)


def write_tag_stream(st: TagStream, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_tag_stream(st))


def read_tag_stream(path: str | os.PathLike) -> TagStream:
    with open(path, encoding="utf-8") as fh:
        return parse_tag_stream(fh.read())
