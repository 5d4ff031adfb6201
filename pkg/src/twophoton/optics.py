"""Bases, analyzers, and waveplate operators.

Angles are in radians, measured from vertical, counterclockwise looking
into the beam.  Vectors are in the {|V>, |H>} frame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import (
    CANONICAL, L, R, Arm, ContractViolation,
    LocalOperator, PolarizationBasis,
)

__all__ = [
    "AnalyzerSetting", "RetarderSpec", "canonical_basis", "linear_basis",
    "circular_basis", "elliptical_basis", "explicit_basis", "paper_qwp",
    "retarder", "random_local_unitary", "as_setting",
]


@dataclass(frozen=True)
class AnalyzerSetting:
    """A two-outcome projective analyzer on one arm."""

    arm: Arm
    basis: PolarizationBasis

    def __post_init__(self):
        object.__setattr__(self, "arm", Arm.parse(self.arm))
        if not isinstance(self.basis, PolarizationBasis):
            raise ContractViolation(f"analyzer basis must be a PolarizationBasis, got {type(self.basis).__name__}")


def as_setting(x: AnalyzerSetting | PolarizationBasis, arm: Arm | str) -> AnalyzerSetting:
    """Accept either an analyzer or a bare basis placed on ``arm``."""
    if isinstance(x, AnalyzerSetting):
        return x
    return AnalyzerSetting(Arm.parse(arm), x)


@dataclass(frozen=True)
class RetarderSpec:
    retardance: float
    fast_axis_angle: float

    def __post_init__(self):
        if not (0.0 <= self.retardance < 2 * np.pi):
            raise ContractViolation(f"retardance {self.retardance!r} outside [0, 2pi)")
        if not (0.0 <= self.fast_axis_angle < np.pi):
            raise ContractViolation(f"fast-axis angle {self.fast_axis_angle!r} outside [0, pi)")

    @classmethod
    def wrapped(cls, retardance: float, fast_axis_angle: float) -> "RetarderSpec":
        """Reduce arbitrary angles into the canonical ranges first."""
        return cls(float(np.mod(retardance, 2 * np.pi)), float(np.mod(fast_axis_angle, np.pi)))


def canonical_basis() -> PolarizationBasis:
    return CANONICAL


def linear_basis(theta: float) -> PolarizationBasis:
    """Analyzer at ``theta``: ``e0 = cos|V> + sin|H>``, ``e1 = -sin|V> + cos|H>``."""
    c, s = np.cos(theta), np.sin(theta)
    if theta == 0:
        labels = ("V", "H")
    else:
        deg = f"{np.degrees(theta):.4g}°"
        labels = (f"{deg}∥", f"{deg}⊥")
    return PolarizationBasis(np.array([c, s]), np.array([-s, c]), labels, f"linear({theta:.12g})")


def circular_basis() -> PolarizationBasis:
    """``|R> = (|V> + i|H>)/sqrt2`` and ``|L> = (|V> - i|H>)/sqrt2``."""
    return PolarizationBasis(R, L, ("R", "L"), "circular")


def elliptical_basis(theta: float, chi: float) -> PolarizationBasis:
    """Elliptical analyzer with major axis at ``theta`` and ellipticity angle ``chi``.

    ``chi = 0`` gives :func:`linear_basis`; ``theta = 0, chi = pi/4`` gives
    the circular basis with ``e0 = |R>``.
    """
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    e0 = rot @ np.array([np.cos(chi), 1j * np.sin(chi)])
    e1 = rot @ np.array([1j * np.sin(chi), np.cos(chi)])
    return PolarizationBasis(e0, e1, (f"E{theta:.4g},{chi:.4g}", "orth"),
                             f"elliptical({theta:.12g},{chi:.12g})")


def explicit_basis(e0, e1, labels=("0", "1"), name="explicit") -> PolarizationBasis:
    return PolarizationBasis(np.asarray(e0, dtype=complex), np.asarray(e1, dtype=complex), labels, name)


def paper_qwp(arm: Arm | str = Arm.A) -> LocalOperator:
    """The abstract quarter-wave plate taking |V> to |R> and |H> to |L>.

    Its columns are exactly ``|R>`` and ``|L>``.  No linear retarder equals
    this matrix up to a global phase (it is not symmetric); see
    :func:`retarder` for the physical family.
    """
    return LocalOperator(np.column_stack([R, L]), arm, "qwp")


def retarder(spec: RetarderSpec, arm: Arm | str = Arm.A) -> LocalOperator:
    """Jones matrix of a linear retarder.

    The fast axis ``cos(a)|V> + sin(a)|H>`` is left unchanged and the slow
    axis picks up ``exp(i * retardance)``.  With retardance pi/2 and fast
    axis at 3*pi/4 the plate sends |V> to |R> and |H> to |L>, each up to
    its own phase.
    """
    a = spec.fast_axis_angle
    fast = np.array([np.cos(a), np.sin(a)])
    slow = np.array([-np.sin(a), np.cos(a)])
    m = np.outer(fast, fast) + np.exp(1j * spec.retardance) * np.outer(slow, slow)
    return LocalOperator(m, arm, f"retarder({spec.retardance:.6g},{a:.6g})")


def random_local_unitary(seed: int, arm: Arm | str = Arm.A) -> LocalOperator:
    """Haar-random 2x2 unitary, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    # re-orthonormalize so products of many samples stay within the 1e-12 check
    u, _, vh = np.linalg.svd(q)
    q = u @ vh
    return LocalOperator(q, arm, f"haar[{seed}]")
