"""Single-photon polarization vectors and two-photon pure states.

Everything is stored in the canonical linear frame {|V>, |H>}.  A
:class:`TwoPhotonState` carries a pair of display bases, and its
``amps`` are the coordinates in those bases, recomputed on demand.
Component ordering is ``(e0 e0, e0 e1, e1 e0, e1 e1)``, arm A first.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

CONSTRUCT_TOL = 1e-12
ACCUM_TOL = 1e-9

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class ContractViolation(ValueError):
    """Raised when an operation's precondition does not hold."""


class Arm(str, enum.Enum):
    A = "A"
    B = "B"

    @classmethod
    def parse(cls, value: "Arm | str") -> "Arm":
        try:
            return cls(value.upper() if isinstance(value, str) else value)
        except ValueError:
            raise ContractViolation(f"unknown arm {value!r}") from None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ContractViolation(f"{what} contains NaN or infinity")


def pol_vector(c_v: complex, c_h: complex, tol: float = CONSTRUCT_TOL) -> np.ndarray:
    """Return the normalized polarization vector ``c_v|V> + c_h|H>``.

    Raises :class:`ContractViolation` if ``|c_v|^2 + |c_h|^2`` is not 1.
    """
    v = _frozen([c_v, c_h])
    _check_finite(v, "polarization vector")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > tol:
        raise ContractViolation(f"polarization vector has norm^2 {norm2!r}, expected 1")
    return v


V = pol_vector(1, 0)
H = pol_vector(0, 1)
R = pol_vector(_SQRT_HALF, 1j * _SQRT_HALF)
L = pol_vector(_SQRT_HALF, -1j * _SQRT_HALF)


@dataclass(frozen=True, eq=False)
class PolarizationBasis:
    """An orthonormal pair of polarization vectors, outcome 0 <-> ``e0``."""

    e0: np.ndarray
    e1: np.ndarray
    labels: tuple[str, str] = ("0", "1")
    name: str = ""

    def __post_init__(self):
        e0, e1 = _frozen(self.e0), _frozen(self.e1)
        if e0.shape != (2,) or e1.shape != (2,):
            raise ContractViolation("basis vectors must have two components")
        _check_finite(np.concatenate([e0, e1]), "basis")
        gram = np.array([[np.vdot(e0, e0), np.vdot(e0, e1)],
                         [np.vdot(e1, e0), np.vdot(e1, e1)]])
        if np.max(np.abs(gram - np.eye(2))) > CONSTRUCT_TOL:
            raise ContractViolation(f"basis {self.name or self.labels} is not orthonormal")
        object.__setattr__(self, "e0", e0)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def matrix(self) -> np.ndarray:
        """2x2 matrix whose columns are ``e0`` and ``e1`` in the {V, H} frame."""
        return np.column_stack([self.e0, self.e1])

    def same_as(self, other: "PolarizationBasis", tol: float = CONSTRUCT_TOL) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=tol))

    def __repr__(self):
        return f"PolarizationBasis({self.name or '/'.join(self.labels)})"


CANONICAL = PolarizationBasis(V, H, ("V", "H"), "linear(0)")


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A 2x2 unitary, given in the {V, H} frame, acting on one arm."""

    matrix: np.ndarray
    arm: Arm = Arm.A
    name: str = ""

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2, 2):
            raise ContractViolation(f"local operator must be 2x2, got shape {m.shape}")
        _check_finite(m, "operator")
        err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if err > CONSTRUCT_TOL:
            raise ContractViolation(f"operator {self.name!r} is not unitary (max |M^H M - I| = {err:.3g})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "arm", Arm.parse(self.arm))

    @classmethod
    def identity(cls, arm: Arm | str = Arm.A) -> "LocalOperator":
        return cls(np.eye(2), arm, "identity")

    @property
    def m00(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def m01(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def m10(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def m11(self) -> complex:
        return complex(self.matrix[1, 1])

    def inverse(self) -> "LocalOperator":
        return LocalOperator(self.matrix.conj().T, self.arm, f"{self.name}^-1" if self.name else "")

    def __matmul__(self, vec):
        return self.matrix @ np.asarray(vec)

    def __repr__(self):
        return f"LocalOperator({self.name or 'matrix'}, arm={self.arm.value})"


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    """Pure two-photon polarization state.

    ``vector`` holds the canonical {V,H} x {V,H} amplitudes; ``basis_a`` and
    ``basis_b`` only decide how :attr:`amps` is expressed.
    """

    vector: np.ndarray
    basis_a: PolarizationBasis = CANONICAL
    basis_b: PolarizationBasis = CANONICAL

    def __post_init__(self):
        v = _frozen(self.vector)
        if v.shape != (4,):
            raise ContractViolation(f"two-photon state needs 4 amplitudes, got shape {v.shape}")
        _check_finite(v, "state")
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > ACCUM_TOL:
            raise ContractViolation(f"state has norm^2 {norm2!r}, expected 1")
        object.__setattr__(self, "vector", v)

    @classmethod
    def from_amplitudes(cls, amps, basis_a: PolarizationBasis = CANONICAL,
                        basis_b: PolarizationBasis = CANONICAL) -> "TwoPhotonState":
        """Build a state from coordinates given in ``basis_a`` x ``basis_b``."""
        amps = np.asarray(amps, dtype=complex)
        return cls(np.kron(basis_a.matrix, basis_b.matrix) @ amps, basis_a, basis_b)

    @classmethod
    def product(cls, a, b) -> "TwoPhotonState":
        return cls(np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))

    @property
    def amps(self) -> np.ndarray:
        """Coordinates in ``basis_a`` x ``basis_b``."""
        t = np.kron(self.basis_a.matrix, self.basis_b.matrix).conj().T
        return t @ self.vector

    @property
    def amplitude_matrix(self) -> np.ndarray:
        """Canonical amplitudes as a 2x2 array indexed ``[a, b]``."""
        return self.vector.reshape(2, 2)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.vector, self.vector).real))

    def __repr__(self):
        la, lb = self.basis_a.labels, self.basis_b.labels
        terms = [f"{c.real:+.4f}{c.imag:+.4f}j|{x}{y}>"
                 for c, (x, y) in zip(self.amps, [(la[0], lb[0]), (la[0], lb[1]),
                                                  (la[1], lb[0]), (la[1], lb[1])])]
        return "TwoPhotonState(" + " ".join(terms) + ")"


def make_singlet() -> TwoPhotonState:
    """``(|V>_A|H>_B - |H>_A|V>_B) / sqrt(2)`` in {V,H} x {V,H}."""
    return TwoPhotonState(np.array([0, _SQRT_HALF, -_SQRT_HALF, 0], dtype=complex))


def change_basis(s: TwoPhotonState, new_a: PolarizationBasis,
                 new_b: PolarizationBasis) -> TwoPhotonState:
    """Re-express ``s`` in ``new_a`` x ``new_b``; the physical state is unchanged."""
    for b in (new_a, new_b):
        if not isinstance(b, PolarizationBasis):
            raise ContractViolation(f"expected a PolarizationBasis, got {type(b).__name__}")
    return TwoPhotonState(s.vector, new_a, new_b)


def apply_local(s: TwoPhotonState, op: LocalOperator) -> TwoPhotonState:
    """Apply ``op`` to its arm; the result keeps the display bases of ``s``."""
    if not isinstance(op, LocalOperator):
        raise ContractViolation(f"expected a LocalOperator, got {type(op).__name__}")
    # contract over the arm's index of the 2x2 amplitude matrix
    c = s.amplitude_matrix
    out = op.matrix @ c if op.arm is Arm.A else c @ op.matrix.T
    return TwoPhotonState(out.reshape(4), s.basis_a, s.basis_b)


def apply_history(s: TwoPhotonState, ops) -> TwoPhotonState:
    for op in ops:
        s = apply_local(s, op)
    return s


def overlap(a: TwoPhotonState, b: TwoPhotonState) -> complex:
    """Inner product ``<a|b>``."""
    return complex(np.vdot(a.vector, b.vector))


def equal_up_to_global_phase(a: TwoPhotonState, b: TwoPhotonState,
                             tol: float = ACCUM_TOL) -> bool:
    """True iff ``|<a|b>| >= 1 - tol``.  Both must carry the same bases."""
    if not (a.basis_a.same_as(b.basis_a) and a.basis_b.same_as(b.basis_b)):
        raise ContractViolation("states are expressed in different bases; call change_basis first")
    return abs(overlap(a, b)) >= 1.0 - tol


def compose(op1: LocalOperator, op2: LocalOperator) -> LocalOperator:
    """Operator for ``op1`` followed by ``op2`` (matrix ``op2 @ op1``)."""
    if op1.arm is not op2.arm:
        raise ContractViolation(f"cannot compose operators on arms {op1.arm.value} and {op2.arm.value}")
    names = [n for n in (op1.name, op2.name) if n and n != "identity"]
    return LocalOperator(op2.matrix @ op1.matrix, op1.arm, " then ".join(names))


def compose_history(ops, arm: Arm | str = Arm.A) -> LocalOperator:
    """Fold a sequence of same-arm operators, first-applied first."""
    arm = Arm.parse(arm)
    total = LocalOperator.identity(arm)
    for op in ops:
        if op.arm is not arm:
            raise ContractViolation(f"operator {op!r} is on arm {op.arm.value}, expected {arm.value}")
        total = compose(total, op)
    return total
