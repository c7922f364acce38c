"""
State representations and exact conversions between qubit states, density
matrices, Bloch vectors and canonical (q, p) coordinates.

Conventions:
  S = (sqrt(1-q^2) cos p, sqrt(1-q^2) sin p, -q)
  |psi> = sqrt((1-q)/2) |+> + sqrt((1+q)/2) e^{ip} |->
  rho = (1 + S.sigma) / 2
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ..config.settings import UNIT_TOL, PURITY_TOL
from ..errors import DomainError

TWO_PI = 2.0 * math.pi

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY = np.eye(2, dtype=complex)


def wrap_angle(x: float) -> float:
    """Map an angle into [0, 2π)"""
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    # fmod of a tiny negative angle rounds up to 2π
    return 0.0 if y >= TWO_PI else y


class Frame(str, Enum):
    LAB = "lab"
    ROTATING = "rotating"


@dataclass(frozen=True)
class BlochVector:
    """Unit vector on the Bloch sphere"""

    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        norm = math.sqrt(self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3)
        if not math.isfinite(norm) or abs(norm - 1.0) > UNIT_TOL:
            raise DomainError(f"Bloch vector must have unit norm, got {norm!r}")

    @classmethod
    def from_array(cls, v: Sequence[float], normalize: bool = False) -> "BlochVector":
        a = np.asarray(v, dtype=float)
        if normalize:
            n = float(np.linalg.norm(a))
            if n == 0.0 or not math.isfinite(n):
                raise DomainError("cannot normalize a zero or non-finite vector")
            a = a / n
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])

    def dot(self, other: "BlochVector") -> float:
        return self.s1 * other.s1 + self.s2 * other.s2 + self.s3 * other.s3

    def __neg__(self) -> "BlochVector":
        return BlochVector(-self.s1, -self.s2, -self.s3)


@dataclass(frozen=True)
class CanonicalState:
    """Phase-space point; q is clamped to [-1, 1] and p wrapped to [0, 2π)"""

    q: float
    p: float
    frame: Frame = Frame.LAB

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p)):
            raise DomainError("q and p must be finite")
        if abs(self.q) > 1.0 + UNIT_TOL:
            raise DomainError(f"|q| must not exceed 1, got q={self.q!r}")
        object.__setattr__(self, "q", max(-1.0, min(1.0, float(self.q))))
        object.__setattr__(self, "p", wrap_angle(float(self.p)))
        object.__setattr__(self, "frame", Frame(self.frame))


@dataclass(frozen=True)
class QubitState:
    """Normalized amplitudes on the basis {|+>, |->}"""

    amp_plus: complex
    amp_minus: complex

    def __post_init__(self):
        norm2 = abs(self.amp_plus) ** 2 + abs(self.amp_minus) ** 2
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > UNIT_TOL:
            raise DomainError(f"qubit state must be normalized, got |psi|^2={norm2!r}")

    @classmethod
    def from_array(cls, v: Sequence[complex], normalize: bool = False) -> "QubitState":
        a = np.asarray(v, dtype=complex)
        if normalize:
            n = float(np.linalg.norm(a))
            if n == 0.0:
                raise DomainError("cannot normalize a zero state")
            a = a / n
        return cls(complex(a[0]), complex(a[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.amp_plus, self.amp_minus], dtype=complex)

    def inner(self, other: "QubitState") -> complex:
        """<self|other>"""
        return self.amp_plus.conjugate() * other.amp_plus + self.amp_minus.conjugate() * other.amp_minus


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Pure-state density matrix"""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError("density matrix must be 2x2")
        if np.max(np.abs(m - m.conj().T)) > UNIT_TOL:
            raise DomainError("density matrix must be Hermitian")
        if abs(np.trace(m) - 1.0) > UNIT_TOL:
            raise DomainError("density matrix must have unit trace")
        purity = float(np.real(np.trace(m @ m)))
        if abs(purity - 1.0) > PURITY_TOL:
            raise DomainError(f"only pure states are supported, got purity {purity!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def bloch_from_canonical(state: CanonicalState) -> BlochVector:
    r = math.sqrt(max(0.0, 1.0 - state.q * state.q))
    return BlochVector.from_array((r * math.cos(state.p), r * math.sin(state.p), -state.q), normalize=True)


def canonical_from_bloch(S: BlochVector, frame: Frame = Frame.LAB) -> CanonicalState:
    # Poles carry no phase; p = 0 there
    if S.s1 == 0.0 and S.s2 == 0.0:
        return CanonicalState(-S.s3, 0.0, frame)
    return CanonicalState(-S.s3, math.atan2(S.s2, S.s1), frame)


def qubit_from_canonical(state: CanonicalState) -> QubitState:
    a = math.sqrt((1.0 - state.q) / 2.0)
    b = math.sqrt((1.0 + state.q) / 2.0)
    return QubitState(complex(a), b * complex(math.cos(state.p), math.sin(state.p)))


def bloch_from_qubit(psi: QubitState) -> BlochVector:
    transverse = 2.0 * psi.amp_plus.conjugate() * psi.amp_minus
    s3 = abs(psi.amp_plus) ** 2 - abs(psi.amp_minus) ** 2
    return BlochVector.from_array((transverse.real, transverse.imag, s3), normalize=True)


def perpendicular(state: CanonicalState) -> CanonicalState:
    """Orthogonal state: (q, p) -> (-q, p + π), i.e. S -> -S"""
    return CanonicalState(-state.q, state.p + math.pi, state.frame)


def density_from_bloch(S: BlochVector) -> DensityMatrix:
    return DensityMatrix(0.5 * (IDENTITY + S.s1 * SIGMA_X + S.s2 * SIGMA_Y + S.s3 * SIGMA_Z))


def density_from_qubit(psi: QubitState) -> DensityMatrix:
    v = psi.as_array()
    return DensityMatrix(np.outer(v, v.conj()))


def bloch_from_density(rho: DensityMatrix) -> BlochVector:
    comps = [float(np.real(np.trace(rho.matrix @ s))) for s in PAULI]
    return BlochVector.from_array(comps, normalize=True)
