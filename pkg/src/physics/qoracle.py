"""
Quantum-side oracle: 2x2 Schrödinger propagation, RWA solutions and Rabi formulas.

H(t) = -B(t).sigma / 2 and i dpsi/dt = H psi, so the Bloch image of every propagated state
obeys dS/dt = S x B.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..config.settings import UNITARY_TOL
from ..errors import DomainError
from ..utils.stepping import IntegratorConfig, integrate_dense
from .core import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix, QubitState
from .fields import FieldSpec, field_function

logger = logging.getLogger(__name__)

# exp(+iπσy/4) takes H_NR = B0 σx + B3 cos(ωt) σz to B0 σz - B3 cos(ωt) σx
Y_QUARTER_TURN = (IDENTITY + 1j * SIGMA_Y) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Propagator:
    """U(t) with U†U = 1"""

    t: float
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2) or np.max(np.abs(m.conj().T @ m - IDENTITY)) > UNITARY_TOL:
            raise DomainError("propagator must be a 2x2 unitary")
        object.__setattr__(self, "matrix", m)

    def apply(self, psi: QubitState) -> QubitState:
        return QubitState.from_array(self.matrix @ psi.as_array(), normalize=True)


@dataclass(frozen=True)
class RwaParams:
    b0: float
    b3: float
    omega: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.b0, self.b3, self.omega)):
            raise DomainError("RWA parameters must be finite")
        if self.omega <= 0:
            raise DomainError("omega must be positive")

    @property
    def resonant(self) -> bool:
        return abs(self.omega - 2.0 * self.b0) <= 1e-12 * self.omega


def schrodinger_rhs(spec: FieldSpec):
    """Right-hand side of i dpsi/dt = -(B.sigma / 2) psi for the field of spec"""
    field = field_function(spec)

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        b1, b2, b3 = field(t)
        a, b = psi[0], psi[1]
        # dpsi/dt = (i/2) (B.sigma) psi
        return 0.5j * np.array([b3 * a + (b1 - 1j * b2) * b, (b1 + 1j * b2) * a - b3 * b])

    return rhs


def _integrator_kwargs(spec: FieldSpec, cfg: Optional[IntegratorConfig]) -> dict:
    cfg = cfg or IntegratorConfig()
    return cfg.kwargs(spec.params.period if spec.is_periodic else None)


def propagate(
    spec: FieldSpec, psi0: QubitState, t_grid: Sequence[float], cfg: Optional[IntegratorConfig] = None
) -> List[QubitState]:
    """Integrate i dpsi/dt = H(t) psi and sample at t_grid"""
    t = np.asarray(t_grid, dtype=float)
    if t.size and t[0] < 0:
        raise DomainError("time grid must start at t >= 0")
    rhs = schrodinger_rhs(spec)
    kwargs = _integrator_kwargs(spec, cfg)
    run = integrate_dense(rhs, psi0.as_array(), t, norm_slices=(slice(0, 2),), **kwargs)
    logger.debug("propagate: %d samples, norm drift %.3e", t.size, run.max_drift)
    return [QubitState.from_array(row, normalize=True) for row in run.ys]


def propagator(
    spec: FieldSpec, t_grid: Sequence[float], cfg: Optional[IntegratorConfig] = None
) -> List[Propagator]:
    """Integrate both basis columns of U(t)"""
    rhs = schrodinger_rhs(spec)

    def rhs2(t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate((rhs(t, y[:2]), rhs(t, y[2:])))

    run = integrate_dense(
        rhs2,
        np.array([1, 0, 0, 1], dtype=complex),
        t_grid,
        norm_slices=(slice(0, 2), slice(2, 4)),
        **_integrator_kwargs(spec, cfg),
    )
    out = []
    for tk, row in zip(run.times, run.ys):
        # nearest unitary (polar factor) removes the residual column skew
        w, _, vh = np.linalg.svd(np.column_stack((row[:2], row[2:])))
        out.append(Propagator(float(tk), w @ vh))
    return out


def rabi_frequency(params: RwaParams) -> float:
    """Ω_R = sqrt((2B0 - ω)² + B3²)"""
    return math.hypot(2.0 * params.b0 - params.omega, params.b3)


def su2_rotation(angle: float, axis: Sequence[float]) -> np.ndarray:
    """exp(-i angle n.sigma / 2) = cos(angle/2) 1 - i sin(angle/2) n.sigma"""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    n_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return math.cos(0.5 * angle) * IDENTITY - 1j * math.sin(0.5 * angle) * n_sigma


def rwa_generator(params: RwaParams) -> np.ndarray:
    """σ = ((2B0 - ω) σz - B3 σx) / Ω_R in the rotated basis; σ² = 1"""
    omega_r = rabi_frequency(params)
    if omega_r == 0.0:
        return SIGMA_Z.copy()
    return ((2.0 * params.b0 - params.omega) * SIGMA_Z - params.b3 * SIGMA_X) / omega_r


def rwa_solution(params: RwaParams, psi0: QubitState, t: float) -> QubitState:
    """
    RWA state in the original basis:
    psi_RWA(t) = U† R(t) exp(-i Ω_R t σ / 2) U psi0 with U = exp(iπσy/4), R(t) = exp(-iωtσz/2).
    On resonance the middle factor is exp(i B3 t σx / 2).
    """
    omega_r = rabi_frequency(params)
    half = 0.5 * omega_r * t
    inner = math.cos(half) * IDENTITY - 1j * math.sin(half) * rwa_generator(params)
    frame = np.diag([np.exp(-0.5j * params.omega * t), np.exp(0.5j * params.omega * t)])
    u = Y_QUARTER_TURN
    psi = u.conj().T @ frame @ inner @ u @ psi0.as_array()
    return QubitState.from_array(psi, normalize=True)


def distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """D = sqrt(2 Tr[(rho1 - rho2)²]), the Euclidean distance of the Bloch vectors"""
    d = rho1.matrix - rho2.matrix
    return math.sqrt(max(0.0, 2.0 * float(np.real(np.trace(d @ d)))))


def state_distance(psi1: QubitState, psi2: QubitState) -> float:
    """||psi1 - psi2|| including global phase"""
    return float(np.linalg.norm(psi1.as_array() - psi2.as_array()))
