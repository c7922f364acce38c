"""
Closed-form rotating-field solutions, the rotating-frame canonical transformation,
fixed points and eigen-structure.

In the frame turning with the field, S_rot = R_z(-ωt) S obeys dS_rot/dt = S_rot x B_eff with
B_eff = -2 (B0 cos φ, B0 sin φ, Ω) constant, so S(t) = R_z(ωt) Rot_n(Bt) S0 with
n = (B0 cos φ, B0 sin φ, Ω) / sqrt(B0² + Ω²), Ω = B3 - ω/2 and B = 2 sqrt(B0² + Ω²).
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..config.settings import DEGENERATE_Q_VARIANCE
from ..errors import DegenerateError, DomainError, ZeroFieldError
from .core import (
    TWO_PI,
    BlochVector,
    CanonicalState,
    Frame,
    QubitState,
    bloch_from_canonical,
    canonical_from_bloch,
    qubit_from_canonical,
    wrap_angle,
)
from .fields import RotatingFieldParams


@dataclass(frozen=True)
class RotatingFrameState:
    Q: float
    P: float

    def __post_init__(self):
        if abs(self.Q) > 1.0 + 1e-12:
            raise DomainError(f"|Q| must not exceed 1, got Q={self.Q!r}")
        object.__setattr__(self, "Q", max(-1.0, min(1.0, float(self.Q))))
        object.__setattr__(self, "P", wrap_angle(float(self.P)))


@dataclass(frozen=True)
class FixedPointSet:
    """
    Period-one orbits of the stroboscopic map. The first entry of each pair belongs to
    P̄ = 0 (K = +B), the second to P̄ = π (K = -B).
    """

    P_bar: Tuple[float, float]
    Q_bar_plus: float
    Q_bar_minus: float
    E_plus: float
    E_minus: float
    quantum_eigenvalues: Tuple[float, float]
    eigenstates: Tuple[QubitState, QubitState]
    lab_states: Tuple[CanonicalState, CanonicalState]


@dataclass(frozen=True)
class LinearityCheck:
    slope: float
    intercept: float
    max_residual: float


def _require_lab(initial: CanonicalState):
    if initial.frame is not Frame.LAB:
        raise DomainError("initial state must be given in the lab frame")


def rotating_frame_axis(params: RotatingFieldParams) -> np.ndarray:
    """Unit axis of the rotating-frame precession; +z when the effective field vanishes"""
    v = np.array([params.b0 * math.cos(params.phi), params.b0 * math.sin(params.phi), params.detuning])
    n = float(np.linalg.norm(v))
    return v / n if n > 0.0 else np.array([0.0, 0.0, 1.0])


def _rodrigues(n: np.ndarray, angles: np.ndarray, v: np.ndarray) -> np.ndarray:
    c = np.cos(angles)[:, None]
    s = np.sin(angles)[:, None]
    return v * c + np.cross(n, v) * s + n * float(np.dot(n, v)) * (1.0 - c)


def _rz(angles: np.ndarray, u: np.ndarray) -> np.ndarray:
    c, s = np.cos(angles), np.sin(angles)
    return np.column_stack((u[:, 0] * c - u[:, 1] * s, u[:, 0] * s + u[:, 1] * c, u[:, 2]))


def _phases(params: RotatingFieldParams, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(ωt, Bt) with each reduced mod 2π"""
    drive = np.mod(params.omega * times, TWO_PI)
    precession = np.mod(params.magnitude * times, TWO_PI)
    return drive, precession


def exact_bloch_series(params: RotatingFieldParams, initial: CanonicalState, times: Sequence[float]) -> np.ndarray:
    """Closed-form S(t) for every t, shape (len(times), 3)"""
    _require_lab(initial)
    t = np.atleast_1d(np.asarray(times, dtype=float))
    s0 = bloch_from_canonical(initial).as_array()
    drive, precession = _phases(params, t)
    u = _rodrigues(rotating_frame_axis(params), precession, s0)
    return _rz(drive, u)


def exact_bloch_r(params: RotatingFieldParams, initial: CanonicalState, t: float) -> BlochVector:
    return BlochVector.from_array(exact_bloch_series(params, initial, [t])[0], normalize=True)


def exact_components_r(params: RotatingFieldParams, initial: CanonicalState, t: float) -> BlochVector:
    """
    S(t) written out component by component for φ = 0, with x = p0, r = sqrt(1 - q0²):

    S1 = -(4 q0 B0 / B²) [2Ω cos ωt sin²(Bt/2) + (B/2) sin ωt sin Bt]
         + (r / B²) [2B0² cos(x + ωt) + (B/2 - Ω)² cos(x + ωt - Bt) + (B/2 + Ω)² cos(x + ωt + Bt)
                     + 4B0² cos(x - ωt) sin²(Bt/2)]
    S2 = -(4 q0 B0 / B²) [2Ω sin ωt sin²(Bt/2) - (B/2) cos ωt sin Bt]
         + (r / B²) [2B0² sin(x + ωt) + (B/2 - Ω)² sin(x + ωt - Bt) + (B/2 + Ω)² sin(x + ωt + Bt)
                     - 4B0² sin(x - ωt) sin²(Bt/2)]
    S3 = -(4 q0 / B²) [Ω² + B0² cos Bt] + (4 B0 r / B²) [Ω cos x (1 - cos Bt) + (B/2) sin x sin Bt]

    A phase φ enters as x = p0 - φ followed by a turn of (S1, S2) by φ.
    """
    _require_lab(initial)
    q0 = initial.q
    r = math.sqrt(max(0.0, 1.0 - q0 * q0))
    x = initial.p - params.phi
    wt = math.fmod(params.omega * t, TWO_PI)
    B = params.magnitude
    if B == 0.0:
        s1, s2, s3 = r * math.cos(x + wt), r * math.sin(x + wt), -q0
    else:
        b0, om, B2 = params.b0, params.detuning, B * B
        bt = math.fmod(B * t, TWO_PI)
        half2 = math.sin(0.5 * bt) ** 2
        lo, hi = (0.5 * B - om) ** 2, (0.5 * B + om) ** 2
        s1 = -(4.0 * q0 * b0 / B2) * (
            2.0 * om * math.cos(wt) * half2 + 0.5 * B * math.sin(wt) * math.sin(bt)
        ) + (r / B2) * (
            2.0 * b0**2 * math.cos(x + wt)
            + lo * math.cos(x + wt - bt)
            + hi * math.cos(x + wt + bt)
            + 4.0 * b0**2 * math.cos(x - wt) * half2
        )
        s2 = -(4.0 * q0 * b0 / B2) * (
            2.0 * om * math.sin(wt) * half2 - 0.5 * B * math.cos(wt) * math.sin(bt)
        ) + (r / B2) * (
            2.0 * b0**2 * math.sin(x + wt)
            + lo * math.sin(x + wt - bt)
            + hi * math.sin(x + wt + bt)
            - 4.0 * b0**2 * math.sin(x - wt) * half2
        )
        s3 = -(4.0 * q0 / B2) * (om * om + b0**2 * math.cos(bt)) + (4.0 * b0 * r / B2) * (
            om * math.cos(x) * (1.0 - math.cos(bt)) + 0.5 * B * math.sin(x) * math.sin(bt)
        )
    c, s = math.cos(params.phi), math.sin(params.phi)
    return BlochVector(c * s1 - s * s2, s * s1 + c * s2, s3)


def exact_canonical_r(params: RotatingFieldParams, initial: CanonicalState, t: float) -> CanonicalState:
    """(q(t), p(t)) recovered from the closed-form Bloch vector"""
    return canonical_from_bloch(exact_bloch_r(params, initial, t))


def exact_overlap_r(params: RotatingFieldParams, initial: CanonicalState, t: float) -> float:
    """
    S(t).S(0) = cos(ωt)(u1 s1 + u2 s2) + sin(ωt)(u1 s2 - u2 s1) + u3 s3, u = Rot_n(Bt) S0
    """
    _require_lab(initial)
    s = bloch_from_canonical(initial).as_array()
    drive, precession = _phases(params, np.array([float(t)]))
    u = _rodrigues(rotating_frame_axis(params), precession, s)[0]
    a = float(drive[0])
    value = math.cos(a) * (u[0] * s[0] + u[1] * s[1]) + math.sin(a) * (u[0] * s[1] - u[1] * s[0]) + u[2] * s[2]
    return max(-1.0, min(1.0, value))


def to_rotating_frame(state: CanonicalState, params: RotatingFieldParams, t: float) -> RotatingFrameState:
    """Q = q, P = p - φ - ωt (mod 2π)"""
    _require_lab(state)
    return RotatingFrameState(state.q, state.p - params.phi - math.fmod(params.omega * t, TWO_PI))


def from_rotating_frame(rstate: RotatingFrameState, params: RotatingFieldParams, t: float) -> CanonicalState:
    return CanonicalState(rstate.Q, rstate.P + params.phi + math.fmod(params.omega * t, TWO_PI), Frame.LAB)


def rotating_hamiltonian(params: RotatingFieldParams, state: RotatingFrameState) -> float:
    """K = 2 B0 sqrt(1 - Q²) cos P - 2 Ω Q"""
    if abs(state.Q) > 1.0:
        raise DomainError("|Q| must not exceed 1")
    return 2.0 * params.b0 * math.sqrt(max(0.0, 1.0 - state.Q * state.Q)) * math.cos(state.P) - (
        2.0 * params.detuning * state.Q
    )


def fixed_points(params: RotatingFieldParams) -> FixedPointSet:
    B = params.magnitude
    if B == 0.0:
        raise ZeroFieldError("no fixed-point structure without a field (B = 0)")
    q_plus = -2.0 * params.detuning / B
    q_minus = -q_plus
    lab_plus = CanonicalState(q_plus, params.phi)
    lab_minus = CanonicalState(q_minus, params.phi + math.pi)
    return FixedPointSet(
        P_bar=(0.0, math.pi),
        Q_bar_plus=q_plus,
        Q_bar_minus=q_minus,
        E_plus=B,
        E_minus=-B,
        quantum_eigenvalues=(0.5 * B, -0.5 * B),
        eigenstates=(qubit_from_canonical(lab_plus), qubit_from_canonical(lab_minus)),
        lab_states=(lab_plus, lab_minus),
    )


def energy_linearity_check(
    params: RotatingFieldParams, initial: CanonicalState, t_grid: Sequence[float]
) -> LinearityCheck:
    """Least-squares H(t) against q(t) along the exact trajectory; the slope is -ω"""
    t = np.asarray(t_grid, dtype=float)
    S = exact_bloch_series(params, initial, t)
    q = -S[:, 2]
    if t.size < 3 or float(np.var(q)) < DEGENERATE_Q_VARIANCE:
        raise DegenerateError("q is constant along this trajectory (fixed point)")
    arg = params.omega * np.mod(t, params.period) + params.phi
    field = -2.0 * np.column_stack(
        (params.b0 * np.cos(arg), params.b0 * np.sin(arg), np.full_like(t, params.b3))
    )
    H = -np.sum(field * S, axis=1)
    design = np.column_stack((q, np.ones_like(q)))
    (slope, intercept), *_ = np.linalg.lstsq(design, H, rcond=None)
    residual = float(np.max(np.abs(H - (slope * q + intercept))))
    return LinearityCheck(float(slope), float(intercept), residual)
