"""
Precession geometry of S around a field: angle, velocity, acceleration, the
rotating-frame matrix G(t) and the NOT rule.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import NotApplicableError, ZeroFieldError
from ..utils.stepping import IntegratorConfig
from .core import TWO_PI, BlochVector, CanonicalState, bloch_from_canonical
from .dynamics import integrate_bloch, sample_grid
from .fields import FieldSpec, RotatingFieldParams

AXIS_TOL = 1e-12
POLE_PASSAGE_TOL = 1e-8


@dataclass(frozen=True)
class PrecessionData:
    """Angle ψ between S and B, speed |S x B|, centripetal |(S x B) x B|, rate |B|, period 2π/|B|"""

    energy: float
    psi: float
    speed: float
    accel: float
    angular_rate: float
    period: float
    velocity: Tuple[float, float, float]
    acceleration: Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class FrameRotation:
    angle: float
    matrix: np.ndarray

    def apply(self, v: Sequence[float]) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


@dataclass(frozen=True)
class FrameOverlaps:
    overlap_rotating: float
    overlap_lab: float


@dataclass(frozen=True)
class NotRuleCheck:
    lhs: float
    rhs: float
    theta: float
    branch: str

    @property
    def satisfied(self) -> bool:
        return abs(self.lhs - self.rhs) <= 1e-12

    @property
    def perpendicular(self) -> bool:
        """ψ = π/2, necessary for a NOT by precession about B"""
        return abs(self.lhs) <= 1e-12


@dataclass(frozen=True)
class SeparatrixPrecessionReport:
    levels: Tuple[float, float]
    passes_pole: Tuple[bool, bool]
    max_abs_s3: Tuple[float, float]
    period: float
    quoted_period: Optional[float]

    @property
    def passes(self) -> bool:
        return all(self.passes_pole)


def _field_norm(B_vec: Sequence[float]) -> Tuple[np.ndarray, float]:
    b = np.asarray(B_vec, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        raise ZeroFieldError("precession needs a non-zero field")
    return b, norm


def precession_data(B_vec: Sequence[float], S: BlochVector) -> PrecessionData:
    b, B = _field_norm(B_vec)
    s = S.as_array()
    K = -float(np.dot(b, s))
    v = np.cross(s, b)
    a = np.cross(v, b)
    return PrecessionData(
        energy=K,
        psi=math.acos(max(-1.0, min(1.0, -K / B))),
        speed=float(np.linalg.norm(v)),
        accel=float(np.linalg.norm(a)),
        angular_rate=B,
        period=TWO_PI / B,
        velocity=tuple(float(x) for x in v),
        acceleration=tuple(float(x) for x in a),
    )


def frame_rotation(t: float, omega: float) -> FrameRotation:
    """G(t) = R_z(-ωt), mapping lab vectors into the frame that turns with the field"""
    angle = math.fmod(omega * t, TWO_PI)
    return FrameRotation(angle, Rotation.from_euler("z", -angle).as_matrix())


def frame_overlap_transfer(S_rot_t: BlochVector, S0: BlochVector, t: float, omega: float) -> FrameOverlaps:
    """S_lab(t).S0 = S_rot(t)ᵀ G(t) S0; the rotating-frame overlap is the plain dot product"""
    u, s0 = S_rot_t.as_array(), S0.as_array()
    G = frame_rotation(t, omega)
    return FrameOverlaps(float(np.dot(u, s0)), float(u @ G.apply(s0)))


def not_rule(initial: CanonicalState, B_vec: Sequence[float]) -> NotRuleCheck:
    """
    cos ψ = S1(0) sin Θ with B = |B| (sin Θ, 0, cos Θ). Holds when S3(0) = 0 or B_z = 0.
    """
    b, B = _field_norm(B_vec)
    if abs(b[1]) > AXIS_TOL * B:
        raise NotApplicableError("the NOT rule needs a field in the 1-3 plane (B_y = 0)")
    S = bloch_from_canonical(initial)
    if abs(S.s3) <= AXIS_TOL:
        branch = "equator"
    elif abs(b[2]) <= AXIS_TOL * B:
        branch = "transverse_field"
    else:
        raise NotApplicableError("the NOT rule covers S3(0) = 0 or B_z = 0 only")
    theta = math.atan2(b[0], b[2])
    lhs = float(np.dot(b, S.as_array())) / B
    return NotRuleCheck(lhs, S.s1 * math.sin(theta), theta, branch)


def rotating_field_vector(params: RotatingFieldParams) -> Tuple[float, float, float]:
    """Constant field seen in the rotating frame: -2 (B0 cos φ, B0 sin φ, Ω)"""
    return (
        -2.0 * params.b0 * math.cos(params.phi),
        -2.0 * params.b0 * math.sin(params.phi),
        -2.0 * params.detuning,
    )


def separatrix_precession_check(
    params: RotatingFieldParams,
    n_samples: int = 2000,
    cfg: Optional[IntegratorConfig] = None,
) -> SeparatrixPrecessionReport:
    """
    The separatrix levels K = ±2Ω are the energies of the two poles in the rotating frame.
    Each trajectory at those levels is started half a turn from its pole and integrated for one
    precession period 2π/B; halfway through it must pass the pole.
    """
    b, B = _field_norm(rotating_field_vector(params))
    n = n_samples + (n_samples % 2)
    axis = b / B
    spec = FieldSpec.constant(tuple(b))
    grid = sample_grid(TWO_PI / B, n)
    passes, peaks, levels = [], [], []
    for pole in (np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])):
        start = Rotation.from_rotvec(math.pi * axis).apply(pole)
        traj = integrate_bloch(spec, BlochVector.from_array(start, normalize=True), grid, cfg)
        peak = float(np.max(np.abs(traj.states[:, 2])))
        peaks.append(peak)
        passes.append(peak > 1.0 - POLE_PASSAGE_TOL)
        levels.append(-float(np.dot(b, pole)))
    quoted_period = math.pi / (2.0 * params.b0**2) if params.b0 > 0 else None
    return SeparatrixPrecessionReport(tuple(levels), tuple(passes), tuple(peaks), TWO_PI / B, quoted_period)
