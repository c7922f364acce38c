"""
Stroboscopic maps, analytic contour curves, commensurability and separatrices
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import CONTOUR_POINTS, QG_COMMENSURABILITY_TOL, QG_MAX_DENOMINATOR
from ..errors import DegenerateError, EmptyCurveError, PeriodError, ZeroFieldError
from ..utils.data_manager import write_csv
from ..utils.parallel import ordered_map
from ..utils.stepping import IntegratorConfig
from .core import TWO_PI, CanonicalState, bloch_from_canonical, wrap_angle
from .dynamics import integrate_bloch
from .fields import FieldSpec, NonrotatingFieldParams, RotatingFieldParams

logger = logging.getLogger(__name__)

MAP_HEADER = ("ic_index", "k", "t", "q", "p", "H")
CONTOUR_HEADER = ("level", "q", "p")


@dataclass
class StrobeOrbit:
    initial: CanonicalState
    k: np.ndarray
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    H: np.ndarray
    max_norm_drift: float = 0.0


@dataclass
class StroboscopicMap:
    spec: FieldSpec
    n_periods: int
    orbits: List[StrobeOrbit] = field(default_factory=list)

    def rows(self):
        for i, orbit in enumerate(self.orbits):
            for j in range(orbit.k.size):
                yield (i, int(orbit.k[j]), float(orbit.t[j]), float(orbit.q[j]), float(orbit.p[j]), float(orbit.H[j]))

    def to_csv(self, path: Optional[str] = None):
        write_csv(MAP_HEADER, self.rows(), path)


class CurveKind(str, Enum):
    R_MAP = "r_map"
    NR_MAP = "nr_map"
    SEPARATRIX = "separatrix"


@dataclass
class ContourCurve:
    """
    Points (q, p) of  2 a sqrt(1 - q²) cos(p - phase) - c q = level.
    Rotating map: a = B0, c = 2Ω, phase = φ. Non-rotating map: a = B0, c = 2B3 - γ, phase = 0.
    """

    level: float
    q: np.ndarray
    p: np.ndarray
    kind: CurveKind
    amplitude: float
    coupling: float
    phase: float = 0.0
    degenerate: bool = False

    def residuals(self, q=None, p=None) -> np.ndarray:
        q = self.q if q is None else np.asarray(q, dtype=float)
        p = self.p if p is None else np.asarray(p, dtype=float)
        return contour_value(self.amplitude, self.coupling, self.phase, q, p) - self.level

    def rows(self):
        for qi, pi in zip(self.q, self.p):
            yield (self.level, float(qi), float(pi))

    def to_csv(self, path: Optional[str] = None):
        write_csv(CONTOUR_HEADER, self.rows(), path)


@dataclass(frozen=True)
class Commensurability:
    ratio: float
    numerator: int
    denominator: int
    error: float
    rational: bool
    terms: Tuple[int, ...]

    @property
    def classification(self) -> str:
        return f"rational({self.numerator}/{self.denominator})" if self.rational else "irrational-within-tol"


def contour_value(amplitude: float, coupling: float, phase: float, q, p):
    q = np.asarray(q, dtype=float)
    return 2.0 * amplitude * np.sqrt(np.clip(1.0 - q * q, 0.0, None)) * np.cos(np.asarray(p) - phase) - coupling * q


# -------------------------------
# Stroboscopic sampling
# -------------------------------

def strobe_times(spec: FieldSpec, n_periods: int) -> np.ndarray:
    if not spec.is_periodic:
        raise PeriodError("stroboscopic maps need a periodic field")
    if n_periods < 0:
        raise ValueError("n_periods must be non-negative")
    # one multiplication per strobe, no accumulation
    return np.arange(n_periods + 1) * (TWO_PI / spec.params.omega)


def _strobe_orbit(spec: FieldSpec, times: np.ndarray, cfg: IntegratorConfig, initial: CanonicalState) -> StrobeOrbit:
    traj = integrate_bloch(spec, bloch_from_canonical(initial), times, cfg)
    canon = traj.canonical
    return StrobeOrbit(
        initial=initial,
        k=np.arange(times.size),
        t=times,
        q=np.array([c.q for c in canon]),
        p=np.array([c.p for c in canon]),
        H=traj.energies,
        max_norm_drift=float(traj.meta["max_norm_drift"]),
    )


def stroboscopic_map(
    spec: FieldSpec,
    initials: Sequence[CanonicalState],
    n_periods: int,
    cfg: Optional[IntegratorConfig] = None,
    jobs: Optional[int] = None,
) -> StroboscopicMap:
    """Sample each initial condition at t_k = k T, k = 0..n_periods"""
    times = strobe_times(spec, n_periods)
    worker = partial(_strobe_orbit, spec, times, cfg or IntegratorConfig())
    orbits = ordered_map(worker, list(initials), jobs)
    logger.info("Stroboscopic map: %d orbits x %d periods", len(orbits), n_periods)
    return StroboscopicMap(spec, n_periods, orbits)


def distinct_points(q: Sequence[float], p: Sequence[float], resolution: float = 1e-6) -> int:
    """Number of distinct strobe points on the sphere at the given resolution"""
    pts = np.column_stack((np.asarray(q, dtype=float), np.asarray(p, dtype=float)))
    r = np.sqrt(np.clip(1.0 - pts[:, 0] ** 2, 0.0, None))
    xyz = np.column_stack((r * np.cos(pts[:, 1]), r * np.sin(pts[:, 1]), -pts[:, 0]))
    kept: List[np.ndarray] = []
    for v in xyz:
        if not any(np.linalg.norm(v - w) <= resolution for w in kept):
            kept.append(v)
    return len(kept)


def orbit_closure(orbit: StrobeOrbit, tol: float = 1e-6) -> Optional[int]:
    """First k > 0 at which the strobe orbit returns to its start, or None"""
    r = np.sqrt(np.clip(1.0 - orbit.q**2, 0.0, None))
    xyz = np.column_stack((r * np.cos(orbit.p), r * np.sin(orbit.p), -orbit.q))
    d = np.linalg.norm(xyz[1:] - xyz[0], axis=1)
    hits = np.nonzero(d <= tol)[0]
    return int(hits[0] + 1) if hits.size else None


# -------------------------------
# Contours
# -------------------------------

def solve_contour(
    amplitude: float,
    coupling: float,
    phase: float,
    level: float,
    n_points: int = CONTOUR_POINTS,
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    Sweep p and solve A(p) sqrt(1 - q²) = level + c q for q, A(p) = 2 a cos(p - phase).
    Squaring gives (A² + c²) q² + 2 level c q + level² - A² = 0; roots are kept when they
    satisfy the unsquared equation. Returns (q, p, has_lines).
    """
    base = np.linspace(0.0, TWO_PI, n_points, endpoint=False)
    extrema = np.array([wrap_angle(phase), wrap_angle(phase + math.pi)])
    ps = np.unique(np.concatenate((base, extrema)))
    scale = max(1.0, 2.0 * abs(amplitude) + abs(coupling) + abs(level))
    qs_out, ps_out = [], []
    for p in ps:
        A = 2.0 * amplitude * math.cos(p - phase)
        a2 = A * A + coupling * coupling
        if a2 == 0.0:
            continue
        disc = A * A * (a2 - level * level)
        if disc < 0.0:
            if disc < -1e-12 * a2 * a2:
                continue
            disc = 0.0
        root = math.sqrt(disc)
        for q in {(-level * coupling + root) / a2, (-level * coupling - root) / a2}:
            if abs(q) > 1.0 + 1e-12:
                continue
            q = max(-1.0, min(1.0, q))
            if abs(A * math.sqrt(1.0 - q * q) - coupling * q - level) <= 1e-9 * scale:
                qs_out.append(q)
                ps_out.append(p)

    has_lines = coupling == 0.0 and level == 0.0
    if has_lines:
        # cos(p - phase) = 0 solves the equation for every q
        q_line = np.linspace(-1.0, 1.0, max(3, n_points // 4))
        for p_line in (wrap_angle(phase + 0.5 * math.pi), wrap_angle(phase + 1.5 * math.pi)):
            qs_out.extend(q_line.tolist())
            ps_out.extend([p_line] * q_line.size)

    order = np.lexsort((np.asarray(qs_out), np.asarray(ps_out)))
    return np.asarray(qs_out)[order], np.asarray(ps_out)[order], has_lines


def rotating_level(params: RotatingFieldParams, initial: CanonicalState) -> float:
    """K at a lab-frame strobe point: 2 B0 sqrt(1 - q²) cos(p - φ) - 2 Ω q"""
    return float(contour_value(params.b0, 2.0 * params.detuning, params.phi, initial.q, initial.p))


def contour_r(params: RotatingFieldParams, initial: CanonicalState, n_points: int = CONTOUR_POINTS) -> ContourCurve:
    level = rotating_level(params, initial)
    coupling = 2.0 * params.detuning
    q, p, has_lines = solve_contour(params.b0, coupling, params.phi, level, n_points)
    if q.size == 0:
        raise EmptyCurveError(f"no real points on the rotating-map level {level!r}")
    return ContourCurve(level, q, p, CurveKind.R_MAP, params.b0, coupling, params.phi, degenerate=has_lines)


def nr_level(params: NonrotatingFieldParams, gamma: float, initial: CanonicalState) -> float:
    """E = 2 B0 sqrt(1 - q²) cos p - 2 (B3 - γ/2) q"""
    return float(contour_value(params.b0, 2.0 * params.b3 - gamma, 0.0, initial.q, initial.p))


def contour_nr(
    params: NonrotatingFieldParams, gamma: float, initial: CanonicalState, n_points: int = CONTOUR_POINTS
) -> ContourCurve:
    level = nr_level(params, gamma, initial)
    coupling = 2.0 * params.b3 - gamma
    q, p, has_lines = solve_contour(params.b0, coupling, 0.0, level, n_points)
    if q.size == 0:
        raise EmptyCurveError(f"no real points on the non-rotating-map level {level!r}")
    return ContourCurve(level, q, p, CurveKind.NR_MAP, params.b0, coupling, 0.0, degenerate=has_lines)


def separatrix_r(
    params: RotatingFieldParams, n_points: int = CONTOUR_POINTS, strict: bool = False
) -> Tuple[ContourCurve, ContourCurve]:
    """
    Contours at K = +2Ω and K = -2Ω, i.e. B0 sqrt(1 - q²) cos(p - φ) = (q ± 1) Ω; they pass
    through q = -1 and q = +1 respectively. At Ω = 0 both collapse onto the lines
    p = φ ± π/2 and come back flagged degenerate (an error with strict=True).
    """
    omega_det = params.detuning
    if params.b0 == 0.0 and omega_det == 0.0:
        raise ZeroFieldError("separatrix needs B0 != 0 or Ω != 0")
    if omega_det == 0.0 and strict:
        raise DegenerateError("at Ω = 0 the separatrix is the pair of lines p = φ + π/2, φ + 3π/2")
    curves = []
    for level in (2.0 * omega_det, -2.0 * omega_det):
        q, p, has_lines = solve_contour(params.b0, 2.0 * omega_det, params.phi, level, n_points)
        curves.append(
            ContourCurve(level, q, p, CurveKind.SEPARATRIX, params.b0, 2.0 * omega_det, params.phi, has_lines)
        )
    return curves[0], curves[1]


# -------------------------------
# Commensurability
# -------------------------------

def continued_fraction_terms(x: Fraction, max_denominator: int) -> List[int]:
    """Partial quotients of x while convergent denominators stay <= max_denominator"""
    terms: List[int] = []
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while True:
        a = math.floor(x)
        h_next, k_next = a * h + h_prev, a * k + k_prev
        if k_next > max_denominator:
            break
        terms.append(int(a))
        h_prev, h, k_prev, k = h, h_next, k, k_next
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return terms


def classify_commensurability(
    params: RotatingFieldParams,
    tol: float = QG_COMMENSURABILITY_TOL,
    max_denominator: int = QG_MAX_DENOMINATOR,
) -> Commensurability:
    """Best rational approximation of B/ω with denominator <= max_denominator"""
    ratio = params.magnitude / params.omega
    exact = Fraction(ratio)
    best = exact.limit_denominator(max_denominator)
    error = abs(ratio - best.numerator / best.denominator)
    return Commensurability(
        ratio=ratio,
        numerator=best.numerator,
        denominator=best.denominator,
        error=error,
        rational=error < tol,
        terms=tuple(continued_fraction_terms(exact, max_denominator)),
    )
