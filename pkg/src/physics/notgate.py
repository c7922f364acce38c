"""
NOT-operation regimes: closed-form prediction and verification for the rotating field,
numerical detection for any field, and the γ-resonance search for the non-rotating field.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..config.settings import (
    GAMMA_PERIODS,
    GAMMA_SEED,
    NOT_TOL_EXACT,
    NOT_TIE_TOL,
    NOT_TOL_NUMERIC,
    NR_DETECTION_PERIODS,
    QG_INT_MAX,
    QG_SAMPLES_PER_PERIOD,
    REGIME_TOL,
    RESONANCE_GTOL,
    RESONANCE_MAX_ITER,
)
from ..errors import DomainError, NoBracketError
from ..utils.data_manager import write_csv
from ..utils.stepping import IntegratorConfig
from .analysis import fit_gamma_for
from .core import TWO_PI, CanonicalState, bloch_from_canonical
from .dynamics import integrate_bloch, sample_grid
from .exact import exact_overlap_r
from .fields import FieldSpec, FieldVariant, NonrotatingFieldParams, RotatingFieldParams, field_function

logger = logging.getLogger(__name__)

DETECTION_HEADER = ("t", "overlap")

CLASS_LABELS = {
    1: "equator q0=0, any p0",
    2: "p0=l*pi, any q0; or poles",
    3: "p0=(2l+3)*pi/4, any q0",
    4: "p0=(l+1/2)*pi, any q0",
}


@dataclass(frozen=True)
class NotRegime:
    """One matched NOT case; t_not = (a n + b) π / ω"""

    case_id: int
    omega: float
    constraints: Dict[str, object]
    m: Optional[int] = None

    @property
    def initial_class(self) -> str:
        return CLASS_LABELS[self.case_id]

    def epsilon(self, l: int) -> int:
        return 1 if l % 2 == 0 else 3

    def coefficients(self, l: int = 0) -> Tuple[float, float]:
        """(a, b) with t_not = (a n + b) π / ω"""
        if self.case_id in (1, 2):
            return 2.0, 1.0
        if self.case_id == 3:
            return 2.0, 0.5 * self.epsilon(l)
        return 4.0 * self.m, 2.0 * self.m

    def t_not(self, n: int = 0, l: int = 0) -> float:
        if n < 0:
            raise DomainError("n must be non-negative")
        a, b = self.coefficients(l)
        return (a * n + b) * math.pi / self.omega

    def class_member(self, q: float, l: int = 0, p: float = 0.0) -> CanonicalState:
        """Initial condition of the universality class; p is only free for Case 1"""
        if self.case_id == 1:
            return CanonicalState(0.0, p)
        if self.case_id == 2:
            return CanonicalState(q, l * math.pi)
        if self.case_id == 3:
            return CanonicalState(q, (2 * l + 3) * math.pi / 4.0)
        return CanonicalState(q, (l + 0.5) * math.pi)


@dataclass
class NotDetection:
    """Deepest refined minimum of S(t).S(0); first_hit is the earliest minimum within tol of -1"""

    t_star: float
    min_overlap: float
    achieved: bool
    times: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    overlaps: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    first_hit: Optional[float] = None

    def to_csv(self, path: Optional[str] = None):
        write_csv(DETECTION_HEADER, zip(self.times.tolist(), self.overlaps.tolist()), path)


@dataclass(frozen=True)
class ResonanceResult:
    b0_star: float
    gamma_star: float
    g: float
    iterations: int
    converged: bool


# -------------------------------
# Closed-form regimes
# -------------------------------

def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REGIME_TOL * max(1.0, abs(a), abs(b))


def _integer_in(x: float, lo: int, hi: int) -> Optional[int]:
    n = round(x)
    if lo <= n <= hi and abs(x - n) <= REGIME_TOL * max(1.0, abs(x)):
        return int(n)
    return None


def predict_regimes(params: RotatingFieldParams, int_max: int = QG_INT_MAX) -> List[NotRegime]:
    """Every Case 1-4 relation that (B0, B3, ω) satisfies, integers m searched in [0, int_max]"""
    w, b0, b3 = params.omega, params.b0, params.b3
    found: List[NotRegime] = []
    if _close(w * w, b0 * b0 + params.detuning**2):
        found.append(NotRegime(1, w, {"relation": "omega^2 = b0^2 + (b3 - omega/2)^2"}))
    if _close(b3, 0.5 * w):
        m = _integer_in((2.0 * b0 / w - 1.0) / 2.0, 0, int_max)
        if m is not None:
            found.append(NotRegime(2, w, {"b3": "omega/2", "b0": "(2m+1) omega/2", "m": m}, m))
        if _close(b0, w):
            found.append(NotRegime(3, w, {"b3": "omega/2", "b0": "omega"}))
        if b0 > 0:
            m = _integer_in(w / (4.0 * b0), 1, int_max)
            if m is not None:
                found.append(NotRegime(4, w, {"b3": "omega/2", "b0": "omega/(4m)", "m": m}, m))
    logger.debug("NOT regimes for %s: %s", params, [r.case_id for r in found])
    return found


def overlap_expression(case_id: int, initial: CanonicalState, l: int = 0, printed_sign: bool = False) -> float:
    """
    S(t_not).S(0) in closed form for each case. Case 1 is 2q0² - 1; printed_sign=True gives
    the historical 1 - 2q0² form, which is +1 on its own equatorial class.
    """
    q2 = initial.q * initial.q
    p = initial.p
    if case_id == 1:
        return 1.0 - 2.0 * q2 if printed_sign else 2.0 * q2 - 1.0
    if case_id == 2:
        return -q2 + (q2 - 1.0) * math.cos(2.0 * p)
    if case_id == 3:
        return -q2 + (-1.0) ** (l + 1) * (q2 - 1.0) * math.sin(2.0 * p)
    if case_id == 4:
        return -q2 + (1.0 - q2) * math.cos(2.0 * p)
    raise DomainError(f"case_id must be 1..4, got {case_id!r}")


def verify_regime(
    params: RotatingFieldParams,
    regime: NotRegime,
    n: int = 0,
    l: int = 0,
    n_samples: int = 50,
    seed: int = 0,
    tol: float = NOT_TOL_EXACT,
) -> bool:
    """exact_overlap_r at t_not is -1 (within tol) for n_samples random class members"""
    rng = np.random.default_rng(seed)
    t = regime.t_not(n, l)
    members = [regime.class_member(float(q), l, float(p)) for q, p in zip(
        rng.uniform(-1.0, 1.0, n_samples), rng.uniform(0.0, TWO_PI, n_samples)
    )]
    if regime.case_id == 2:
        members += [CanonicalState(1.0, 0.0), CanonicalState(-1.0, 0.0)]
    return all(exact_overlap_r(params, ic, t) <= -1.0 + tol for ic in members)


def regime_report(regime: NotRegime, verified: Optional[bool] = None, l: int = 0) -> dict:
    a, b = regime.coefficients(l)
    return {
        "case": regime.case_id,
        "constraints": regime.constraints,
        "t_not_formula": {"n": a, "constant": b, "unit": "pi/omega", "l": l},
        "class": regime.initial_class,
        "verified": verified,
    }


# -------------------------------
# Numerical detection
# -------------------------------

def natural_period(spec: FieldSpec) -> Optional[float]:
    """Drive period, or the precession period 2π/|B| of a static field (None at B = 0)"""
    if spec.is_periodic:
        return spec.params.period
    b = float(np.linalg.norm(field_function(spec)(0.0)))
    return TWO_PI / b if b > 0 else None


def default_detection_window(spec: FieldSpec) -> float:
    """
    NR-type fields with B0 > 0: 1.25 mean-field NOT times, and at least NR_DETECTION_PERIODS
    drive periods for the periodic drive. Other fields: two periods.
    """
    period = natural_period(spec)
    if spec.variant in (FieldVariant.NONROTATING, FieldVariant.MEAN_OF_NR) and spec.params.b0 > 0:
        window = 1.25 * mean_not_time(spec.params.b0)
        return max(NR_DETECTION_PERIODS * period, window) if spec.is_periodic else window
    return 2.0 * period if period is not None else 1.0


def _refine(overlap, slope, a: float, b: float, c: float) -> Tuple[float, float]:
    try:
        res = minimize_scalar(overlap, bracket=(a, b, c), method="golden")
        if not a <= res.x <= c:
            raise ValueError("minimum left the bracket")
    except (ValueError, RuntimeError):
        res = minimize_scalar(overlap, bounds=(a, c), method="bounded")
    t_best, o_best = float(res.x), float(res.fun)
    ga, gc = slope(a), slope(c)
    if ga < 0.0 < gc:
        t_root = brentq(slope, a, c, xtol=1e-14, rtol=8.9e-16)
        o_root = overlap(t_root)
        if o_root <= o_best:
            t_best, o_best = t_root, o_root
    return t_best, o_best


def detect_not(
    spec: FieldSpec,
    initial: CanonicalState,
    t_max: Optional[float] = None,
    tol: float = NOT_TOL_NUMERIC,
    cfg: Optional[IntegratorConfig] = None,
    samples_per_period: int = QG_SAMPLES_PER_PERIOD,
) -> NotDetection:
    """
    Track S(t).S(0) on a grid of at least samples_per_period points per period, refine every
    local minimum with golden-section search and a root of d/dt S.S0 = (S x B).S0, and report
    the deepest minimum together with the earliest one within tol of -1.
    """
    t_max = default_detection_window(spec) if t_max is None else float(t_max)
    if not t_max > 0:
        raise DomainError("t_max must be positive")
    if not 0.0 < tol <= 0.1:
        raise DomainError("tol must lie in (0, 0.1]")
    period = natural_period(spec) or t_max
    n = max(samples_per_period, int(math.ceil(samples_per_period * t_max / period)))
    grid = sample_grid(t_max, n)
    s0 = bloch_from_canonical(initial).as_array()
    traj = integrate_bloch(spec, bloch_from_canonical(initial), grid, cfg, collect=True)
    overlaps = np.clip(traj.states @ s0, -1.0, 1.0)
    sol = traj.solution
    field_of = field_function(spec)

    def overlap(t: float) -> float:
        return float(np.dot(sol(t), s0))

    def slope(t: float) -> float:
        return float(np.dot(np.cross(sol(t), field_of(t)), s0))

    candidates: List[Tuple[float, float]] = []
    for i in range(1, grid.size - 1):
        if overlaps[i] < overlaps[i - 1] and overlaps[i] <= overlaps[i + 1]:
            candidates.append(_refine(overlap, slope, grid[i - 1], grid[i], grid[i + 1]))
    i_min = int(np.argmin(overlaps))
    if i_min in (0, grid.size - 1) or not candidates:
        # interior minima are already refined
        candidates.append((float(grid[i_min]), float(overlaps[i_min])))

    hits = sorted(c for c in candidates if c[1] <= -1.0 + tol)
    o_star = min(c[1] for c in candidates)
    # equally deep minima resolve to the earliest
    t_star = min(c[0] for c in candidates if c[1] <= o_star + NOT_TIE_TOL)
    o_star = max(-1.0, min(1.0, o_star))
    first_hit = hits[0][0] if hits else None
    logger.info("NOT detection: min overlap %.10f at t=%.10f", o_star, t_star)
    return NotDetection(t_star, o_star, o_star <= -1.0 + tol, grid, overlaps, first_hit)


# -------------------------------
# Non-rotating resonance
# -------------------------------

def default_gamma_of(
    omega: float,
    b3: float,
    n_periods: int = GAMMA_PERIODS,
    seed: Sequence[float] = GAMMA_SEED,
    cfg: Optional[IntegratorConfig] = None,
) -> Callable[[float], float]:
    """γ(B0) by fit_gamma on a strobe run from a fixed seed initial condition"""
    initial = CanonicalState(*seed)

    def gamma_of(b0: float) -> float:
        return fit_gamma_for(NonrotatingFieldParams(b0, b3, omega), initial, n_periods, cfg).gamma

    return gamma_of


def resonance_residual(gamma: float, b0: float, b3: float) -> float:
    """g = γ² - B0² - (B3 - γ/2)²"""
    return gamma * gamma - b0 * b0 - (b3 - 0.5 * gamma) ** 2


def nr_resonance_search(
    omega: float,
    b3: float,
    b0_range: Tuple[float, float],
    gamma_of: Optional[Callable[[float], float]] = None,
    *,
    n_periods: int = GAMMA_PERIODS,
    cfg: Optional[IntegratorConfig] = None,
    gtol: float = RESONANCE_GTOL,
    max_iter: int = RESONANCE_MAX_ITER,
) -> ResonanceResult:
    """Bisection on g(B0) until |g| < gtol ω²"""
    if not omega > 0:
        raise DomainError("omega must be positive")
    lo, hi = sorted(float(x) for x in b0_range)
    gamma_of = gamma_of or default_gamma_of(omega, b3, n_periods, GAMMA_SEED, cfg)

    def g_at(b0: float) -> Tuple[float, float]:
        gamma = gamma_of(b0)
        return resonance_residual(gamma, b0, b3), gamma

    g_lo, gamma_lo = g_at(lo)
    g_hi, gamma_hi = g_at(hi)
    target = gtol * omega * omega
    if abs(g_lo) < target:
        return ResonanceResult(lo, gamma_lo, g_lo, 0, True)
    if abs(g_hi) < target:
        return ResonanceResult(hi, gamma_hi, g_hi, 0, True)
    if g_lo * g_hi > 0:
        raise NoBracketError(f"g has no sign change on [{lo!r}, {hi!r}] (g={g_lo:.6g}, {g_hi:.6g})")

    mid, g_mid, gamma_mid = lo, g_lo, gamma_lo
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        g_mid, gamma_mid = g_at(mid)
        logger.debug("bisection %d: B0=%.12f g=%.3e", it, mid, g_mid)
        if abs(g_mid) < target:
            return ResonanceResult(mid, gamma_mid, g_mid, it, True)
        if g_lo * g_mid < 0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    logger.warning("resonance search stopped after %d iterations with |g|=%.3e", max_iter, abs(g_mid))
    return ResonanceResult(mid, gamma_mid, g_mid, max_iter, False)


def mean_not_time(b0: float) -> float:
    """π / |B̄| with B̄ = (-2B0, 0, 0)"""
    if not b0 > 0:
        raise DomainError("mean-field NOT time needs b0 > 0")
    return math.pi / (2.0 * b0)
