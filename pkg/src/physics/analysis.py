"""
Integrability diagnostics of the driven gyromagnet:
Lyapunov estimate, γ-slope fits, potential-weighted averages, Taylor-expansion terms,
high-frequency and strong-coupling predictions, Bessel J0 and the RWA error.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.integrate import IntegrationWarning, quad

from ..config.settings import (
    GAMMA_PERIODS,
    GAMMA_Q_VARIANCE,
    GAMMA_SEED,
    LOCALIZATION_TOL,
    QG_SAMPLES_PER_PERIOD,
    RWA_GRID,
)
from ..errors import DegenerateError, DomainError, PeriodError
from ..utils.data_manager import write_csv
from ..utils.parallel import ordered_map
from ..utils.stepping import IntegratorConfig, integrate_dense
from .core import TWO_PI, BlochVector, CanonicalState, QubitState, bloch_from_canonical
from .dynamics import bloch_rhs, integrate_bloch
from .fields import FieldSpec, NonrotatingFieldParams, field_function
from .qoracle import RwaParams, propagate, rwa_solution, state_distance
from .strobe import StroboscopicMap, stroboscopic_map

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("omega", "gamma_fit", "gamma_pred", "rel_err")
AVERAGE_HEADER = ("k", "f_avg", "flagged")

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-10
DENOMINATOR_GUARD = 1e-12


# -------------------------------
# Result types
# -------------------------------

@dataclass
class LyapunovResult:
    lambda_: float
    times: np.ndarray
    distances: np.ndarray
    delta0: float

    @property
    def ratios(self) -> np.ndarray:
        return self.distances / self.delta0


@dataclass(frozen=True)
class GammaFit:
    """H_k = E - γ q_k fitted over the strobe points of one orbit"""

    gamma: float
    intercept: float
    max_residual: float
    n_points: int


@dataclass(frozen=True)
class GammaSweepRow:
    omega: float
    gamma_fit: float
    gamma_pred: float
    rel_err: float


@dataclass
class AverageSeries:
    k: np.ndarray
    f_avg: np.ndarray
    flagged: np.ndarray
    aggregate: float
    series_mean: float
    n_flagged: int
    t_max: float
    period: float
    drive: str = "cos"

    def rows(self):
        for k, value, flag in zip(self.k, self.f_avg, self.flagged):
            yield (int(k), float(value), bool(flag))

    def to_csv(self, path: Optional[str] = None):
        write_csv(AVERAGE_HEADER, self.rows(), path)


@dataclass(frozen=True)
class ExpansionTerms:
    omega: float
    A: Tuple[float, ...]
    B: Tuple[float, ...]


@dataclass(frozen=True)
class StrongCouplingResult:
    omega0: float
    bessel_argument: float
    j0: float
    localized: bool
    validity: float

    def mean_level(self, initial: CanonicalState) -> float:
        return mean_map_level(self.omega0, initial)


@dataclass(frozen=True)
class RwaErrorResult:
    max_error: float
    window: float
    resonant: bool
    n_grid: int = RWA_GRID
    errors: Tuple[float, ...] = field(default=(), repr=False)


# -------------------------------
# Lyapunov estimate
# -------------------------------

def _transverse_unit(s: np.ndarray) -> np.ndarray:
    axis = np.array([0.0, 0.0, 1.0]) if abs(s[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e = np.cross(s, axis)
    return e / np.linalg.norm(e)


def lyapunov_estimate(
    spec: FieldSpec,
    S0: BlochVector,
    delta0: float = 1e-8,
    n_periods: int = 1000,
    cfg: Optional[IntegratorConfig] = None,
) -> LyapunovResult:
    """
    λ = ln(D(t)/D(0)) / t at t = n_periods T.

    dS/dt = S x B is linear in S, so the separation d = S' - S of two neighbours obeys the same
    equation. It is integrated alongside S as d / delta0, keeping both blocks at unit scale.
    """
    if not 0.0 < delta0 <= 1e-6:
        raise DomainError(f"delta0 must lie in (0, 1e-6], got {delta0!r}")
    if not spec.is_periodic:
        raise PeriodError("Lyapunov estimate is sampled at drive periods")
    if n_periods < 1:
        raise DomainError("n_periods must be at least 1")
    cfg = cfg or IntegratorConfig()
    single = bloch_rhs(spec)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate((single(t, y[:3]), single(t, y[3:])))

    s0 = S0.as_array()
    y0 = np.concatenate((s0, _transverse_unit(s0)))
    times = np.arange(n_periods + 1) * spec.params.period
    # only the S block is projected; the scaled separation must keep its own norm
    run = integrate_dense(rhs, y0, times, norm_slices=(slice(0, 3),), **cfg.kwargs(spec.params.period))
    distances = delta0 * np.linalg.norm(run.ys[:, 3:], axis=1)
    lam = math.log(distances[-1] / delta0) / times[-1]
    logger.info("Lyapunov estimate over %d periods: %.3e", n_periods, lam)
    return LyapunovResult(lam, times, distances, delta0)


# -------------------------------
# γ fits
# -------------------------------

def fit_gamma(strobe_map: StroboscopicMap, ic_index: int = 0) -> GammaFit:
    """Ordinary least squares of H_k against q_k; γ = -slope, E = intercept"""
    orbit = strobe_map.orbits[ic_index]
    q, H = np.asarray(orbit.q), np.asarray(orbit.H)
    if q.size < 3 or float(np.var(q)) <= GAMMA_Q_VARIANCE:
        raise DegenerateError("q_k does not vary along this orbit (fixed point); no slope to fit")
    reg = stats.linregress(q, H)
    residual = float(np.max(np.abs(H - (reg.slope * q + reg.intercept))))
    return GammaFit(-float(reg.slope), float(reg.intercept), residual, int(q.size))


def fit_gamma_for(
    spec: Union[FieldSpec, NonrotatingFieldParams],
    initial: CanonicalState = CanonicalState(*GAMMA_SEED),
    n_periods: int = GAMMA_PERIODS,
    cfg: Optional[IntegratorConfig] = None,
) -> GammaFit:
    if isinstance(spec, NonrotatingFieldParams):
        spec = FieldSpec.nonrotating(spec.b0, spec.b3, spec.omega)
    return fit_gamma(stroboscopic_map(spec, [initial], n_periods, cfg, jobs=1), 0)


def high_freq_average(params: NonrotatingFieldParams, transverse_only: bool = False) -> float:
    """
    ⟨f⟩ ≈ -4 (B0² + B3²) / ω². A rotation about z leaves q unchanged, and the per-period
    averages measured along trajectories follow the transverse part -4 B0² / ω² alone
    (transverse_only=True).
    """
    longitudinal = 0.0 if transverse_only else params.b3**2
    return -4.0 * (params.b0**2 + longitudinal) / params.omega**2


def gamma_prediction(params: NonrotatingFieldParams, transverse_only: bool = False) -> float:
    """γ = 2 B3 (1 - ⟨f⟩)"""
    return 2.0 * params.b3 * (1.0 - high_freq_average(params, transverse_only))


def _sweep_row(b0, b3, initial, n_periods, cfg, transverse_only, omega) -> GammaSweepRow:
    params = NonrotatingFieldParams(b0, b3, omega)
    fit = fit_gamma_for(params, initial, n_periods, cfg)
    pred = gamma_prediction(params, transverse_only)
    return GammaSweepRow(omega, fit.gamma, pred, abs(fit.gamma - pred) / abs(fit.gamma))


def gamma_sweep(
    b0: float,
    b3: float,
    omegas: Sequence[float],
    initial: CanonicalState = CanonicalState(*GAMMA_SEED),
    n_periods: int = GAMMA_PERIODS,
    cfg: Optional[IntegratorConfig] = None,
    jobs: Optional[int] = None,
    transverse_only: bool = False,
) -> List[GammaSweepRow]:
    """Fitted against predicted γ for every ω"""
    worker = partial(_sweep_row, b0, b3, initial, n_periods, cfg or IntegratorConfig(), transverse_only)
    rows = ordered_map(worker, [float(w) for w in omegas], jobs)
    logger.info("γ sweep over %d frequencies", len(rows))
    return rows


def write_sweep_csv(rows: Sequence[GammaSweepRow], path: Optional[str] = None):
    write_csv(SWEEP_HEADER, ((r.omega, r.gamma_fit, r.gamma_pred, r.rel_err) for r in rows), path)


# -------------------------------
# Potential-weighted averages
# -------------------------------

def _drive_function(drive: Union[str, Callable[[float], float]], omega: float) -> Tuple[Callable, str]:
    if callable(drive):
        return drive, getattr(drive, "__name__", "custom")
    if drive == "cos":
        return (lambda t: math.cos(omega * t)), "cos"
    if drive == "sin":
        return (lambda t: math.sin(omega * t)), "sin"
    raise DomainError(f"unknown drive {drive!r}; use 'cos', 'sin' or a callable")


def _integral(fn: Callable[[float], float], a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(fn, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    return value


def weighted_average_series(
    params: NonrotatingFieldParams,
    initial: CanonicalState,
    n_periods: int = 20,
    cfg: Optional[IntegratorConfig] = None,
    *,
    t_max: Optional[float] = None,
    drive: Union[str, Callable[[float], float]] = "cos",
) -> AverageSeries:
    """
    ⟨f⟩_{k+1,k} = ∫ f dV / ∫ dV over each period [t_k, t_{k+1}], with V = -2 B3 q the
    driven part of the Hamiltonian, so dV/dt = 2 B3 (S x B)_3. The aggregate uses the same
    ratio over [0, t_max]. Periods whose ∫dV is below 1e-12 max|dV/dt| T are flagged.
    """
    if n_periods < 1:
        raise DomainError("n_periods must be at least 1")
    spec = FieldSpec.nonrotating(params.b0, params.b3, params.omega)
    T = params.period
    t_max = n_periods * T if t_max is None else float(t_max)
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    f, drive_name = _drive_function(drive, params.omega)

    t_end = max(t_max, n_periods * T)
    n_samples = int(math.ceil(t_end / T)) * QG_SAMPLES_PER_PERIOD
    grid = np.unique(np.concatenate((np.linspace(0.0, t_end, n_samples + 1), [t_max])))
    traj = integrate_bloch(spec, bloch_from_canonical(initial), grid, cfg, collect=True)
    field_of = field_function(spec)
    sol = traj.solution

    def v_dot(t: float) -> float:
        s = sol(t)
        b = field_of(t)
        return 2.0 * params.b3 * (s[0] * b[1] - s[1] * b[0])

    sampled = np.array([v_dot(float(t)) for t in grid])
    eps = DENOMINATOR_GUARD * float(np.max(np.abs(sampled))) * T

    ks = np.arange(n_periods)
    values = np.full(n_periods, np.nan)
    flagged = np.zeros(n_periods, dtype=bool)
    for k in ks:
        a, b = k * T, (k + 1) * T
        den = _integral(v_dot, a, b)
        if abs(den) <= eps:
            flagged[k] = True
            continue
        values[k] = _integral(lambda t: f(t) * v_dot(t), a, b) / den

    den = _integral(v_dot, 0.0, t_max)
    aggregate = _integral(lambda t: f(t) * v_dot(t), 0.0, t_max) / den if abs(den) > eps else math.nan
    kept = values[~flagged]
    series_mean = float(np.mean(kept)) if kept.size else math.nan
    if flagged.any():
        logger.warning("%d of %d periods have a vanishing ∫dV and were excluded", flagged.sum(), n_periods)
    return AverageSeries(ks, values, flagged, aggregate, series_mean, int(flagged.sum()), t_max, T, drive_name)


# -------------------------------
# Taylor-expansion terms
# -------------------------------

def _poly_add(a: List[int], b: List[int]) -> List[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return out


def _cos_moment_polys(n_max: int) -> List[List[int]]:
    """
    Integer coefficients in x = 2π of C_n = ∫_0^{2π} φ^n cos φ dφ, from
    C_n = -n S_{n-1} and S_m = ∫ φ^m sin φ dφ = -x^m + [m = 0] + m C_{m-1}
    """
    C: List[List[int]] = [[0]]
    S: List[List[int]] = []
    for m in range(n_max):
        s = [0] * m + [-1]
        if m == 0:
            s = _poly_add(s, [1])
        else:
            s = _poly_add(s, [m * c for c in C[m - 1]])
        S.append(s)
        C.append([-(m + 1) * c for c in s])
    return C[: n_max + 1]


def expansion_terms(omega: float, n_max: int = 10) -> ExpansionTerms:
    """A_n = ω^-(n+1) ∫_0^{2π} cos φ φ^n dφ in closed form, B_n = (2π/ω)^(n+1) / (n+1)"""
    if not omega > 0:
        raise DomainError("omega must be positive")
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    A = tuple(
        math.fsum(c * TWO_PI**i for i, c in enumerate(poly)) / omega ** (n + 1)
        for n, poly in enumerate(_cos_moment_polys(n_max))
    )
    B = tuple((TWO_PI / omega) ** (n + 1) / (n + 1) for n in range(n_max + 1))
    return ExpansionTerms(omega, A, B)


def truncated_average(derivatives: Sequence[float], omega: float) -> float:
    """
    Taylor estimate of ⟨f⟩_{k+1,k} for f = cos ωt from V^(n+1)(t_k), n = 0..N:
    Σ V^(n+1) A_n / n!  over  Σ V^(n+1) B_n / n!
    """
    if len(derivatives) == 0:
        raise DomainError("need at least one derivative")
    terms = expansion_terms(omega, len(derivatives) - 1)
    num = math.fsum(d * a / math.factorial(n) for n, (d, a) in enumerate(zip(derivatives, terms.A)))
    den = math.fsum(d * b / math.factorial(n) for n, (d, b) in enumerate(zip(derivatives, terms.B)))
    if den == 0.0:
        raise DegenerateError("V is stationary to this order")
    return num / den


# -------------------------------
# Bessel J0 and strong coupling
# -------------------------------

def _j0_series_float(x: float) -> float:
    y = -0.25 * x * x
    term, total, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= y / (k * k)
        total += term
        if abs(term) < 1e-17 * max(1.0, abs(total)) and k > 2:
            return total


def _j0_series_exact(x: float) -> float:
    y = -Fraction(x) ** 2 / 4
    term, total, k = Fraction(1), Fraction(1), 0
    while True:
        k += 1
        term = term * y / (k * k)
        total += term
        if k > abs(x) and abs(term) < Fraction(1, 10**20):
            return float(total)


def _j0_hankel(x: float) -> float:
    """sqrt(2/(πx)) (P cos χ - Q sin χ), χ = x - π/4, summed to the smallest term"""
    P, Q = 0.0, 0.0
    b, k = 1.0, 0
    power = 1.0
    prev = math.inf
    while True:
        term = b / power
        if term >= prev or term < 1e-18:
            break
        prev = term
        j = k // 2
        if k % 2 == 0:
            P += (-1) ** j * term
        else:
            Q += (-1) ** (j + 1) * term
        k += 1
        b *= (2 * k - 1) ** 2 / (8.0 * k)
        power *= x
    chi = x - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (P * math.cos(chi) - Q * math.sin(chi))


def bessel_j0(x: float) -> float:
    """
    J0(x) with absolute error below 1e-12: float power series for |x| <= 8, exact
    rational power series for 8 < |x| <= 25, Hankel asymptotic expansion beyond
    """
    if not math.isfinite(x):
        raise DomainError("J0 needs a finite argument")
    x = abs(float(x))
    if x <= 8.0:
        return _j0_series_float(x)
    if x <= 25.0:
        return _j0_series_exact(x)
    return _j0_hankel(x)


def mean_map_level(omega0: float, initial: CanonicalState) -> float:
    """K_m = 2 ω0 sqrt(1 - q0²) cos p0"""
    return 2.0 * omega0 * math.sqrt(max(0.0, 1.0 - initial.q**2)) * math.cos(initial.p)


def strong_coupling(params: NonrotatingFieldParams) -> StrongCouplingResult:
    """ω0 = B0 J0(2B3/ω); validity B0 T << 1 is reported, not enforced"""
    arg = 2.0 * params.b3 / params.omega
    j0 = bessel_j0(arg)
    return StrongCouplingResult(
        omega0=params.b0 * j0,
        bessel_argument=arg,
        j0=j0,
        localized=abs(j0) < LOCALIZATION_TOL,
        validity=params.b0 * params.period,
    )


def localization_check(
    params: NonrotatingFieldParams,
    initial: CanonicalState,
    t_max: Optional[float] = None,
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """max_k |q_k - q0| over the strobes in [0, t_max]; t_max defaults to 1/B0"""
    if t_max is None:
        if params.b0 <= 0:
            raise DomainError("default window 1/B0 needs B0 > 0")
        t_max = 1.0 / params.b0
    n_periods = max(1, int(math.floor(t_max / params.period)))
    spec = FieldSpec.nonrotating(params.b0, params.b3, params.omega)
    orbit = stroboscopic_map(spec, [initial], n_periods, cfg, jobs=1).orbits[0]
    return float(np.max(np.abs(orbit.q - initial.q)))


# -------------------------------
# RWA error
# -------------------------------

def rwa_window(params: RwaParams) -> float:
    """[0, ω/B3]; ten drive periods when B3 = 0"""
    if params.b3 == 0.0:
        return 10.0 * TWO_PI / params.omega
    return params.omega / abs(params.b3)


def rwa_error(
    params: RwaParams,
    psi0: QubitState,
    n_grid: int = RWA_GRID,
    cfg: Optional[IntegratorConfig] = None,
) -> RwaErrorResult:
    """max ||psi_NR(t) - psi_RWA(t)|| on an n_grid-point grid over the RWA window"""
    if n_grid < 2:
        raise DomainError("n_grid must be at least 2")
    window = rwa_window(params)
    times = np.linspace(0.0, window, n_grid)
    spec = FieldSpec.nonrotating(params.b0, params.b3, params.omega)
    exact = propagate(spec, psi0, times, cfg)
    errors = tuple(state_distance(a, rwa_solution(params, psi0, float(t))) for a, t in zip(exact, times))
    if not params.resonant:
        logger.info("RWA error requested off resonance (ω=%g, 2B0=%g)", params.omega, 2.0 * params.b0)
    return RwaErrorResult(max(errors), window, params.resonant, n_grid, errors)
