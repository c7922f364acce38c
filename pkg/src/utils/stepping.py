"""
Adaptive DOP853 stepping with dense output at requested grid points
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import DOP853, OdeSolution

from ..config.settings import NORM_BLOWUP, QG_ATOL, QG_MAX_STEP, QG_RTOL
from ..errors import DomainError, IntegrationError, NormBlowupError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = QG_RTOL
    abs_tol: float = QG_ATOL
    max_step: float = QG_MAX_STEP
    renormalize: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise DomainError("integrator tolerances and max_step must be positive")

    def kwargs(self, period: Optional[float] = None) -> dict:
        """Keyword arguments for integrate_dense"""
        return dict(
            rtol=self.rel_tol,
            atol=self.abs_tol,
            max_step=self.max_step,
            renormalize=self.renormalize,
            period=period,
            max_norm_drift=NORM_BLOWUP,
        )


@dataclass
class DenseRun:
    """Samples of one integration run"""

    times: np.ndarray
    ys: np.ndarray
    max_drift: float
    n_steps: int
    solution: Optional[OdeSolution] = None


def _check_grid(t_grid: Sequence[float]) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise DomainError("time grid is empty")
    if not np.all(np.isfinite(t)):
        raise DomainError("time grid must be finite")
    d = np.diff(t)
    if not (np.all(d >= 0) or np.all(d <= 0)):
        raise DomainError("time grid must be sorted")
    return t


def integrate_dense(
    fun: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence,
    t_grid: Sequence[float],
    *,
    rtol: float,
    atol: float,
    max_step: float = math.inf,
    norm_slices: Sequence[slice] = (),
    renormalize: bool = False,
    period: Optional[float] = None,
    max_norm_drift: float = 1e-6,
    collect: bool = False,
    on_step: Optional[Callable[[float, np.ndarray], None]] = None,
) -> DenseRun:
    """
    Integrate y' = fun(t, y) from t_grid[0] and sample the pair's interpolant at every grid point.

    Each slice in norm_slices holds a unit-norm block. After every accepted step the deviation of
    its norm from 1 is measured; with renormalize the block is projected back to unit norm and
    the solver's FSAL derivative is refreshed. Corrections are summed per drive period and a
    NormBlowupError is raised when a period's total exceeds max_norm_drift.
    """
    t = _check_grid(t_grid)
    y_init = np.array(y0)
    dtype = complex if np.iscomplexobj(y_init) else float
    y_init = y_init.astype(dtype)
    ys = np.empty((t.size, y_init.size), dtype=dtype)

    t0, t_end = float(t[0]), float(t[-1])
    idx = 0
    while idx < t.size and t[idx] == t0:
        ys[idx] = y_init
        idx += 1
    if idx == t.size:
        return DenseRun(t, ys, 0.0, 0, _constant_solution(t0, y_init) if collect else None)

    solver = DOP853(fun, t0, y_init, t_end, rtol=rtol, atol=atol, max_step=max_step)
    direction = solver.direction
    interpolants, breaks = [], [t0]
    max_drift = 0.0
    period_drift = 0.0
    period_index = 0
    n_steps = 0

    while idx < t.size:
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"step control failed at t={solver.t!r}: {message}")
        n_steps += 1
        interp = solver.dense_output()
        t_new = solver.t
        while idx < t.size and direction * (t[idx] - t_new) <= 0:
            ys[idx] = interp(t[idx])
            idx += 1
        if collect:
            interpolants.append(interp)
            breaks.append(t_new)

        if norm_slices:
            y = solver.y.copy()
            step_drift = 0.0
            for sl in norm_slices:
                n = float(np.linalg.norm(y[sl]))
                step_drift = max(step_drift, abs(n - 1.0))
                if renormalize and n > 0.0:
                    y[sl] = y[sl] / n
            max_drift = max(max_drift, step_drift)
            if renormalize:
                # corrections accumulate per drive period
                if period is not None:
                    k = int(math.floor(abs(t_new - t0) / period))
                    if k != period_index:
                        period_index, period_drift = k, 0.0
                period_drift += step_drift
                solver.y = y
                solver.f = solver.fun(solver.t, y)
            else:
                period_drift = step_drift
            if period_drift > max_norm_drift:
                raise NormBlowupError(f"norm drift {period_drift:.3e} within one period at t={t_new!r}")

        if on_step is not None:
            on_step(solver.t, solver.y)
        if solver.status == "finished":
            break

    if idx < t.size:
        raise IntegrationError("integration finished before the last grid point")
    logger.debug("DOP853 run: %d steps, max norm drift %.3e", n_steps, max_drift)
    solution = OdeSolution(np.array(breaks), interpolants) if collect else None
    return DenseRun(t, ys, max_drift, n_steps, solution)


def _constant_solution(t0: float, y: np.ndarray):
    return lambda t: np.array(y) if np.ndim(t) == 0 else np.repeat(y[:, None], np.size(t), axis=1)
