"""
Numerical integration of dS/dt = S x B(t) for any FieldSpec
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import OdeSolution

from ..config.settings import POLE_GUARD
from ..errors import DomainError, SingularityError
from ..utils.data_manager import write_csv
from ..utils.stepping import IntegratorConfig, integrate_dense
from . import qoracle
from .core import (
    BlochVector,
    CanonicalState,
    bloch_from_canonical,
    bloch_from_qubit,
    canonical_from_bloch,
    qubit_from_canonical,
)
from .fields import FieldSpec, field_function

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("t", "s1", "s2", "s3", "q", "p", "H")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)
    solution: Optional[OdeSolution] = None

    def __len__(self) -> int:
        return int(self.times.size)

    @cached_property
    def canonical(self) -> List[CanonicalState]:
        return [canonical_from_bloch(self.bloch(i)) for i in range(len(self))]

    @property
    def q(self) -> np.ndarray:
        return -self.states[:, 2]

    @property
    def p(self) -> np.ndarray:
        return np.array([c.p for c in self.canonical])

    def bloch(self, i: int) -> BlochVector:
        return BlochVector.from_array(self.states[i], normalize=True)

    def rows(self):
        for i, c in enumerate(self.canonical):
            s = self.states[i]
            yield (float(self.times[i]), float(s[0]), float(s[1]), float(s[2]), c.q, c.p, float(self.energies[i]))

    def to_csv(self, path: Optional[str] = None):
        write_csv(TRAJECTORY_HEADER, self.rows(), path)


def bloch_rhs(spec: FieldSpec):
    field_of = field_function(spec)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        b1, b2, b3 = field_of(t)
        return np.array([y[1] * b3 - y[2] * b2, y[2] * b1 - y[0] * b3, y[0] * b2 - y[1] * b1])

    return rhs


def energies_along(spec: FieldSpec, times: np.ndarray, states: np.ndarray) -> np.ndarray:
    field_of = field_function(spec)
    fields = np.array([field_of(float(t)) for t in times]).reshape(-1, 3)
    return -np.sum(fields * states, axis=1)


def _period_or_none(spec: FieldSpec) -> Optional[float]:
    return spec.params.period if spec.is_periodic else None


def integrate_bloch(
    spec: FieldSpec,
    S0: BlochVector,
    t_grid: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    *,
    collect: bool = False,
) -> Trajectory:
    """Solve dS/dt = S x B(t) with DOP853 and sample exactly at t_grid (ascending or descending)"""
    cfg = cfg or IntegratorConfig()
    run = integrate_dense(
        bloch_rhs(spec),
        S0.as_array(),
        t_grid,
        norm_slices=(slice(0, 3),),
        collect=collect,
        **cfg.kwargs(_period_or_none(spec)),
    )
    meta = {
        "field": spec.to_dict(),
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "renormalize": cfg.renormalize,
        "max_norm_drift": run.max_drift,
        "n_steps": run.n_steps,
    }
    logger.debug("integrate_bloch: %d samples, %d steps", run.times.size, run.n_steps)
    return Trajectory(run.times, run.ys, energies_along(spec, run.times, run.ys), meta, run.solution)


def integrate_canonical(
    spec: FieldSpec,
    initial: CanonicalState,
    t_grid: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
) -> Trajectory:
    """
    Integrate the Hamilton equations in the (q, p) chart:
      dq/dt = [B1 sin p - B2 cos p] sqrt(1 - q²)
      dp/dt = -[B1 cos p + B2 sin p] q / sqrt(1 - q²) - B3
    The chart is singular at the poles, so |q| must stay below 1 - 1e-6.
    """
    if abs(initial.q) >= 1.0 - POLE_GUARD:
        raise DomainError("canonical integration needs |q0| < 1 (poles are chart singularities)")
    cfg = cfg or IntegratorConfig()
    field_of = field_function(spec)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        b1, b2, b3 = field_of(t)
        q, p = y[0], y[1]
        root = math.sqrt(max(1.0 - q * q, 1e-300))
        cp, sp = math.cos(p), math.sin(p)
        return np.array([(b1 * sp - b2 * cp) * root, -(b1 * cp + b2 * sp) * q / root - b3])

    def guard(t: float, y: np.ndarray):
        if abs(y[0]) > 1.0 - POLE_GUARD:
            raise SingularityError(f"canonical chart reached a pole at t={t!r} (q={y[0]!r})")

    run = integrate_dense(
        rhs,
        np.array([initial.q, initial.p]),
        t_grid,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        on_step=guard,
    )
    states = np.array([bloch_from_canonical(CanonicalState(q, p)).as_array() for q, p in run.ys]).reshape(-1, 3)
    meta = {"field": spec.to_dict(), "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol, "chart": "canonical"}
    traj = Trajectory(run.times, states, energies_along(spec, run.times, states), meta)
    # unwrapped momentum kept for drift checks
    traj.meta["p_unwrapped"] = run.ys[:, 1].copy()
    return traj


def quantum_consistency(
    spec: FieldSpec,
    initial: CanonicalState,
    t_grid: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """max_t ||S_classical(t) - S_quantum(t)|| over t_grid"""
    classical = integrate_bloch(spec, bloch_from_canonical(initial), t_grid, cfg)
    quantum = qoracle.propagate(spec, qubit_from_canonical(initial), t_grid, cfg)
    deviations = [
        float(np.linalg.norm(classical.states[i] - bloch_from_qubit(psi).as_array()))
        for i, psi in enumerate(quantum)
    ]
    return max(deviations) if deviations else 0.0


def sample_grid(t_max: float, n_samples: int, t0: float = 0.0) -> np.ndarray:
    """Uniform grid of n_samples + 1 points on [t0, t_max]"""
    if n_samples < 1:
        raise DomainError("need at least one sample interval")
    return t0 + (t_max - t0) * np.arange(n_samples + 1) / n_samples
