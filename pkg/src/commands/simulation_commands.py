"""
Simulation commands: simulate, strobe, contour, commensurability
"""
import argparse
import math

from ..config.settings import CONTOUR_POINTS, QG_COMMENSURABILITY_TOL, QG_MAX_DENOMINATOR, QG_SAMPLES_PER_PERIOD
from ..errors import InputError
from ..physics.analysis import fit_gamma_for
from ..physics.core import CanonicalState, bloch_from_canonical
from ..physics.dynamics import integrate_bloch, integrate_canonical, sample_grid
from ..physics.fields import FieldVariant
from ..physics.notgate import natural_period
from ..physics.strobe import (
    CONTOUR_HEADER,
    classify_commensurability,
    contour_nr,
    contour_r,
    distinct_points,
    orbit_closure,
    separatrix_r,
    stroboscopic_map,
)
from ..utils.data_manager import write_csv
from .common import (
    add_field_args,
    add_ic_args,
    emit,
    field_spec,
    initial_state,
    integrator,
    new_command,
    window,
)


def register_simulation_commands(subparsers):
    """Register simulate, strobe, contour and commensurability"""

    sub = new_command(subparsers, "simulate", cmd_simulate, "Integrate one trajectory and write t,s1,s2,s3,q,p,H")
    add_field_args(sub)
    add_ic_args(sub)
    sub.add_argument("--periods", type=float, default=10.0)
    sub.add_argument("--t-max", type=float, default=None)
    sub.add_argument("--samples", type=int, default=QG_SAMPLES_PER_PERIOD, help="Samples per period")
    sub.add_argument("--canonical", action="store_true", help="Integrate in the (q, p) chart")
    sub.add_argument("--backward", action="store_true", help="Integrate from t_max back to 0")

    sub = new_command(subparsers, "strobe", cmd_strobe, "Stroboscopic map at t_k = k T")
    add_field_args(sub)
    add_ic_args(sub)
    sub.add_argument("--ic", type=float, nargs=2, action="append", default=None, metavar=("Q", "P"),
                     help="Initial condition; repeat for several orbits (overrides --q0/--p0)")
    sub.add_argument("--periods", type=int, default=200)

    sub = new_command(subparsers, "contour", cmd_contour, "Analytic contour through an initial condition")
    add_field_args(sub, choices=("r", "nr"))
    add_ic_args(sub)
    sub.add_argument("--gamma", type=float, default=None, help="γ for --field nr (fitted when omitted)")
    sub.add_argument("--points", type=int, default=CONTOUR_POINTS)
    sub.add_argument("--separatrix", action="store_true", help="Rotating-field separatrix K = ±2Ω instead")

    sub = new_command(subparsers, "commensurability", cmd_commensurability, "Classify B/ω as rational or not")
    add_field_args(sub, choices=("r",))
    sub.add_argument("--tol", type=float, default=QG_COMMENSURABILITY_TOL)
    sub.add_argument("--max-den", type=int, default=QG_MAX_DENOMINATOR)


def cmd_simulate(args: argparse.Namespace):
    spec = field_spec(args)
    t_max = window(spec, args.periods, args.t_max)
    if args.samples < 1:
        raise InputError("--samples must be positive")
    period = natural_period(spec) or t_max
    n = max(1, int(math.ceil(args.samples * t_max / period - 1e-9)))
    grid = sample_grid(t_max, n)
    initial = initial_state(args)
    cfg = integrator(args)
    if args.backward:
        grid = grid[::-1]
    if args.canonical:
        traj = integrate_canonical(spec, initial, grid, cfg)
    else:
        traj = integrate_bloch(spec, bloch_from_canonical(initial), grid, cfg)
    summary = {
        "field": spec.to_dict(),
        "samples": len(traj),
        "t_max": t_max,
        "final": dict(zip(("s1", "s2", "s3"), traj.states[-1].tolist())),
        "energy_final": float(traj.energies[-1]),
        "max_norm_drift": traj.meta.get("max_norm_drift"),
    }
    emit(args, summary, traj.to_csv)


def _initials(args: argparse.Namespace):
    if args.ic:
        return [CanonicalState(q, p) for q, p in args.ic]
    return [initial_state(args)]


def cmd_strobe(args: argparse.Namespace):
    spec = field_spec(args)
    smap = stroboscopic_map(spec, _initials(args), args.periods, integrator(args), args.jobs)
    orbits = []
    for orbit in smap.orbits:
        orbits.append({
            "q0": orbit.initial.q,
            "p0": orbit.initial.p,
            "distinct_points": distinct_points(orbit.q, orbit.p),
            "closure": orbit_closure(orbit),
            "max_norm_drift": orbit.max_norm_drift,
        })
    summary = {"field": spec.to_dict(), "n_periods": args.periods, "orbits": orbits}
    if spec.variant is FieldVariant.ROTATING:
        c = classify_commensurability(spec.params)
        summary["commensurability"] = {"ratio": c.ratio, "classification": c.classification}
    emit(args, summary, smap.to_csv)


def cmd_contour(args: argparse.Namespace):
    spec = field_spec(args)
    initial = initial_state(args)
    if args.separatrix:
        if spec.variant is not FieldVariant.ROTATING:
            raise InputError("--separatrix needs --field r")
        curves = separatrix_r(spec.params, args.points)

        def write_table(path):
            rows = [row for curve in curves for row in curve.rows()]
            write_csv(CONTOUR_HEADER, rows, path)

        summary = {
            "levels": [c.level for c in curves],
            "points": [int(c.q.size) for c in curves],
            "degenerate": curves[0].degenerate,
        }
        emit(args, summary, write_table)
        return

    if spec.variant is FieldVariant.ROTATING:
        curve = contour_r(spec.params, initial, args.points)
        gamma = None
    else:
        gamma = args.gamma
        if gamma is None:
            gamma = fit_gamma_for(spec, initial, cfg=integrator(args)).gamma
        curve = contour_nr(spec.params, gamma, initial, args.points)
    summary = {
        "kind": curve.kind.value,
        "level": curve.level,
        "gamma": gamma,
        "points": int(curve.q.size),
        "degenerate": curve.degenerate,
    }
    emit(args, summary, curve.to_csv)


def cmd_commensurability(args: argparse.Namespace):
    spec = field_spec(args)
    c = classify_commensurability(spec.params, args.tol, args.max_den)
    emit(args, {
        "ratio": c.ratio,
        "numerator": c.numerator,
        "denominator": c.denominator,
        "error": c.error,
        "classification": c.classification,
        "terms": list(c.terms),
    })
