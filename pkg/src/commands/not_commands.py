"""
NOT-operation commands: not predict | detect | resonance
"""
import argparse

from ..config.settings import GAMMA_PERIODS, NOT_TOL_NUMERIC, QG_INT_MAX
from ..errors import InputError
from ..physics.fields import FieldVariant
from ..physics.notgate import (
    detect_not,
    mean_not_time,
    nr_resonance_search,
    predict_regimes,
    regime_report,
    verify_regime,
)
from .common import CliParser, add_field_args, add_ic_args, emit, field_spec, initial_state, integrator, new_command


def register_not_commands(subparsers):
    """Register the 'not' command group"""
    group = subparsers.add_parser("not", help="Predict, detect and search NOT operations")
    actions = group.add_subparsers(dest="not_command", required=True, parser_class=CliParser)

    sub = new_command(actions, "predict", cmd_not_predict, "Closed-form NOT regimes of a rotating field")
    add_field_args(sub, choices=("r",))
    sub.add_argument("--int-max", type=int, default=QG_INT_MAX)
    sub.add_argument("--n", type=int, default=0, help="Repetition index n of t_not")
    sub.add_argument("--l", type=int, default=0, help="Branch index l of the initial-condition class")
    sub.add_argument("--verify", action="store_true", help="Check 50 random class members in closed form")

    sub = new_command(actions, "detect", cmd_not_detect, "Numerical minimum of S(t).S(0)")
    add_field_args(sub)
    add_ic_args(sub)
    sub.add_argument("--t-max", type=float, default=None)
    sub.add_argument("--tol", type=float, default=NOT_TOL_NUMERIC)

    sub = new_command(actions, "resonance", cmd_not_resonance, "Bisection on the non-rotating resonance")
    sub.add_argument("--omega", type=float, required=True)
    sub.add_argument("--b3", type=float, required=True)
    sub.add_argument("--b0-min", type=float, required=True)
    sub.add_argument("--b0-max", type=float, required=True)
    sub.add_argument("--periods", type=int, default=GAMMA_PERIODS)


def cmd_not_predict(args: argparse.Namespace):
    spec = field_spec(args)
    regimes = predict_regimes(spec.params, args.int_max)
    reports = []
    for regime in regimes:
        verified = verify_regime(spec.params, regime, args.n, args.l) if args.verify else None
        report = regime_report(regime, verified, args.l)
        report["t_not"] = regime.t_not(args.n, args.l)
        reports.append(report)
    emit(args, reports)


def cmd_not_detect(args: argparse.Namespace):
    spec = field_spec(args)
    initial = initial_state(args)
    detection = detect_not(spec, initial, args.t_max, args.tol, integrator(args))
    summary = {
        "t_star": detection.t_star,
        "min_overlap": detection.min_overlap,
        "achieved": detection.achieved,
        "first_hit": detection.first_hit,
        "t_max": float(detection.times[-1]),
    }
    if spec.variant in (FieldVariant.NONROTATING, FieldVariant.MEAN_OF_NR) and spec.params.b0 > 0:
        summary["mean_field_t_not"] = mean_not_time(spec.params.b0)
    emit(args, summary, detection.to_csv)


def cmd_not_resonance(args: argparse.Namespace):
    if args.b0_min == args.b0_max:
        raise InputError("--b0-min and --b0-max must differ")
    result = nr_resonance_search(
        args.omega, args.b3, (args.b0_min, args.b0_max), n_periods=args.periods, cfg=integrator(args)
    )
    emit(args, {
        "b0_star": result.b0_star,
        "gamma_star": result.gamma_star,
        "g": result.g,
        "iterations": result.iterations,
        "converged": result.converged,
    })
