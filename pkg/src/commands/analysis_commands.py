"""
Analysis commands: fit-gamma, sweep, lyapunov, avg, rwa, localize, expansion
"""
import argparse
from dataclasses import asdict
from typing import Optional

from ..config.settings import GAMMA_PERIODS, GAMMA_SEED, RWA_GRID
from ..errors import InputError
from ..physics.analysis import (
    expansion_terms,
    fit_gamma,
    gamma_prediction,
    gamma_sweep,
    high_freq_average,
    localization_check,
    lyapunov_estimate,
    rwa_error,
    strong_coupling,
    weighted_average_series,
    write_sweep_csv,
)
from ..physics.core import bloch_from_canonical, qubit_from_canonical
from ..physics.fields import FieldVariant, NonrotatingFieldParams
from ..physics.qoracle import RwaParams
from ..physics.strobe import stroboscopic_map
from ..utils.data_manager import write_csv
from .common import add_field_args, add_ic_args, emit, field_spec, initial_state, integrator, new_command


def register_analysis_commands(subparsers):
    """Register fit-gamma, sweep, lyapunov, avg, rwa, localize and expansion"""

    sub = new_command(subparsers, "fit-gamma", cmd_fit_gamma, "Fit H_k = E - γ q_k on strobe points")
    add_field_args(sub, default_field="nr", choices=("r", "nr"))
    add_ic_args(sub, *GAMMA_SEED)
    sub.add_argument("--periods", type=int, default=GAMMA_PERIODS)

    sub = new_command(subparsers, "sweep", cmd_sweep, "Fitted and predicted γ over a list of ω")
    sub.add_argument("--b0", type=float, required=True)
    sub.add_argument("--b3", type=float, required=True)
    sub.add_argument("--omegas", type=float, nargs="+", required=True)
    add_ic_args(sub, *GAMMA_SEED)
    sub.add_argument("--periods", type=int, default=GAMMA_PERIODS)
    sub.add_argument("--transverse-only", action="store_true", help="Predict γ from -4 B0²/ω² alone")

    sub = new_command(subparsers, "lyapunov", cmd_lyapunov, "Separation of two neighbouring trajectories")
    add_field_args(sub, choices=("r", "nr"))
    add_ic_args(sub)
    sub.add_argument("--delta0", type=float, default=1e-8)
    sub.add_argument("--periods", type=int, default=1000)

    sub = new_command(subparsers, "avg", cmd_avg, "Potential-weighted averages of the drive per period")
    add_field_args(sub, default_field="nr", choices=("nr",))
    add_ic_args(sub)
    sub.add_argument("--periods", type=int, default=20)
    sub.add_argument("--t-max", type=float, default=None)
    sub.add_argument("--drive", choices=("cos", "sin"), default="cos")

    sub = new_command(subparsers, "rwa", cmd_rwa, "Maximum distance between the exact and RWA states")
    sub.add_argument("--b0", type=float, required=True)
    sub.add_argument("--b3", type=float, required=True)
    sub.add_argument("--omega", type=float, default=None, help="Defaults to the resonance 2 B0")
    add_ic_args(sub, q0=-1.0, p0=0.0)
    sub.add_argument("--grid", type=int, default=RWA_GRID)

    sub = new_command(subparsers, "localize", cmd_localize, "Strong-coupling ω0 and frozen strobe dynamics")
    add_field_args(sub, default_field="nr", choices=("nr",))
    add_ic_args(sub)
    sub.add_argument("--t-max", type=float, default=None)

    sub = new_command(subparsers, "expansion", cmd_expansion, "Taylor-expansion coefficients A_n, B_n")
    sub.add_argument("--omega", type=float, required=True)
    sub.add_argument("--n-max", type=int, default=10)


def _nr_params(args: argparse.Namespace) -> NonrotatingFieldParams:
    spec = field_spec(args)
    if spec.variant is not FieldVariant.NONROTATING:
        raise InputError("this command needs --field nr")
    return spec.params


def cmd_fit_gamma(args: argparse.Namespace):
    spec = field_spec(args)
    smap = stroboscopic_map(spec, [initial_state(args)], args.periods, integrator(args), jobs=1)
    fit = fit_gamma(smap, 0)
    summary = {
        "gamma": fit.gamma,
        "intercept": fit.intercept,
        "max_residual": fit.max_residual,
        "n_points": fit.n_points,
    }
    if spec.variant is FieldVariant.NONROTATING:
        summary["gamma_pred"] = gamma_prediction(spec.params)
        summary["gamma_pred_transverse"] = gamma_prediction(spec.params, transverse_only=True)
    emit(args, summary, smap.to_csv if args.out else None)


def cmd_sweep(args: argparse.Namespace):
    rows = gamma_sweep(
        args.b0,
        args.b3,
        args.omegas,
        initial_state(args),
        args.periods,
        integrator(args),
        args.jobs,
        transverse_only=args.transverse_only,
    )
    summary = [asdict(r) for r in rows]
    emit(args, summary, lambda path: write_sweep_csv(rows, path))


def cmd_lyapunov(args: argparse.Namespace):
    spec = field_spec(args)
    S0 = bloch_from_canonical(initial_state(args))
    result = lyapunov_estimate(spec, S0, args.delta0, args.periods, integrator(args))
    ratios = result.ratios
    summary = {
        "lambda": result.lambda_,
        "periods": args.periods,
        "delta0": result.delta0,
        "max_ratio_deviation": float(abs(ratios - 1.0).max()),
    }

    def write_table(path: Optional[str]):
        write_csv(("k", "t", "D"), ((k, t, d) for k, (t, d) in enumerate(zip(result.times, result.distances))), path)

    emit(args, summary, write_table)


def cmd_avg(args: argparse.Namespace):
    params = _nr_params(args)
    series = weighted_average_series(
        params, initial_state(args), args.periods, integrator(args), t_max=args.t_max, drive=args.drive
    )
    summary = {
        "aggregate": series.aggregate,
        "series_mean": series.series_mean,
        "n_flagged": series.n_flagged,
        "t_max": series.t_max,
        "period": series.period,
        "drive": series.drive,
        "high_freq_prediction": high_freq_average(params),
        "high_freq_transverse": high_freq_average(params, transverse_only=True),
    }
    emit(args, summary, series.to_csv)


def cmd_rwa(args: argparse.Namespace):
    omega = 2.0 * args.b0 if args.omega is None else args.omega
    params = RwaParams(args.b0, args.b3, omega)
    result = rwa_error(params, qubit_from_canonical(initial_state(args)), args.grid, integrator(args))
    emit(args, {
        "max_error": result.max_error,
        "window": result.window,
        "resonant": result.resonant,
        "b3_over_omega": args.b3 / omega,
    })


def cmd_localize(args: argparse.Namespace):
    params = _nr_params(args)
    initial = initial_state(args)
    sc = strong_coupling(params)
    emit(args, {
        "omega0": sc.omega0,
        "bessel_argument": sc.bessel_argument,
        "j0": sc.j0,
        "localized": sc.localized,
        "validity_b0_T": sc.validity,
        "mean_map_level": sc.mean_level(initial),
        "max_dq": localization_check(params, initial, args.t_max, integrator(args)),
    })


def cmd_expansion(args: argparse.Namespace):
    terms = expansion_terms(args.omega, args.n_max)
    summary = {"omega": terms.omega, "A": list(terms.A), "B": list(terms.B)}

    def write_table(path: Optional[str]):
        write_csv(("n", "A_n", "B_n"), ((n, a, b) for n, (a, b) in enumerate(zip(terms.A, terms.B))), path)

    emit(args, summary, write_table)
