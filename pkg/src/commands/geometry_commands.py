"""
Geometry command: precession data, NOT rule and separatrix pole passage
"""
import argparse
from dataclasses import asdict

from ..errors import InputError, NotApplicableError
from ..physics.core import bloch_from_canonical
from ..physics.fields import FieldVariant
from ..physics.geometry import not_rule, precession_data, rotating_field_vector, separatrix_precession_check
from .common import add_field_args, add_ic_args, emit, field_spec, initial_state, integrator, new_command


def register_geometry_commands(subparsers):
    """Register geometry"""
    sub = new_command(subparsers, "geometry", cmd_geometry, "Precession geometry of S about a field")
    add_field_args(sub, default_field="const", choices=("const", "r"))
    add_ic_args(sub, q0=0.0, p0=0.0)
    sub.add_argument("--separatrix", action="store_true", help="Pole passage at K = ±2Ω (--field r)")


def cmd_geometry(args: argparse.Namespace):
    spec = field_spec(args)
    initial = initial_state(args)
    if spec.variant is FieldVariant.ROTATING:
        B_vec = rotating_field_vector(spec.params)
    else:
        B_vec = spec.vector
    if args.separatrix and spec.variant is not FieldVariant.ROTATING:
        raise InputError("--separatrix needs --field r")

    data = precession_data(B_vec, bloch_from_canonical(initial))
    summary = {"field_vector": list(B_vec), "precession": asdict(data)}
    try:
        rule = not_rule(initial, B_vec)
        summary["not_rule"] = {
            "lhs": rule.lhs,
            "rhs": rule.rhs,
            "theta": rule.theta,
            "branch": rule.branch,
            "satisfied": rule.satisfied,
            "perpendicular": rule.perpendicular,
        }
    except NotApplicableError as e:
        summary["not_rule"] = {"applicable": False, "reason": str(e)}
    if args.separatrix:
        report = separatrix_precession_check(spec.params, cfg=integrator(args))
        summary["separatrix"] = asdict(report)
    emit(args, summary)
