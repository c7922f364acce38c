"""
Shared CLI plumbing: parser class, common flags, option models and exit codes
"""
import argparse
import logging
import math
import sys
from typing import Any, Callable, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from ..config.settings import QG_JOBS
from ..errors import InputError, NumericalError
from ..physics.core import CanonicalState
from ..physics.fields import FieldSpec
from ..physics.notgate import natural_period
from ..utils.data_manager import check_writable, load_json_config, save_json
from ..utils.stepping import IntegratorConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

FIELD_CHOICES = ("r", "nr", "const", "mean")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"❌ {self.prog}: {message}\n")
        sys.exit(EXIT_INPUT)


# -------------------------------
# Option models
# -------------------------------

class FieldOptions(BaseModel):
    """Field flags: --field, --b0, --b3, --omega, --phi, --vector"""

    field: Literal["r", "nr", "const", "mean"] = "r"
    b0: float = Field(default=0.0, description="Transverse amplitude B0")
    b3: float = Field(default=0.0, description="Longitudinal amplitude B3")
    omega: Optional[float] = Field(default=None, gt=0, description="Drive frequency ω")
    phi: float = Field(default=0.0, description="Phase φ of the rotating field")
    vector: Optional[List[float]] = Field(default=None, min_length=3, max_length=3)

    @model_validator(mode="after")
    def _check_required(self):
        if self.field == "const":
            if self.vector is None:
                raise ValueError("--field const needs --vector B1 B2 B3")
        elif self.omega is None:
            raise ValueError(f"--field {self.field} needs --omega")
        if not all(math.isfinite(x) for x in (self.b0, self.b3, self.phi)):
            raise ValueError("field amplitudes must be finite")
        return self

    def to_spec(self) -> FieldSpec:
        if self.field == "r":
            return FieldSpec.rotating(self.b0, self.b3, self.omega, self.phi)
        if self.field == "nr":
            return FieldSpec.nonrotating(self.b0, self.b3, self.omega)
        if self.field == "mean":
            return FieldSpec.mean_of_nr(self.b0, self.b3, self.omega)
        return FieldSpec.constant(tuple(self.vector))


class InitialOptions(BaseModel):
    q0: float = Field(default=0.5, ge=-1.0, le=1.0, description="Initial position q0")
    p0: float = Field(default=1.0, description="Initial momentum p0")

    def to_state(self) -> CanonicalState:
        return CanonicalState(self.q0, self.p0)


class IntegratorOptions(BaseModel):
    rtol: Optional[float] = Field(default=None, gt=0)
    atol: Optional[float] = Field(default=None, gt=0)

    def to_config(self) -> IntegratorConfig:
        defaults = IntegratorConfig()
        return IntegratorConfig(self.rtol or defaults.rel_tol, self.atol or defaults.abs_tol)


# -------------------------------
# Flags
# -------------------------------

def common_parent() -> argparse.ArgumentParser:
    """Flags every subcommand shares"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--out", default=None, help="Write the CSV table to this path")
    parent.add_argument("--json", action="store_true", help="Print a JSON summary on stdout")
    parent.add_argument("--config", default=None, help="JSON file with the same keys as the flags")
    parent.add_argument("--jobs", type=int, default=QG_JOBS, help="Worker processes for sweeps")
    parent.add_argument("--rtol", type=float, default=None, help="Integrator relative tolerance")
    parent.add_argument("--atol", type=float, default=None, help="Integrator absolute tolerance")
    return parent


def add_field_args(parser: argparse.ArgumentParser, default_field: str = "r", choices=FIELD_CHOICES):
    parser.add_argument("--field", choices=choices, default=default_field)
    parser.add_argument("--b0", type=float, default=0.0)
    parser.add_argument("--b3", type=float, default=0.0)
    parser.add_argument("--omega", type=float, default=None)
    parser.add_argument("--phi", type=float, default=0.0)
    parser.add_argument("--vector", type=float, nargs=3, default=None, metavar=("B1", "B2", "B3"))


def add_ic_args(parser: argparse.ArgumentParser, q0: float = 0.5, p0: float = 1.0):
    parser.add_argument("--q0", type=float, default=q0)
    parser.add_argument("--p0", type=float, default=p0)


def new_command(subparsers, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
    sub = subparsers.add_parser(name, parents=[common_parent()], help=help_text, description=help_text)
    sub.set_defaults(handler=handler, command_parser=sub)
    return sub


# -------------------------------
# Argument resolution
# -------------------------------

def apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill flags left at their defaults from --config; explicit flags win"""
    if not getattr(args, "config", None):
        return args
    parser = args.command_parser
    for key, value in load_json_config(args.config).items():
        if key in ("config", "handler", "command_parser") or not hasattr(args, key):
            raise InputError(f"unknown key in config file: {key}")
        if getattr(args, key) == parser.get_default(key):
            setattr(args, key, value)
    return args


def field_spec(args: argparse.Namespace) -> FieldSpec:
    return FieldOptions(
        field=args.field, b0=args.b0, b3=args.b3, omega=args.omega, phi=args.phi, vector=args.vector
    ).to_spec()


def initial_state(args: argparse.Namespace) -> CanonicalState:
    return InitialOptions(q0=args.q0, p0=args.p0).to_state()


def integrator(args: argparse.Namespace) -> IntegratorConfig:
    return IntegratorOptions(rtol=args.rtol, atol=args.atol).to_config()


def window(spec: FieldSpec, periods: Optional[float], t_max: Optional[float]) -> float:
    """--t-max, else --periods drive (or precession) periods"""
    if t_max is not None:
        if not t_max > 0:
            raise InputError("--t-max must be positive")
        return float(t_max)
    period = natural_period(spec)
    if period is None:
        raise InputError("this field has no period; pass --t-max")
    if periods is None or periods <= 0:
        raise InputError("--periods must be positive")
    return periods * period


def emit(args: argparse.Namespace, summary: Any, write_table: Optional[Callable[[Optional[str]], None]] = None):
    """CSV to --out (or stdout without --json); JSON summary on stdout with --json"""
    if write_table is not None and args.out:
        write_table(args.out)
    if args.json or write_table is None:
        save_json(summary)
    elif not args.out:
        write_table(None)


def _input_error(args: argparse.Namespace, details: str) -> int:
    parser = getattr(args, "command_parser", None)
    if parser is not None:
        parser.print_usage(sys.stderr)
    sys.stderr.write(f"❌ Invalid arguments: {details}\n")
    return EXIT_INPUT


def run_guarded(args: argparse.Namespace) -> int:
    """Run the selected handler and map failures onto exit codes"""
    try:
        apply_config(args)
        check_writable(getattr(args, "out", None))
        args.handler(args)
        return EXIT_OK
    except NumericalError as e:
        sys.stderr.write(f"❌ Numerical failure: {e}\n")
        return EXIT_NUMERICAL
    except ValidationError as e:
        return _input_error(args, "; ".join(err["msg"] for err in e.errors()))
    except (InputError, ValueError, OSError) as e:
        return _input_error(args, str(e))
