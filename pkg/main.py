"""
Gyromagnet qubit simulator: command-line entry point
"""
import sys
from typing import Optional, Sequence

from src import (
    register_simulation_commands, register_analysis_commands,
    register_not_commands, register_geometry_commands,
)
from src.commands.common import CliParser, run_guarded
from src.utils import configure_logging


def build_parser() -> CliParser:
    parser = CliParser(
        prog="gyromagnet",
        description="Classical-gyromagnet simulations of driven two-level systems",
    )
    parser.add_argument(
        "--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Overrides QG_LOG_LEVEL",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register all commands
    register_simulation_commands(subparsers)
    register_analysis_commands(subparsers)
    register_not_commands(subparsers)
    register_geometry_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    return run_guarded(args)


if __name__ == "__main__":
    sys.exit(main())
