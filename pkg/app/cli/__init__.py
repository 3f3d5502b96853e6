"""Command-line surface: gen-data, train, compare, verify."""

import argparse
import logging
from typing import Optional, Sequence

from pydantic import ValidationError

from app import __version__
from app.cli import compare, gen_data, train, verify
from app.cli.common import (
    EXIT_NUMERICAL,
    EXIT_USAGE,
    print_error,
    validation_message,
)
from app.exceptions import (
    NonFiniteEvaluationError,
    NonFiniteLossError,
    PreferenceLabError,
    ReferenceDriftError,
)


logger = logging.getLogger(__name__)

COMMANDS = (gen_data, train, compare, verify)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acpo-lab",
        description="Preference-optimization lab: synthetic data, training and verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and dispatch to a command.

    Returns:
        0 success, 1 verification failure, 2 usage or configuration error,
        3 numerical failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.handler(args)
    except NonFiniteLossError as e:
        print_error(str(e))
        return EXIT_NUMERICAL
    except (ReferenceDriftError, NonFiniteEvaluationError) as e:
        print_error(str(e))
        return EXIT_NUMERICAL
    except ValidationError as e:
        print_error(validation_message(e))
        return EXIT_USAGE
    except (PreferenceLabError, OSError) as e:
        print_error(str(e))
        return EXIT_USAGE
