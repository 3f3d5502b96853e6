"""verify: run the gradient and objective property suite."""

import argparse
import logging

from app.cli.common import (
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    add_config_flag,
    resolve_settings,
)
from app.exceptions import InvalidConfigurationError
from app.models import VerificationReport
from app.services.verification_service import FAULTS, VerificationService


logger = logging.getLogger(__name__)

FLAGS = {
    "seeds": "verify_seeds",
    "coords": "gradcheck_coords",
    "beta": "beta",
}


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="run the property suite")
    parser.add_argument("--seeds", type=int, help="random toy models per property (default 20)")
    parser.add_argument("--coords", type=int, help="coordinates sampled per gradient check (default 200)")
    parser.add_argument("--beta", type=float, help="KL coefficient of the checked objectives")
    parser.add_argument(
        "--inject-fault", choices=list(FAULTS),
        help="deliberately break ACPO; the suite must then fail",
    )
    add_config_flag(parser)
    parser.set_defaults(handler=cmd_verify)


def render_report(report: VerificationReport) -> str:
    lines = []
    for name, (worst, tol, ok) in report.summary().items():
        lines.append(f"{name}: max err {worst:.3e} (tol {tol:.0e}) ... {'PASS' if ok else 'FAIL'}")
    for failure in report.failures():
        seed = "-" if failure.seed is None else failure.seed
        detail = f" ({failure.detail})" if failure.detail else ""
        lines.append(f"FAILED {failure.name} seed {seed}: max err {failure.max_error:.3e}{detail}")
    return "\n".join(lines)


def cmd_verify(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, FLAGS)
    if settings.verify_seeds < 1:
        raise InvalidConfigurationError("--seeds must be at least 1")
    report = VerificationService(settings, fault=args.inject_fault).run(settings.verify_seeds)
    print(render_report(report))
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED
