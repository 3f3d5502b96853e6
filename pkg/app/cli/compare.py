"""compare: train several objectives from one starting point, write combined curves."""

import argparse
import logging
from pathlib import Path

from app.cli.common import (
    EXIT_OK,
    TRAINING_FLAGS,
    add_training_flags,
    mlp_dims,
    objective_config,
    require_file_stores,
    resolve_settings,
    train_config,
    write_manifest,
)
from app.dependencies import get_dataset_repository, get_telemetry_sink
from app.exceptions import InvalidConfigurationError
from app.services.comparison_service import ComparisonService, export_curves
from app.services.objectives import parse_objective_kind
from app.services.policy_service import init_model


logger = logging.getLogger(__name__)

FLAGS = {**TRAINING_FLAGS, "objectives": "objectives"}


def telemetry_file(kind) -> str:
    return f"telemetry-{kind.value}.csv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="compare objectives on the same data and start")
    parser.add_argument("--objectives", help="comma-separated objectives (default dpo,acpo)")
    parser.add_argument("--out", required=True, help="combined curves CSV to write")
    add_training_flags(parser)
    parser.set_defaults(handler=cmd_compare)


def cmd_compare(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, FLAGS)
    require_file_stores(settings)
    names = [name.strip() for name in settings.objectives.split(",") if name.strip()]
    if not names:
        raise InvalidConfigurationError("--objectives needs at least one objective")
    kinds = [parse_objective_kind(name) for name in names]
    if len(set(kinds)) != len(kinds):
        raise InvalidConfigurationError("--objectives lists an objective twice")

    out = Path(args.out)
    out_dir = out.parent
    base = train_config(settings, objective_config(settings, kinds[0]))
    repository = get_dataset_repository(settings)
    dataset = repository.load(args.data)
    initial = init_model(
        settings.policy_kind, dataset.world.vocab_size, settings.seed,
        mlp_dims(settings), settings.init_scale,
    )

    service = ComparisonService(
        sink_factory=lambda kind: get_telemetry_sink(str(out_dir / telemetry_file(kind)))
    )
    result = service.compare(initial, dataset, kinds, base)
    export_curves(result.curves, str(out))

    outputs = {"curves": out.name}
    outputs.update({f"telemetry_{kind.value}": telemetry_file(kind) for kind in kinds})
    write_manifest(
        out_dir,
        command="compare",
        settings=settings,
        dataset_sha256=repository.manifest_hash(args.data),
        outputs=outputs,
    )
    for kind in kinds:
        last = result.final(kind)
        if last is not None:
            print(f"{kind.value}: final delta_r_w={last.delta_r_w:.6f} margin={last.margin:.6f}")
    print(f"curves written to {out}")
    return EXIT_OK
