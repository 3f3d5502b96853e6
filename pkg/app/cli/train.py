"""train: optimize one objective and write telemetry, checkpoint and manifest."""

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
from app.dependencies import (
    get_checkpoint_store,
    get_dataset_repository,
    get_optimizer,
    get_telemetry_sink,
)
from app.services.objectives import parse_objective_kind
from app.services.policy_service import clone_as_reference, init_model
from app.services.trainer_service import TrainerService


logger = logging.getLogger(__name__)

TELEMETRY_FILE = "telemetry.csv"
CHECKPOINT_FILE = "model.ckpt"

FLAGS = {**TRAINING_FLAGS, "objective": "objective"}


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train a policy under one objective")
    parser.add_argument(
        "--objective", help="dpo | ipo | simpo | beta-dpo | dpo-shift | acpo (default acpo)",
    )
    parser.add_argument("--out-dir", required=True, help="run directory to create")
    add_training_flags(parser)
    parser.set_defaults(handler=cmd_train)


def cmd_train(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, FLAGS)
    require_file_stores(settings)
    kind = parse_objective_kind(settings.objective)
    out_dir = Path(args.out_dir)
    telemetry_path = out_dir / TELEMETRY_FILE
    checkpoint_path = out_dir / CHECKPOINT_FILE

    config = train_config(settings, objective_config(settings, kind), str(telemetry_path))
    repository = get_dataset_repository(settings)
    dataset = repository.load(args.data)
    model = init_model(
        settings.policy_kind, dataset.world.vocab_size, settings.seed,
        mlp_dims(settings), settings.init_scale,
    )
    ref = clone_as_reference(model)

    out_dir.mkdir(parents=True, exist_ok=True)
    trainer = TrainerService(
        config,
        optimizer=get_optimizer(config.optimizer, config.learning_rate),
        sink=get_telemetry_sink(str(telemetry_path)),
    )
    result = trainer.train(model, ref, dataset)
    get_checkpoint_store(settings).save(result.model, str(checkpoint_path))

    write_manifest(
        out_dir,
        command="train",
        settings=settings,
        dataset_sha256=repository.manifest_hash(args.data),
        outputs={"telemetry": TELEMETRY_FILE, "checkpoint": CHECKPOINT_FILE},
    )
    print(f"trained {kind.value} for {len(result.table)} steps; outputs in {out_dir}")
    return EXIT_OK
