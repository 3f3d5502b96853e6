"""Shared flags, configuration resolution and run manifests for the commands."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from app import __version__
from app.config import AppSettings
from app.dependencies import MEMORY_ENVIRONMENT, get_settings
from app.exceptions import InvalidConfigurationError
from app.models import (
    EMPIRICAL_ALPHA_WINDOW,
    FORMAL_ALPHA_WINDOW,
    MlpDims,
    ObjectiveConfig,
    ObjectiveKind,
    RunManifest,
    TrainConfig,
)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

MANIFEST_FILE = "manifest.json"

# Settings that describe the process rather than the experiment.
PROCESS_KEYS = {"service_name", "environment", "log_level", "log_format"}
RUN_KEYS = tuple(name for name in AppSettings.model_fields if name not in PROCESS_KEYS)

ALPHA_PRESETS = {
    "formal": FORMAL_ALPHA_WINDOW,
    "empirical": EMPIRICAL_ALPHA_WINDOW,
}


def validation_message(error: ValidationError) -> str:
    """Pydantic errors as one line, without the "Value error, " prefix."""
    return "; ".join(err["msg"].removeprefix("Value error, ") for err in error.errors())


def read_config_file(path: str) -> dict[str, str]:
    """
    Flat `key=value` lines, or the `config` block of a run manifest (.json).

    Raises:
        InvalidConfigurationError: If the file is missing, malformed or names unknown keys
    """
    source = Path(path)
    if not source.is_file():
        raise InvalidConfigurationError(f"Config file not found: {source}")
    text = source.read_text(encoding="utf-8")

    if source.suffix == ".json":
        try:
            entries = RunManifest.model_validate(json.loads(text)).config
        except (ValueError, ValidationError) as e:
            raise InvalidConfigurationError(f"Invalid run manifest {source}: {e}") from e
    else:
        entries = {}
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InvalidConfigurationError(f"{source}:{number}: expected key=value, got {line!r}")
            entries[key.strip().replace("-", "_")] = value.strip()

    unknown = sorted(set(entries) - set(RUN_KEYS))
    if unknown:
        raise InvalidConfigurationError(f"Unknown config keys in {source}: {', '.join(unknown)}")
    return entries


def resolve_settings(args: argparse.Namespace, flag_keys: dict[str, str]) -> AppSettings:
    """
    Settings defaults, then the --config file, then explicit flags.

    Args:
        args: Parsed arguments; unset flags are None
        flag_keys: Argument dest -> settings field

    Raises:
        InvalidConfigurationError: If the file or any value is invalid
    """
    values: dict[str, Any] = get_settings().model_dump()
    explicit: set[str] = set()

    config_path = getattr(args, "config", None)
    if config_path:
        entries = read_config_file(config_path)
        values.update(entries)
        explicit.update(entries)

    for dest, key in flag_keys.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[key] = value
            explicit.add(key)

    preset = str(values.get("alpha_preset", "formal"))
    if preset not in ALPHA_PRESETS:
        raise InvalidConfigurationError(
            f"Unknown alpha preset '{preset}' (expected one of: {', '.join(ALPHA_PRESETS)})"
        )
    lo, hi = ALPHA_PRESETS[preset]
    if "alpha_lo" not in explicit:
        values["alpha_lo"] = lo
    if "alpha_hi" not in explicit:
        values["alpha_hi"] = hi

    try:
        return AppSettings(**values)
    except ValidationError as e:
        raise InvalidConfigurationError(validation_message(e)) from e


def require_file_stores(settings: AppSettings) -> None:
    """
    Commands that write datasets or checkpoints need stores that outlive the process.

    Raises:
        InvalidConfigurationError: If environment is "memory"
    """
    if settings.environment == MEMORY_ENVIRONMENT:
        raise InvalidConfigurationError(
            "environment=memory keeps datasets and checkpoints in process memory and is for tests only; "
            "unset ACPO_LAB_ENVIRONMENT to write files"
        )


def flat_config(settings: AppSettings) -> dict[str, str]:
    """Resolved run configuration as strings, in declaration order."""
    dumped = settings.model_dump()
    return {key: str(dumped[key]) for key in RUN_KEYS}


def objective_config(settings: AppSettings, kind: ObjectiveKind) -> ObjectiveConfig:
    """
    Raises:
        InvalidConfigurationError: If the hyperparameters are out of range
    """
    try:
        return ObjectiveConfig(
            kind=kind,
            beta=settings.beta,
            delta=settings.delta,
            epsilon=settings.epsilon,
            alpha_lo=settings.alpha_lo,
            alpha_hi=settings.alpha_hi,
            tau_mode=settings.tau_mode,
            static_margin=settings.static_margin,
            simpo_beta=settings.simpo_beta,
            gamma=settings.simpo_gamma,
            shift_lambda=settings.shift_lambda,
            shift_mode=settings.shift_mode,
            beta_dpo_c=settings.beta_dpo_c,
            beta_dpo_decay=settings.beta_dpo_decay,
        )
    except ValidationError as e:
        raise InvalidConfigurationError(validation_message(e)) from e


def train_config(
    settings: AppSettings,
    objective: ObjectiveConfig,
    telemetry_path: Optional[str] = None,
) -> TrainConfig:
    try:
        return TrainConfig(
            objective=objective,
            learning_rate=settings.learning_rate,
            steps=settings.steps,
            batch_size=settings.batch_size,
            seed=settings.seed,
            optimizer=settings.optimizer,
            deterministic=settings.deterministic,
            log_every=settings.log_every,
            telemetry_path=telemetry_path,
        )
    except ValidationError as e:
        raise InvalidConfigurationError(validation_message(e)) from e


def mlp_dims(settings: AppSettings) -> MlpDims:
    try:
        return MlpDims(embed_dim=settings.embed_dim, window=settings.window, hidden=settings.hidden)
    except ValidationError as e:
        raise InvalidConfigurationError(validation_message(e)) from e


def write_manifest(
    directory: Path,
    command: str,
    settings: AppSettings,
    dataset_sha256: str,
    outputs: dict[str, str],
) -> Path:
    """Write the single manifest.json of an experiment directory."""
    manifest = RunManifest(
        command=command,
        tool_version=__version__,
        config=flat_config(settings),
        dataset_manifest_sha256=dataset_sha256,
        outputs=outputs,
    )
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / MANIFEST_FILE
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Run manifest written to {path}")
    return path


def add_config_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", metavar="FILE",
        help="flat key=value file or a previous manifest.json; flags override it",
    )


# dest -> settings field for the flags shared by train and compare
TRAINING_FLAGS = {
    "beta": "beta",
    "delta": "delta",
    "epsilon": "epsilon",
    "alpha_lo": "alpha_lo",
    "alpha_hi": "alpha_hi",
    "alpha_preset": "alpha_preset",
    "tau_mode": "tau_mode",
    "static_margin": "static_margin",
    "shift_lambda": "shift_lambda",
    "shift_mode": "shift_mode",
    "gamma": "simpo_gamma",
    "simpo_beta": "simpo_beta",
    "beta_dpo_c": "beta_dpo_c",
    "lr": "learning_rate",
    "steps": "steps",
    "batch": "batch_size",
    "seed": "seed",
    "optimizer": "optimizer",
    "policy": "policy_kind",
    "embed_dim": "embed_dim",
    "window": "window",
    "hidden": "hidden",
    "init_scale": "init_scale",
    "log_every": "log_every",
}


def add_training_flags(parser: argparse.ArgumentParser) -> None:
    """Objective, optimizer and policy flags; all default to None (unset)."""
    parser.add_argument("--data", required=True, help="dataset file written by gen-data")
    parser.add_argument("--beta", type=float, help="KL coefficient (default 0.1)")
    parser.add_argument("--delta", type=float, help="per-token advantage target (default 0.1)")
    parser.add_argument("--epsilon", type=float, help="floor on |r_l| in the alpha denominator (default 1e-5)")
    parser.add_argument("--alpha-lo", type=float, help="lower alpha clamp")
    parser.add_argument("--alpha-hi", type=float, help="upper alpha clamp")
    parser.add_argument(
        "--alpha-preset", choices=sorted(ALPHA_PRESETS),
        help="clamp window preset: formal [0, 1] (default) or empirical [0.3, 0.95]",
    )
    parser.add_argument("--tau-mode", choices=["pair", "batch", "static"], help="advantage target granularity")
    parser.add_argument("--static-margin", type=float, help="target margin for --tau-mode static")
    parser.add_argument("--lambda", dest="shift_lambda", type=float, help="DPO-Shift coefficient (default 0.95)")
    parser.add_argument("--shift-mode", choices=["multiplicative", "additive"], help="DPO-Shift reading")
    parser.add_argument("--gamma", type=float, help="SimPO margin (default 0.5)")
    parser.add_argument("--simpo-beta", type=float, help="SimPO reward scale (default 2.0)")
    parser.add_argument("--beta-dpo-c", type=float, help="beta-DPO adaptation rate (default 0.1)")
    parser.add_argument("--lr", type=float, help="learning rate (default 1e-3)")
    parser.add_argument("--steps", type=int, help="optimization steps (default 2000)")
    parser.add_argument("--batch", type=int, help="batch size (default 32)")
    parser.add_argument("--seed", type=int, help="initialization and shuffling seed (default 1)")
    parser.add_argument("--optimizer", choices=["adam", "sgd"], help="update rule (default adam)")
    parser.add_argument("--policy", choices=["bigram", "mlp"], help="policy family (default mlp)")
    parser.add_argument("--embed-dim", type=int, help="MLP embedding size (default 16)")
    parser.add_argument("--window", type=int, help="MLP context window (default 8)")
    parser.add_argument("--hidden", type=int, help="MLP hidden units (default 32)")
    parser.add_argument("--init-scale", type=float, help="half-width of the uniform init (default 0.1)")
    parser.add_argument("--log-every", type=int, help="progress log interval in steps (default 100)")
    add_config_flag(parser)


def print_error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)
