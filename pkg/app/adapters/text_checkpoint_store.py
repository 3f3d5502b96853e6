"""Plain-text checkpoint store adapter.

File layout (UTF-8, one item per line):

    # acpo-lab checkpoint
    format=acpo-checkpoint-v1
    kind=<bigram|mlp>
    vocab=<V>
    [embed_dim=<E>, window=<W>, hidden=<H> for mlp]
    frozen=<0|1>
    param <name> <dim> [<dim>]
    <row-major values, one matrix row per line, space separated>
    ...
    end

Values are written with repr(), which round-trips float64 exactly.
"""

import logging
from pathlib import Path

import numpy as np

from app.adapters.policy_factory import build_policy, expected_shapes
from app.exceptions import CheckpointFormatError, InvalidPolicyError
from app.models import PolicyKind
from app.ports import ICheckpointStore, IPolicyModel


logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "acpo-checkpoint-v1"


def render_checkpoint(model: IPolicyModel) -> str:
    lines = ["# acpo-lab checkpoint", f"format={CHECKPOINT_FORMAT}", f"kind={model.kind.value}"]
    for key, value in model.dimensions().items():
        lines.append(f"{key}={value}")
    lines.append(f"frozen={int(model.frozen)}")
    for name, node in model.parameters().items():
        lines.append(f"param {name} {' '.join(str(d) for d in node.value.shape)}")
        rows = node.value if node.value.ndim == 2 else node.value.reshape(1, -1)
        for row in rows:
            lines.append(" ".join(repr(float(x)) for x in row))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_checkpoint(text: str) -> IPolicyModel:
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    header: dict[str, str] = {}
    position = 0
    while position < len(lines) and "=" in lines[position]:
        key, _, value = lines[position].partition("=")
        header[key.strip()] = value.strip()
        position += 1

    if header.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointFormatError(f"Unsupported checkpoint format: {header.get('format')!r}")
    try:
        kind = PolicyKind(header["kind"])
        dimensions = {
            key: int(header[key])
            for key in ("vocab", "embed_dim", "window", "hidden")
            if key in header
        }
        frozen = header.get("frozen", "0") == "1"
        shapes = expected_shapes(kind, dimensions)
    except (KeyError, ValueError) as e:
        raise CheckpointFormatError(f"Invalid checkpoint header: {e}") from e

    arrays: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        if position >= len(lines):
            raise CheckpointFormatError(f"Checkpoint truncated before parameter {name}")
        declared = lines[position].split()
        if declared[:2] != ["param", name] or tuple(int(d) for d in declared[2:]) != shape:
            raise CheckpointFormatError(
                f"Expected parameter {name} with shape {shape}, found {lines[position]!r}"
            )
        position += 1
        n_rows = shape[0] if len(shape) == 2 else 1
        try:
            rows = [[float(x) for x in lines[position + r].split()] for r in range(n_rows)]
        except (IndexError, ValueError) as e:
            raise CheckpointFormatError(f"Malformed values for parameter {name}: {e}") from e
        position += n_rows
        values = np.array(rows, dtype=np.float64)
        if values.size != int(np.prod(shape)):
            raise CheckpointFormatError(f"Parameter {name} has {values.size} values, expected shape {shape}")
        arrays[name] = values.reshape(shape)

    if position >= len(lines) or lines[position] != "end":
        raise CheckpointFormatError("Checkpoint is missing its end marker")
    try:
        return build_policy(kind, dimensions, arrays, frozen=frozen)
    except InvalidPolicyError as e:
        raise CheckpointFormatError(str(e)) from e


class TextCheckpointStore(ICheckpointStore):
    """Stores each policy in its own text file."""

    def save(self, model: IPolicyModel, location: str) -> None:
        path = Path(location)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_checkpoint(model), encoding="utf-8")
        logger.info(f"Saved {model.kind.value} checkpoint ({model.parameter_count()} parameters) to {path}")

    def load(self, location: str) -> IPolicyModel:
        path = Path(location)
        if not path.is_file():
            raise CheckpointFormatError(f"Checkpoint not found: {path}")
        return parse_checkpoint(path.read_text(encoding="utf-8"))
