"""Line-oriented text dataset repository.

A dataset file starts with its manifest as `# key=value` lines, followed by
one pair per line:

    <prompt tokens> | <chosen tokens> | <rejected tokens>

with tokens as space-separated integers.
"""

import hashlib
import logging
from pathlib import Path

from pydantic import ValidationError

from app.exceptions import DatasetFormatError, EmptySequenceError
from app.models import DATASET_FORMAT, Dataset, PreferencePair, TokenSeq, WorldSpec
from app.ports import IDatasetRepository


logger = logging.getLogger(__name__)


def render_dataset(dataset: Dataset) -> str:
    lines = [dataset.manifest_block()]
    for pair in dataset.pairs:
        lines.append(
            " | ".join(
                " ".join(str(t) for t in seq.tokens)
                for seq in (pair.prompt, pair.chosen, pair.rejected)
            )
            + "\n"
        )
    return "".join(lines)


def _split_manifest(text: str) -> tuple[str, dict[str, str], list[str]]:
    header_lines, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            header_lines.append(line + "\n")
        elif line.strip():
            body.append(line)
    manifest = {}
    for line in header_lines:
        key, sep, value = line[1:].strip().partition("=")
        if sep:
            manifest[key.strip()] = value.strip()
    return "".join(header_lines), manifest, body


def world_from_manifest(manifest: dict[str, str]) -> WorldSpec:
    """Rebuild the generating world from a manifest mapping."""
    if manifest.get("format") != DATASET_FORMAT:
        raise DatasetFormatError(f"Unsupported dataset format: {manifest.get('format')!r}")
    try:
        return WorldSpec(
            vocab_size=int(manifest["vocab"]),
            prompt_len=int(manifest["prompt_len"]),
            resp_len=int(manifest["resp_len"]),
            overlap=float(manifest["overlap"]),
            corruption=manifest["corruption"],
            seed=int(manifest["seed"]),
        )
    except (KeyError, ValueError, ValidationError) as e:
        raise DatasetFormatError(f"Invalid dataset manifest: {e}") from e


def parse_dataset(text: str) -> Dataset:
    _, manifest, body = _split_manifest(text)
    world = world_from_manifest(manifest)
    pairs = []
    for number, line in enumerate(body, start=1):
        parts = line.split("|")
        if len(parts) != 3:
            raise DatasetFormatError(f"Line {number}: expected 3 '|'-separated fields, got {len(parts)}")
        try:
            prompt, chosen, rejected = (TokenSeq.of(p.split()) for p in parts)
        except (ValueError, EmptySequenceError) as e:
            raise DatasetFormatError(f"Line {number}: {e}") from e
        pairs.append(PreferencePair(prompt=prompt, chosen=chosen, rejected=rejected))

    declared = manifest.get("pairs")
    if declared is not None and int(declared) != len(pairs):
        raise DatasetFormatError(f"Manifest declares {declared} pairs but file holds {len(pairs)}")
    return Dataset(world=world, pairs=pairs)


class TextDatasetRepository(IDatasetRepository):
    """Stores each dataset in its own text file."""

    def save(self, dataset: Dataset, location: str) -> str:
        path = Path(location)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_dataset(dataset), encoding="utf-8")
        logger.info(f"Wrote {len(dataset)} pairs to {path}")
        return dataset.manifest_sha256()

    def load(self, location: str) -> Dataset:
        path = Path(location)
        if not path.is_file():
            raise DatasetFormatError(f"Dataset not found: {path}")
        dataset = parse_dataset(path.read_text(encoding="utf-8"))
        logger.info(f"Loaded {len(dataset)} pairs from {path}")
        return dataset

    def manifest_hash(self, location: str) -> str:
        path = Path(location)
        if not path.is_file():
            raise DatasetFormatError(f"Dataset not found: {path}")
        header, _, _ = _split_manifest(path.read_text(encoding="utf-8"))
        return hashlib.sha256(header.encode("utf-8")).hexdigest()
