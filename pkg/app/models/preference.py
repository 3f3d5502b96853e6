"""Synthetic preference data domain models."""

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum

from pydantic import BaseModel, Field, model_validator

from app.models.policy import TokenSeq


DATASET_FORMAT = "acpo-pairs-v1"


class CorruptionMode(str, Enum):
    """How the rejected response departs from the chosen one after the shared prefix."""
    SUFFIX_REPLACE = "suffix-replace"  # every remaining token replaced
    INTERLEAVE = "interleave"  # every other remaining token replaced


def overlap_prefix_len(overlap: float, resp_len: int) -> int:
    """floor(rho * L), robust to float noise such as 0.7 * 10."""
    return math.floor(round(overlap * resp_len, 9))


class WorldSpec(BaseModel):
    """
    Parameters of the synthetic preference world.

    The chosen and rejected responses share their first floor(overlap * L)
    tokens; at least one token must differ.
    """

    vocab_size: int = Field(default=32, description="Number of tokens V")
    prompt_len: int = Field(default=4, ge=1, description="Prompt length")
    resp_len: int = Field(default=10, ge=1, description="Response length L")
    overlap: float = Field(default=0.8, description="Shared-prefix ratio rho in [0, 1)")
    corruption: CorruptionMode = Field(default=CorruptionMode.SUFFIX_REPLACE)
    seed: int = Field(default=1, ge=0)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_feasible(self) -> "WorldSpec":
        if self.vocab_size < 4:
            raise ValueError(f"vocab size must be at least 4, got {self.vocab_size}")
        if self.overlap < 0:
            raise ValueError(f"overlap must be in [0, 1), got {self.overlap}")
        if math.ceil(round(self.overlap * self.resp_len, 9)) > self.resp_len - 1:
            raise ValueError("overlap must leave at least one differing token")
        return self

    @property
    def shared_prefix_len(self) -> int:
        return overlap_prefix_len(self.overlap, self.resp_len)


@dataclass(frozen=True)
class PreferencePair:
    """A prompt with a chosen (y_w) and a rejected (y_l) continuation."""
    prompt: TokenSeq
    chosen: TokenSeq
    rejected: TokenSeq

    def shared_prefix_len(self) -> int:
        count = 0
        for a, b in zip(self.chosen.tokens, self.rejected.tokens):
            if a != b:
                break
            count += 1
        return count


@dataclass
class Dataset:
    """Ordered preference pairs plus the world that generated them."""
    world: WorldSpec
    pairs: list[PreferencePair] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def manifest(self) -> dict[str, str]:
        """Generation manifest as ordered key=value entries."""
        return {
            "format": DATASET_FORMAT,
            "vocab": str(self.world.vocab_size),
            "prompt_len": str(self.world.prompt_len),
            "resp_len": str(self.world.resp_len),
            "overlap": repr(float(self.world.overlap)),
            "corruption": self.world.corruption.value,
            "seed": str(self.world.seed),
            "pairs": str(len(self.pairs)),
        }

    def manifest_block(self) -> str:
        """Manifest rendered as the `#`-prefixed header of the dataset file."""
        return "".join(f"# {key}={value}\n" for key, value in self.manifest().items())

    def manifest_sha256(self) -> str:
        return hashlib.sha256(self.manifest_block().encode("utf-8")).hexdigest()
