"""Policy domain models."""

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, Field

from app.exceptions import EmptySequenceError


class PolicyKind(str, Enum):
    """Supported autoregressive policy families."""
    BIGRAM = "bigram"  # next token depends on the previous token only
    MLP = "mlp"  # windowed context, embedding + one hidden layer


class Vocab(BaseModel):
    """Token alphabet 0..size-1."""

    size: int = Field(..., ge=2, description="Number of real tokens V")

    model_config = {"frozen": True}

    @property
    def pad_id(self) -> int:
        """Reserved id used to left-pad short MLP contexts."""
        return self.size

    def contains(self, tokens) -> bool:
        return all(0 <= int(t) < self.size for t in tokens)


class MlpDims(BaseModel):
    """Dimensions of the windowed MLP policy."""

    embed_dim: int = Field(default=16, ge=1)
    window: int = Field(default=8, ge=1)
    hidden: int = Field(default=32, ge=1)

    model_config = {"frozen": True}


@dataclass(frozen=True)
class TokenSeq:
    """An ordered, non-empty list of token ids."""
    tokens: tuple[int, ...]

    def __post_init__(self):
        if len(self.tokens) < 1:
            raise EmptySequenceError("Token sequence must contain at least one token")

    @classmethod
    def of(cls, tokens) -> "TokenSeq":
        return cls(tuple(int(t) for t in tokens))

    def __len__(self) -> int:
        return len(self.tokens)
