"""Construction of policy adapters from kind, dimensions and arrays."""

import numpy as np

from app.adapters.bigram_policy import BigramPolicy
from app.adapters.mlp_policy import MlpPolicy
from app.exceptions import InvalidPolicyError
from app.models import MlpDims, PolicyKind, Vocab
from app.ports import IPolicyModel


def expected_shapes(kind: PolicyKind, dimensions: dict[str, int]) -> dict[str, tuple[int, ...]]:
    """Parameter shapes, in checkpoint order, for a kind and its dimensions."""
    vocab = Vocab(size=dimensions["vocab"])
    if kind == PolicyKind.BIGRAM:
        return {"logits": (vocab.size, vocab.size)}
    dims = MlpDims(
        embed_dim=dimensions["embed_dim"],
        window=dimensions["window"],
        hidden=dimensions["hidden"],
    )
    return MlpPolicy.expected_shapes(vocab, dims)


def build_policy(
    kind: PolicyKind,
    dimensions: dict[str, int],
    arrays: dict[str, np.ndarray],
    frozen: bool = False,
) -> IPolicyModel:
    """
    Build a policy adapter.

    Args:
        kind: Policy family
        dimensions: "vocab" plus, for MLP, "embed_dim", "window", "hidden"
        arrays: Parameter values by name
        frozen: Whether to build a frozen reference

    Raises:
        InvalidPolicyError: If the kind, dimensions or arrays are invalid
    """
    try:
        vocab = Vocab(size=dimensions["vocab"])
        if kind == PolicyKind.BIGRAM:
            return BigramPolicy(vocab, arrays["logits"], frozen=frozen)
        if kind == PolicyKind.MLP:
            dims = MlpDims(
                embed_dim=dimensions["embed_dim"],
                window=dimensions["window"],
                hidden=dimensions["hidden"],
            )
            return MlpPolicy(vocab, dims, arrays, frozen=frozen)
    except (KeyError, ValueError) as e:
        raise InvalidPolicyError(f"Cannot build {kind} policy: {e}") from e
    raise InvalidPolicyError(f"Unknown policy kind: {kind}")
