"""Policy construction and sequence scoring."""

import logging
from contextlib import nullcontext
from typing import Optional, Sequence, Union

import numpy as np

from app.adapters import build_policy, expected_shapes
from app.autodiff import engine as ge
from app.exceptions import EmptySequenceError, InvalidPolicyError, VocabMismatchError
from app.models import MlpDims, Node, PolicyKind, TokenSeq, Vocab, no_grad
from app.ports import IPolicyModel


logger = logging.getLogger(__name__)

TokensLike = Union[TokenSeq, Sequence[int]]


def _tokens(seq: TokensLike) -> tuple[int, ...]:
    return seq.tokens if isinstance(seq, TokenSeq) else tuple(int(t) for t in seq)


def init_model(
    kind: Union[PolicyKind, str],
    vocab: Union[Vocab, int],
    seed: int,
    dims: Optional[MlpDims] = None,
    init_scale: float = 0.1,
) -> IPolicyModel:
    """
    Create a policy with parameters drawn i.i.d. from U(-init_scale, init_scale).

    The same (kind, vocab, dims, seed) always yields identical parameters.

    Raises:
        InvalidPolicyError: If V < 2 or the kind is unknown
    """
    size = vocab.size if isinstance(vocab, Vocab) else int(vocab)
    if size < 2:
        raise InvalidPolicyError(f"Vocabulary needs at least 2 tokens, got {size}")
    try:
        kind = PolicyKind(kind)
    except ValueError as e:
        raise InvalidPolicyError(f"Unknown policy kind: {kind}") from e

    dims = dims or MlpDims()
    dimensions = {"vocab": size}
    if kind == PolicyKind.MLP:
        dimensions.update(embed_dim=dims.embed_dim, window=dims.window, hidden=dims.hidden)

    rng = np.random.default_rng(seed)
    arrays = {
        name: rng.uniform(-init_scale, init_scale, size=shape)
        for name, shape in expected_shapes(kind, dimensions).items()
    }
    model = build_policy(kind, dimensions, arrays)
    logger.debug(f"Initialized {kind.value} policy with {model.parameter_count()} parameters (seed {seed})")
    return model


def clone_as_reference(model: IPolicyModel) -> IPolicyModel:
    """Deep, frozen copy of a policy; later updates to `model` never reach it."""
    return model.clone(frozen=True)


def _validate(model: IPolicyModel, prompt: tuple[int, ...], response: tuple[int, ...]) -> None:
    if not response:
        raise EmptySequenceError("Response must contain at least one token")
    size = model.vocab.size
    for token in prompt + response:
        if not 0 <= token < size:
            raise VocabMismatchError(f"Token {token} outside vocabulary of size {size}")


def token_log_probs(
    model: IPolicyModel,
    requests: Sequence[tuple[TokensLike, TokensLike]],
) -> tuple[Node, list[tuple[int, int]]]:
    """
    Log-probability of every response token, batched over requests.

    Prompt tokens condition but are never scored.

    Args:
        model: Policy to score with
        requests: (prompt, response) pairs

    Returns:
        (vector node of per-token log-probs, [start, end) span of each request)
    """
    prefixes: list[tuple[int, ...]] = []
    targets: list[int] = []
    spans: list[tuple[int, int]] = []
    for prompt, response in requests:
        x, y = _tokens(prompt), _tokens(response)
        _validate(model, x, y)
        full = x + y
        start = len(targets)
        for t, token in enumerate(y):
            prefixes.append(full[: len(x) + t])
            targets.append(token)
        spans.append((start, len(targets)))

    table = model.context_log_probs(prefixes)
    picked = ge.gather(table, np.arange(len(targets)), np.array(targets, dtype=np.int64))
    return picked, spans


def sequence_log_probs(
    model: IPolicyModel,
    requests: Sequence[tuple[TokensLike, TokensLike]],
    grad: bool = True,
) -> list[Node]:
    """
    sum_t log pi(y_t | x, y_<t) for each (x, y), as scalar nodes.

    With grad=False no graph is recorded.
    """
    with (nullcontext() if grad else no_grad()):
        picked, spans = token_log_probs(model, requests)
        return [ge.sum(ge.gather(picked, np.arange(start, end))) for start, end in spans]


def seq_log_prob(model: IPolicyModel, x: TokensLike, y: TokensLike, grad: bool = True) -> Node:
    """Log-likelihood of response y given prompt x."""
    return sequence_log_probs(model, [(x, y)], grad=grad)[0]


def next_token_log_probs(model: IPolicyModel, x: TokensLike, y: TokensLike) -> np.ndarray:
    """Full next-token log-probability rows (|y| x V) along a response."""
    prompt, response = _tokens(x), _tokens(y)
    _validate(model, prompt, response)
    full = prompt + response
    with no_grad():
        table = model.context_log_probs([full[: len(prompt) + t] for t in range(len(response))])
    return table.value.copy()
