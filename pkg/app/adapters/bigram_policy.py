"""Bigram-table policy adapter."""

from typing import Sequence

import numpy as np

from app.exceptions import EmptySequenceError, InvalidPolicyError
from app.models import Node, PolicyKind, Vocab
from app.ports import IPolicyModel
from app.autodiff import engine as ge


class BigramPolicy(IPolicyModel):
    """
    Policy whose next-token distribution depends only on the previous token.

    Row c of the V x V logits table is the distribution following token c.
    The first response token is conditioned on the last prompt token, so the
    prompt must be non-empty.
    """

    kind = PolicyKind.BIGRAM

    def __init__(self, vocab: Vocab, logits: np.ndarray, frozen: bool = False):
        logits = np.array(logits, dtype=np.float64)
        if logits.shape != (vocab.size, vocab.size):
            raise InvalidPolicyError(
                f"Bigram logits must have shape {(vocab.size, vocab.size)}, got {logits.shape}"
            )
        self._vocab = vocab
        self._frozen = frozen
        leaf = ge.constant if frozen else ge.parameter
        self._params = {"logits": leaf(logits, name="logits")}

    @property
    def vocab(self) -> Vocab:
        return self._vocab

    @property
    def frozen(self) -> bool:
        return self._frozen

    def parameters(self) -> dict[str, Node]:
        return self._params

    def dimensions(self) -> dict[str, int]:
        return {"vocab": self._vocab.size}

    def context_log_probs(self, prefixes: Sequence[Sequence[int]]) -> Node:
        if any(len(p) == 0 for p in prefixes):
            raise EmptySequenceError("Bigram policy needs at least one context token")
        previous = np.array([p[-1] for p in prefixes], dtype=np.int64)
        rows = ge.gather(self._params["logits"], previous)
        return ge.log_softmax(rows)

    def clone(self, frozen: bool) -> "BigramPolicy":
        return BigramPolicy(self._vocab, self._params["logits"].value.copy(), frozen=frozen)
