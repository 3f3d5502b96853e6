"""Windowed MLP policy adapter."""

from typing import Sequence

import numpy as np

from app.exceptions import InvalidPolicyError
from app.models import MlpDims, Node, PolicyKind, Vocab
from app.ports import IPolicyModel
from app.autodiff import engine as ge


PARAMETER_ORDER = ("embedding", "hidden_w", "hidden_b", "out_w", "out_b")


class MlpPolicy(IPolicyModel):
    """
    Policy over the last W tokens of context.

    Each of the W context slots is embedded (E dims), the slot embeddings are
    concatenated and fed through one softplus hidden layer (H units) to the
    output logits. Contexts shorter than W are left-padded with the reserved
    id V, whose embedding is a fixed zero row and is not a parameter.

    Parameters (checkpoint order):
        embedding: V x E
        hidden_w: (W*E) x H, row block w serves slot w
        hidden_b: H
        out_w: H x V
        out_b: V
    """

    kind = PolicyKind.MLP

    def __init__(
        self,
        vocab: Vocab,
        dims: MlpDims,
        arrays: dict[str, np.ndarray],
        frozen: bool = False,
    ):
        expected = self.expected_shapes(vocab, dims)
        missing = [name for name in PARAMETER_ORDER if name not in arrays]
        if missing:
            raise InvalidPolicyError(f"MLP policy missing parameters: {', '.join(missing)}")
        self._vocab = vocab
        self._dims = dims
        self._frozen = frozen
        leaf = ge.constant if frozen else ge.parameter
        self._params: dict[str, Node] = {}
        for name in PARAMETER_ORDER:
            value = np.array(arrays[name], dtype=np.float64)
            if value.shape != expected[name]:
                raise InvalidPolicyError(
                    f"MLP parameter {name} must have shape {expected[name]}, got {value.shape}"
                )
            self._params[name] = leaf(value, name=name)

    @staticmethod
    def expected_shapes(vocab: Vocab, dims: MlpDims) -> dict[str, tuple[int, ...]]:
        v, e, w, h = vocab.size, dims.embed_dim, dims.window, dims.hidden
        return {
            "embedding": (v, e),
            "hidden_w": (w * e, h),
            "hidden_b": (h,),
            "out_w": (h, v),
            "out_b": (v,),
        }

    @property
    def vocab(self) -> Vocab:
        return self._vocab

    @property
    def dims(self) -> MlpDims:
        return self._dims

    @property
    def frozen(self) -> bool:
        return self._frozen

    def parameters(self) -> dict[str, Node]:
        return self._params

    def dimensions(self) -> dict[str, int]:
        return {
            "vocab": self._vocab.size,
            "embed_dim": self._dims.embed_dim,
            "window": self._dims.window,
            "hidden": self._dims.hidden,
        }

    def _context_matrix(self, prefixes: Sequence[Sequence[int]]) -> np.ndarray:
        window = self._dims.window
        contexts = np.full((len(prefixes), window), self._vocab.pad_id, dtype=np.int64)
        for row, prefix in enumerate(prefixes):
            recent = list(prefix)[-window:]
            if recent:
                contexts[row, window - len(recent):] = recent
        return contexts

    def context_log_probs(self, prefixes: Sequence[Sequence[int]]) -> Node:
        p = self._params
        embed_dim = self._dims.embed_dim
        contexts = self._context_matrix(prefixes)
        pad = self._vocab.pad_id

        pre_activation = None
        for slot in range(self._dims.window):
            column = contexts[:, slot]
            is_pad = column == pad
            if is_pad.all():
                continue
            embedded = ge.gather(p["embedding"], np.where(is_pad, 0, column))
            if is_pad.any():
                mask = np.repeat((~is_pad).astype(np.float64)[:, None], embed_dim, axis=1)
                embedded = ge.multiply(embedded, ge.constant(mask))
            block = ge.gather(p["hidden_w"], np.arange(slot * embed_dim, (slot + 1) * embed_dim))
            term = ge.matmul(embedded, block)
            pre_activation = term if pre_activation is None else ge.add(pre_activation, term)

        if pre_activation is None:
            pre_activation = ge.constant(np.zeros((len(prefixes), self._dims.hidden)))
        hidden = ge.softplus(ge.add(pre_activation, p["hidden_b"]))
        logits = ge.add(ge.matmul(hidden, p["out_w"]), p["out_b"])
        return ge.log_softmax(logits)

    def clone(self, frozen: bool) -> "MlpPolicy":
        arrays = {name: node.value.copy() for name, node in self._params.items()}
        return MlpPolicy(self._vocab, self._dims, arrays, frozen=frozen)
