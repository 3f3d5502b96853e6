"""Computation graph domain model."""

import threading
from typing import Callable, Optional

import numpy as np


_recording = threading.local()


def is_recording() -> bool:
    """Whether new nodes record their parents on this thread."""
    return getattr(_recording, "enabled", True)


class no_grad:
    """Context manager that disables graph recording on the current thread."""

    def __enter__(self):
        self._previous = is_recording()
        _recording.enabled = False
        return self

    def __exit__(self, exc_type, exc, tb):
        _recording.enabled = self._previous
        return False


class Node:
    """
    One value in a define-by-run computation graph.

    Attributes:
        value: float64 array of rank 0, 1 or 2
        op: Tag of the producing operation ("leaf", "const", "add", ...)
        parents: Input nodes (empty for leaves and unrecorded nodes)
        grad: Accumulated derivative of the backward seed, same shape as value
        detached: Detached nodes never pass gradient to their parents
        requires_grad: Whether any trainable leaf is upstream of this node
    """

    __slots__ = (
        "value", "op", "parents", "grad", "detached",
        "requires_grad", "backward_fn", "name",
    )

    def __init__(
        self,
        value,
        op: str = "leaf",
        parents: tuple["Node", ...] = (),
        requires_grad: bool = False,
        detached: bool = False,
        backward_fn: Optional[Callable[[np.ndarray], None]] = None,
        name: Optional[str] = None,
    ):
        self.value = np.asarray(value, dtype=np.float64)
        if self.value.ndim > 2:
            raise ValueError(f"Node values are limited to rank 2, got shape {self.value.shape}")
        self.op = op
        self.parents = parents
        self.grad: Optional[np.ndarray] = None
        self.detached = detached
        self.requires_grad = requires_grad
        self.backward_fn = backward_fn
        self.name = name
        arena = GraphArena.current()
        if arena is not None:
            arena.nodes.append(self)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def item(self) -> float:
        """Return the value of a scalar node as a Python float."""
        return float(self.value)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        label = self.name or self.op
        return f"Node({label}, shape={self.shape})"


class GraphArena:
    """
    Records every node created inside a `with` block.

    Attributes:
        nodes: Nodes in creation order
        seed: Scalar node backward was last invoked on
    """

    _local = threading.local()

    def __init__(self):
        self.nodes: list[Node] = []
        self.seed: Optional[Node] = None
        self._outer: Optional["GraphArena"] = None

    @classmethod
    def current(cls) -> Optional["GraphArena"]:
        return getattr(cls._local, "arena", None)

    def __enter__(self):
        self._outer = GraphArena.current()
        GraphArena._local.arena = self
        return self

    def __exit__(self, exc_type, exc, tb):
        GraphArena._local.arena = self._outer
        return False

    def backward(self, seed: Node) -> None:
        """Run backward from seed, leaving zero gradients on unreachable nodes."""
        # Imported here: the engine module depends on this one.
        from app.autodiff.engine import backward

        for node in self.nodes:
            node.zero_grad()
        self.seed = seed
        backward(seed)
