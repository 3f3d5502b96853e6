"""Reverse-mode differentiation engine over float64 arrays of rank <= 2.

Graphs are rebuilt every forward pass. Each operation returns a new `Node`
and, while recording is enabled, a closure that pushes the output gradient
to its parents. The operation catalog is:

    add, subtract, multiply, scale, matmul, log_softmax, gather,
    sum, mean, sigmoid, softplus, neg, detach

plus `constant` and `parameter` for creating leaves.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from app.exceptions import GatherIndexError, NonScalarSeedError, ShapeMismatchError
from app.models.graph import Node, is_recording


logger = logging.getLogger(__name__)

IndexLike = Union[int, Sequence[int], np.ndarray]


# ============================================================================
# Leaves
# ============================================================================

def constant(value, name: Optional[str] = None) -> Node:
    """Create a leaf that never receives gradient."""
    return Node(value, op="const", name=name)


def parameter(value, name: Optional[str] = None) -> Node:
    """Create a trainable leaf."""
    return Node(value, op="leaf", requires_grad=True, name=name)


def as_node(value) -> Node:
    return value if isinstance(value, Node) else constant(value)


# ============================================================================
# Internals
# ============================================================================

def _make(value, op: str, parents: tuple[Node, ...], backward_fn) -> Node:
    if not is_recording():
        return Node(value, op=op)
    requires_grad = any(p.requires_grad for p in parents)
    return Node(
        value,
        op=op,
        parents=parents,
        requires_grad=requires_grad,
        backward_fn=backward_fn if requires_grad else None,
    )


def _accumulate(node: Node, contribution: np.ndarray) -> None:
    if not node.requires_grad:
        return
    if node.grad is None:
        node.grad = np.zeros_like(node.value)
    node.grad = node.grad + contribution


def _broadcast_shape(op: str, a: Node, b: Node) -> tuple[int, ...]:
    """Resolve the output shape of an elementwise binary op.

    Supported: equal shapes, either operand scalar, or (n, m) with (m,).
    """
    sa, sb = a.shape, b.shape
    if sa == sb:
        return sa
    if sa == ():
        return sb
    if sb == ():
        return sa
    if len(sa) == 2 and len(sb) == 1 and sa[1] == sb[0]:
        return sa
    if len(sb) == 2 and len(sa) == 1 and sb[1] == sa[0]:
        return sb
    raise ShapeMismatchError(f"{op}: cannot combine shapes {sa} and {sb}")


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if shape == ():
        return np.asarray(grad.sum())
    # (n, m) output reduced onto an (m,) operand
    return grad.sum(axis=0)


def _check_index(index: np.ndarray, bound: int, what: str) -> None:
    if index.size and (index.min() < 0 or index.max() >= bound):
        raise GatherIndexError(
            f"gather: {what} index out of range [0, {bound}): "
            f"min={int(index.min())}, max={int(index.max())}"
        )


# ============================================================================
# Elementwise and linear algebra
# ============================================================================

def add(a: Node, b: Node) -> Node:
    a, b = as_node(a), as_node(b)
    _broadcast_shape("add", a, b)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(g, b.shape))

    return _make(a.value + b.value, "add", (a, b), backward_fn)


def subtract(a: Node, b: Node) -> Node:
    a, b = as_node(a), as_node(b)
    _broadcast_shape("subtract", a, b)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(-g, b.shape))

    return _make(a.value - b.value, "subtract", (a, b), backward_fn)


def multiply(a: Node, b: Node) -> Node:
    """Elementwise product."""
    a, b = as_node(a), as_node(b)
    _broadcast_shape("multiply", a, b)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, _unbroadcast(g * b.value, a.shape))
        _accumulate(b, _unbroadcast(g * a.value, b.shape))

    return _make(a.value * b.value, "multiply", (a, b), backward_fn)


def scale(a: Node, factor: float) -> Node:
    """Multiply by a plain Python scalar."""
    a = as_node(a)
    factor = float(factor)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, g * factor)

    return _make(a.value * factor, "scale", (a,), backward_fn)


def neg(a: Node) -> Node:
    a = as_node(a)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, -g)

    return _make(-a.value, "neg", (a,), backward_fn)


def matmul(a: Node, b: Node) -> Node:
    """Matrix product for operands of rank 1 or 2."""
    a, b = as_node(a), as_node(b)
    if a.value.ndim == 0 or b.value.ndim == 0 or a.shape[-1] != b.shape[0]:
        raise ShapeMismatchError(f"matmul: cannot multiply shapes {a.shape} and {b.shape}")
    av, bv = a.value, b.value

    def backward_fn(g: np.ndarray) -> None:
        if av.ndim == 2 and bv.ndim == 2:
            ga, gb = g @ bv.T, av.T @ g
        elif av.ndim == 2:
            ga, gb = np.outer(g, bv), av.T @ g
        elif bv.ndim == 2:
            ga, gb = bv @ g, np.outer(av, g)
        else:
            ga, gb = g * bv, g * av
        _accumulate(a, ga)
        _accumulate(b, gb)

    return _make(av @ bv, "matmul", (a, b), backward_fn)


# ============================================================================
# Normalization and nonlinearities
# ============================================================================

def log_softmax(a: Node) -> Node:
    """Log-softmax over the last axis, computed in max-subtracted form."""
    a = as_node(a)
    if a.value.ndim == 0:
        raise ShapeMismatchError("log_softmax: operand must have rank >= 1, got shape ()")
    shifted = a.value - a.value.max(axis=-1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))

    def backward_fn(g: np.ndarray) -> None:
        probs = np.exp(out)
        _accumulate(a, g - probs * g.sum(axis=-1, keepdims=True))

    return _make(out, "log_softmax", (a,), backward_fn)


def _sigmoid_values(x: np.ndarray) -> np.ndarray:
    # Split by sign so neither branch overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Node) -> Node:
    a = as_node(a)
    out = _sigmoid_values(np.atleast_1d(a.value)).reshape(a.shape)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, g * out * (1.0 - out))

    return _make(out, "sigmoid", (a,), backward_fn)


def softplus(a: Node) -> Node:
    """log(1 + e^x) as max(x, 0) + log1p(e^-|x|)."""
    a = as_node(a)
    x = a.value
    out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, g * _sigmoid_values(np.atleast_1d(x)).reshape(x.shape))

    return _make(out, "softplus", (a,), backward_fn)


def sigmoid_value(x: float) -> float:
    """Numerically stable logistic function on a plain float."""
    return float(_sigmoid_values(np.atleast_1d(np.float64(x)))[0])


# ============================================================================
# Indexing and reductions
# ============================================================================

def gather(a: Node, index: IndexLike, cols: Optional[IndexLike] = None) -> Node:
    """
    Select entries of a.

    With only `index`: elements of a vector, or rows of a matrix. With `cols`
    as well: the matrix entries a[index[k], cols[k]]. Duplicate indices
    accumulate additively in the backward pass.

    Raises:
        GatherIndexError: If any index is out of range
    """
    a = as_node(a)
    rows = np.asarray(index, dtype=np.int64)
    if a.value.ndim == 0:
        raise ShapeMismatchError("gather: cannot index a scalar of shape ()")
    _check_index(rows, a.shape[0], "row")

    if cols is None:
        out = a.value[rows]
        key = rows
    else:
        if a.value.ndim != 2:
            raise ShapeMismatchError(f"gather: column index needs a matrix, got shape {a.shape}")
        columns = np.asarray(cols, dtype=np.int64)
        if columns.shape != rows.shape:
            raise ShapeMismatchError(
                f"gather: row index shape {rows.shape} and column index shape "
                f"{columns.shape} differ"
            )
        _check_index(columns, a.shape[1], "column")
        out = a.value[rows, columns]
        key = (rows, columns)

    def backward_fn(g: np.ndarray) -> None:
        contribution = np.zeros_like(a.value)
        np.add.at(contribution, key, g)
        _accumulate(a, contribution)

    return _make(np.array(out, dtype=np.float64), "gather", (a,), backward_fn)


def sum(a: Node) -> Node:  # noqa: A001 - mirrors the op catalog name
    a = as_node(a)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, np.full(a.shape, float(g)))

    return _make(a.value.sum(), "sum", (a,), backward_fn)


def mean(a: Node) -> Node:
    a = as_node(a)
    count = max(a.value.size, 1)

    def backward_fn(g: np.ndarray) -> None:
        _accumulate(a, np.full(a.shape, float(g) / count))

    return _make(a.value.mean(), "mean", (a,), backward_fn)


def detach(a: Node) -> Node:
    """Stop-gradient: same value, zero gradient to `a`."""
    a = as_node(a)
    parents = (a,) if is_recording() else ()
    return Node(a.value.copy(), op="detach", parents=parents, detached=True)


# ============================================================================
# Backward
# ============================================================================

def _topological_order(seed: Node) -> list[Node]:
    order: list[Node] = []
    visited: set[int] = set()
    stack: list[tuple[Node, bool]] = [(seed, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(seed: Node) -> None:
    """
    Populate `grad` on every node reachable from a scalar seed.

    Gradients of reachable nodes are reset before accumulation, so each call
    yields d(seed)/d(node) afresh. Nodes reached only through a detached node
    end with an all-zero gradient.

    Raises:
        NonScalarSeedError: If seed is not a scalar
    """
    if seed.shape != ():
        raise NonScalarSeedError(f"backward needs a scalar seed, got shape {seed.shape}")

    order = _topological_order(seed)
    for node in order:
        node.zero_grad()
    seed.grad = np.ones_like(seed.value)

    for node in reversed(order):
        if node.detached or node.backward_fn is None:
            continue
        node.backward_fn(node.grad)

    logger.debug(f"Backward visited {len(order)} nodes")
