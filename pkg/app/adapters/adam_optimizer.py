"""Adaptive-moment optimizer adapter."""

import logging
from dataclasses import dataclass, field

import numpy as np

from app.exceptions import FrozenModelError
from app.models import Node, OptimizerKind
from app.ports import IOptimizer


logger = logging.getLogger(__name__)

BETA1 = 0.9
BETA2 = 0.999
STABILIZER = 1e-8


@dataclass
class AdamState:
    """First and second moment estimates plus the update count."""
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_update(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
) -> tuple[list[np.ndarray], AdamState]:
    """
    One bias-corrected adaptive-moment step.

        m = b1 m + (1 - b1) g
        v = b2 v + (1 - b2) g^2
        p = p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)

    Inputs are not modified; new arrays and a new state are returned.

    Raises:
        ValueError: If params and grads disagree in count or shape
    """
    if len(params) != len(grads):
        raise ValueError(f"Got {len(params)} parameters but {len(grads)} gradients")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"Parameter shape {p.shape} does not match gradient shape {g.shape}")

    m_prev = state.m or [np.zeros_like(p) for p in params]
    v_prev = state.v or [np.zeros_like(p) for p in params]
    t = state.t + 1
    correction1 = 1.0 - BETA1 ** t
    correction2 = 1.0 - BETA2 ** t

    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, m_prev, v_prev):
        m = BETA1 * m + (1.0 - BETA1) * g
        v = BETA2 * v + (1.0 - BETA2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + STABILIZER))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(t=t, m=new_m, v=new_v)


class AdamOptimizer(IOptimizer):
    """Adam over a fixed, ordered set of parameter leaves."""

    kind = OptimizerKind.ADAM

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError(f"Learning rate must be positive, got {learning_rate}")
        self.learning_rate = learning_rate
        self.state = AdamState()

    @property
    def steps_taken(self) -> int:
        return self.state.t

    def step(self, params: dict[str, Node]) -> None:
        nodes = list(params.values())
        if any(not node.requires_grad for node in nodes):
            raise FrozenModelError("Cannot update a frozen parameter")
        values = [node.value for node in nodes]
        grads = [node.grad if node.grad is not None else np.zeros_like(node.value) for node in nodes]
        updated, self.state = adam_update(values, grads, self.state, self.learning_rate)
        for node, value in zip(nodes, updated):
            node.value = value
