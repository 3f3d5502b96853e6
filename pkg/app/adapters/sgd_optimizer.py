"""Plain gradient-descent optimizer adapter."""

import numpy as np

from app.exceptions import FrozenModelError
from app.models import Node, OptimizerKind
from app.ports import IOptimizer


class SgdOptimizer(IOptimizer):
    """p <- p - lr * g, kept for ablations against Adam."""

    kind = OptimizerKind.SGD

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError(f"Learning rate must be positive, got {learning_rate}")
        self.learning_rate = learning_rate
        self._steps = 0

    @property
    def steps_taken(self) -> int:
        return self._steps

    def step(self, params: dict[str, Node]) -> None:
        for node in params.values():
            if not node.requires_grad:
                raise FrozenModelError("Cannot update a frozen parameter")
            grad = node.grad if node.grad is not None else np.zeros_like(node.value)
            node.value = node.value - self.learning_rate * grad
        self._steps += 1
