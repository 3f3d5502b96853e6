"""Optimizer port."""

import abc

from app.models import Node, OptimizerKind


class IOptimizer(abc.ABC):
    """
    Port: Abstract contract for a first-order parameter update rule.

    Implementations read `grad` from each parameter leaf and replace its
    `value` with the updated array.
    """

    kind: OptimizerKind

    @abc.abstractmethod
    def step(self, params: dict[str, Node]) -> None:
        """
        Apply one update to every parameter.

        Args:
            params: Trainable leaves whose grads are populated

        Raises:
            FrozenModelError: If any parameter is not trainable
        """
        pass

    @property
    @abc.abstractmethod
    def steps_taken(self) -> int:
        """Number of updates applied so far."""
        pass
