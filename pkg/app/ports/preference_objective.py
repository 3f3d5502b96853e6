"""Preference objective port."""

import abc

from app.models import LossBreakdown, ObjectiveConfig, ObjectiveKind, RewardPack


class IPreferenceObjective(abc.ABC):
    """
    Port: Abstract contract for a pairwise preference loss.

    An objective maps one batch of reward packs to a scalar loss node.
    Stateful objectives (beta-DPO) advance their statistics on every call.
    """

    kind: ObjectiveKind

    def __init__(self, config: ObjectiveConfig):
        self.config = config

    @abc.abstractmethod
    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        """
        Build the batch-mean loss.

        Args:
            packs: Non-empty batch of reward packs

        Returns:
            LossBreakdown with the loss node and per-pair margins

        Raises:
            ValueError: If packs is empty
        """
        pass

    def reset(self) -> None:
        """Forget running statistics."""
        pass
