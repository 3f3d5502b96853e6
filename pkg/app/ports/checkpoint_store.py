"""Policy checkpoint store port."""

import abc

from app.ports.policy_model import IPolicyModel


class ICheckpointStore(abc.ABC):
    """
    Port: Abstract contract for persisting policy parameters.

    Loading a saved policy reproduces its kind, dimensions, frozen flag and
    every parameter value bitwise.
    """

    @abc.abstractmethod
    def save(self, model: IPolicyModel, location: str) -> None:
        """
        Persist a policy.

        Args:
            model: Policy to store
            location: Adapter-specific key or path
        """
        pass

    @abc.abstractmethod
    def load(self, location: str) -> IPolicyModel:
        """
        Load a policy.

        Args:
            location: Key or path previously passed to save

        Returns:
            Reconstructed policy

        Raises:
            CheckpointFormatError: If the stored data is malformed or missing
        """
        pass
