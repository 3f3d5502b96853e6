"""Policy model port."""

import abc
from typing import Sequence

import numpy as np

from app.models import Node, PolicyKind, Vocab


class IPolicyModel(abc.ABC):
    """
    Port: Abstract contract for an autoregressive token policy.

    A policy owns its trainable parameters as persistent leaf nodes; every
    forward call builds a fresh graph on top of them. A frozen policy exposes
    constant leaves and must never be updated.
    """

    kind: PolicyKind

    @property
    @abc.abstractmethod
    def vocab(self) -> Vocab:
        """Token alphabet of the policy."""
        pass

    @property
    @abc.abstractmethod
    def frozen(self) -> bool:
        """Whether the policy is a frozen reference copy."""
        pass

    @abc.abstractmethod
    def parameters(self) -> dict[str, Node]:
        """
        Ordered mapping of parameter name to leaf node.

        Returns:
            Parameters in checkpoint order
        """
        pass

    @abc.abstractmethod
    def dimensions(self) -> dict[str, int]:
        """
        Structural dimensions needed to rebuild the policy.

        Returns:
            Mapping such as {"vocab": 32, "embed_dim": 16, ...}
        """
        pass

    @abc.abstractmethod
    def context_log_probs(self, prefixes: Sequence[Sequence[int]]) -> Node:
        """
        Next-token log-probability rows for a batch of conditioning prefixes.

        Args:
            prefixes: One prefix [x; y_<t] per scored position

        Returns:
            Node of shape (len(prefixes), V) whose rows exponentiate to 1

        Raises:
            EmptySequenceError: If the policy needs context a prefix lacks
        """
        pass

    @abc.abstractmethod
    def clone(self, frozen: bool) -> "IPolicyModel":
        """
        Deep copy of the policy.

        Args:
            frozen: Whether the copy is a frozen reference

        Returns:
            Independent policy with identical parameter values
        """
        pass

    def parameter_count(self) -> int:
        return int(sum(p.value.size for p in self.parameters().values()))

    def flat_parameters(self) -> np.ndarray:
        """Row-major concatenation of all parameter values."""
        return np.concatenate([p.value.ravel() for p in self.parameters().values()])
