"""Shared tests for policy model implementations.

Tests both bigram and MLP adapters using parametrized fixtures.
"""

import numpy as np
import pytest

from app.autodiff import engine as ge
from app.exceptions import EmptySequenceError
from app.models import PolicyKind, no_grad
from app.ports import IPolicyModel


PREFIXES = [(0,), (1, 2), (3, 4, 5, 6), (7, 7, 7)]


class TestPolicyModel:
    """Contract tests for IPolicyModel."""

    def test_rows_are_normalized(self, policy: IPolicyModel):
        """Test that every next-token row exponentiates to a distribution."""
        table = policy.context_log_probs(PREFIXES)

        assert table.shape == (len(PREFIXES), policy.vocab.size)
        np.testing.assert_allclose(np.exp(table.value).sum(axis=1), 1.0, atol=1e-9)

    def test_parameters_are_trainable_leaves(self, policy):
        """Test that a fresh policy exposes trainable parameters."""
        params = policy.parameters()

        assert params
        assert all(node.requires_grad for node in params.values())
        assert policy.parameter_count() == sum(node.value.size for node in params.values())
        assert policy.flat_parameters().shape == (policy.parameter_count(),)

    def test_parameter_count_formula(self, policy):
        """Test the parameter count of each family."""
        v = policy.vocab.size
        if policy.kind == PolicyKind.BIGRAM:
            assert policy.parameter_count() == v * v
        else:
            d = policy.dimensions()
            e, w, h = d["embed_dim"], d["window"], d["hidden"]
            assert policy.parameter_count() == v * e + w * e * h + h + h * v + v

    def test_frozen_clone_is_independent(self, policy):
        """Test that updating the policy never reaches its frozen clone."""
        ref = policy.clone(frozen=True)
        before = ref.flat_parameters().copy()

        for node in policy.parameters().values():
            node.value = node.value + 1.0

        assert ref.frozen is True
        assert not any(node.requires_grad for node in ref.parameters().values())
        np.testing.assert_array_equal(ref.flat_parameters(), before)

    def test_clone_preserves_distribution(self, policy):
        """Test that a clone scores contexts identically."""
        clone = policy.clone(frozen=False)

        np.testing.assert_array_equal(
            clone.context_log_probs(PREFIXES).value,
            policy.context_log_probs(PREFIXES).value,
        )

    def test_gradient_flows_to_parameters(self, policy):
        """Test that backward through a log-prob reaches the parameters."""
        table = policy.context_log_probs(PREFIXES)
        ge.backward(ge.sum(ge.gather(table, [0, 1, 2, 3], [1, 2, 3, 4])))

        grads = [node.grad for node in policy.parameters().values()]
        assert any(np.any(g != 0) for g in grads)

    def test_no_grad_records_nothing(self, policy):
        """Test that scoring under no_grad builds no graph."""
        with no_grad():
            table = policy.context_log_probs(PREFIXES)

        assert table.parents == ()
        assert table.requires_grad is False

    def test_empty_prefix(self, policy):
        """Test empty-context handling: bigram rejects it, MLP pads it."""
        if policy.kind == PolicyKind.BIGRAM:
            with pytest.raises(EmptySequenceError):
                policy.context_log_probs([()])
        else:
            table = policy.context_log_probs([()])
            assert np.exp(table.value).sum() == pytest.approx(1.0, abs=1e-12)
