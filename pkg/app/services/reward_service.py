"""Implicit rewards and the length-adaptive advantage target."""

import logging
from typing import Hashable, Optional, Sequence

import numpy as np

from app.autodiff import engine as ge
from app.exceptions import VocabMismatchError
from app.models import Node, ObjectiveConfig, PreferencePair, RewardPack, TauMode
from app.ports import IPolicyModel
from app.services.policy_service import TokensLike, seq_log_prob, sequence_log_probs


logger = logging.getLogger(__name__)


def _check_vocab(model: IPolicyModel, ref: IPolicyModel) -> None:
    if model.vocab != ref.vocab:
        raise VocabMismatchError(
            f"Policy vocabulary {model.vocab.size} differs from reference {ref.vocab.size}"
        )


def implicit_reward(
    model: IPolicyModel,
    ref: IPolicyModel,
    x: TokensLike,
    y: TokensLike,
    beta: float,
) -> Node:
    """
    beta * (log pi_theta(y|x) - log pi_ref(y|x)); the reference term is a constant.

    Raises:
        VocabMismatchError: If the policies use different vocabularies
    """
    _check_vocab(model, ref)
    logp = seq_log_prob(model, x, y, grad=True)
    logp_ref = seq_log_prob(ref, x, y, grad=False).item()
    return ge.scale(ge.subtract(logp, ge.constant(logp_ref)), beta)


def avg_step_advantage(r: float, length: int) -> float:
    """Implicit reward per generated token."""
    if length < 1:
        raise ValueError(f"Sequence length must be at least 1, got {length}")
    return r / length


def advantage_target(len_w: int, len_l: int, delta: float) -> float:
    """Length-adaptive target margin delta * (|y_w| + |y_l|)."""
    if len_w < 1 or len_l < 1:
        raise ValueError(f"Sequence lengths must be at least 1, got ({len_w}, {len_l})")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return delta * (len_w + len_l)


def resolve_targets(packs: Sequence[RewardPack], config: ObjectiveConfig) -> list[float]:
    """
    Target margin used for each pair under the configured tau mode.

    pair: the pack's own tau; batch: the batch mean of the per-pair taus;
    static: the constant static_margin.
    """
    if config.tau_mode == TauMode.BATCH:
        batch_tau = float(np.mean([p.tau for p in packs]))
        return [batch_tau] * len(packs)
    if config.tau_mode == TauMode.STATIC:
        return [config.static_margin] * len(packs)
    return [p.tau for p in packs]


class RewardService:
    """
    Builds reward packs for batches of preference pairs.

    Reference log-probs are computed without recording a graph and cached per
    batch key; the cache is meant to be cleared at every epoch boundary.
    """

    def __init__(self, config: ObjectiveConfig):
        self.config = config
        self._reference_cache: dict[Hashable, tuple[list[PreferencePair], list[float]]] = {}

    @staticmethod
    def _requests(pairs: Sequence[PreferencePair]):
        requests = []
        for pair in pairs:
            requests.append((pair.prompt, pair.chosen))
            requests.append((pair.prompt, pair.rejected))
        return requests

    def reference_log_probs(
        self,
        ref: IPolicyModel,
        pairs: Sequence[PreferencePair],
        cache_key: Optional[Hashable] = None,
    ) -> list[float]:
        """Interleaved [chosen_0, rejected_0, chosen_1, ...] reference log-probs."""
        if cache_key is not None and cache_key in self._reference_cache:
            return self._reference_cache[cache_key][1]
        values = [node.item() for node in sequence_log_probs(ref, self._requests(pairs), grad=False)]
        if cache_key is not None:
            self._reference_cache[cache_key] = (list(pairs), values)
        return values

    def clear_cache(self) -> None:
        self._reference_cache.clear()

    def audit_reference(self, ref: IPolicyModel) -> bool:
        """Recompute every cached entry and compare bitwise."""
        for pairs, cached in self._reference_cache.values():
            fresh = [node.item() for node in sequence_log_probs(ref, self._requests(pairs), grad=False)]
            if fresh != cached:
                return False
        return True

    def build_packs(
        self,
        model: IPolicyModel,
        ref: IPolicyModel,
        pairs: Sequence[PreferencePair],
        cache_key: Optional[Hashable] = None,
    ) -> list[RewardPack]:
        """
        Score a batch under policy and reference.

        Args:
            model: Trainable policy
            ref: Frozen reference policy
            pairs: Non-empty batch
            cache_key: Key for the reference cache (None disables caching)

        Returns:
            One RewardPack per pair, in batch order
        """
        _check_vocab(model, ref)
        if not pairs:
            raise ValueError("Cannot build rewards for an empty batch")
        beta = self.config.beta
        policy_lps = sequence_log_probs(model, self._requests(pairs), grad=True)
        ref_lps = self.reference_log_probs(ref, pairs, cache_key)

        packs = []
        for i, pair in enumerate(pairs):
            logp_w, logp_l = policy_lps[2 * i], policy_lps[2 * i + 1]
            ref_w, ref_l = ref_lps[2 * i], ref_lps[2 * i + 1]
            packs.append(
                RewardPack(
                    r_w=ge.scale(ge.subtract(logp_w, ge.constant(ref_w)), beta),
                    r_l=ge.scale(ge.subtract(logp_l, ge.constant(ref_l)), beta),
                    logp_w=logp_w,
                    logp_l=logp_l,
                    logp_w_ref=ref_w,
                    logp_l_ref=ref_l,
                    len_w=len(pair.chosen),
                    len_l=len(pair.rejected),
                    tau=advantage_target(len(pair.chosen), len(pair.rejected), self.config.delta),
                )
            )
        return packs
