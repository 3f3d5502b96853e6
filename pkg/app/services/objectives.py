"""
Preference objectives: ACPO and the DPO-family baselines.

Every loss is the arithmetic mean over pairs of a per-pair term. The
DPO-family terms are softplus(-u) = -log sigmoid(u) for a margin argument u.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from app.autodiff import engine as ge
from app.exceptions import InvalidConfigurationError, UnknownObjectiveError
from app.models import (
    AlphaRecord,
    BetaDpoState,
    LossBreakdown,
    Node,
    ObjectiveConfig,
    ObjectiveKind,
    RewardPack,
    ShiftMode,
    TauMode,
)
from app.ports import IPreferenceObjective
from app.services.reward_service import resolve_targets


logger = logging.getLogger(__name__)


def _require_batch(packs: Sequence[RewardPack]) -> None:
    if not packs:
        raise ValueError("Objective needs a non-empty batch")


def _batch_mean(terms: list[Node]) -> Node:
    total = terms[0]
    for term in terms[1:]:
        total = ge.add(total, term)
    return ge.scale(total, 1.0 / len(terms))


def _sigmoid_family(margins: list[Node]) -> Node:
    return _batch_mean([ge.softplus(ge.neg(u)) for u in margins])


def dpo_loss(packs: Sequence[RewardPack]) -> LossBreakdown:
    """mean of softplus(-(r_w - r_l))."""
    _require_batch(packs)
    margins = [ge.subtract(p.r_w, p.r_l) for p in packs]
    return LossBreakdown(loss=_sigmoid_family(margins), margins=[u.item() for u in margins])


def ipo_loss(packs: Sequence[RewardPack], beta: float) -> LossBreakdown:
    """
    mean of (D - 1/(2 beta))^2 with D = (r_w - r_l) / beta the raw log-ratio margin.

    The margins recorded in the breakdown are the D values.
    """
    _require_batch(packs)
    target = ge.constant(1.0 / (2.0 * beta))
    raw = [ge.scale(ge.subtract(p.r_w, p.r_l), 1.0 / beta) for p in packs]
    terms = []
    for d in raw:
        gap = ge.subtract(d, target)
        terms.append(ge.multiply(gap, gap))
    return LossBreakdown(loss=_batch_mean(terms), margins=[d.item() for d in raw])


def simpo_loss(packs: Sequence[RewardPack], simpo_beta: float, gamma: float) -> LossBreakdown:
    """
    Reference-free, length-normalized loss:
    mean of softplus(-(b/|y_w| log pi(y_w) - b/|y_l| log pi(y_l) - gamma)).
    """
    _require_batch(packs)
    offset = ge.constant(gamma)
    margins = [
        ge.subtract(
            ge.subtract(
                ge.scale(p.logp_w, simpo_beta / p.len_w),
                ge.scale(p.logp_l, simpo_beta / p.len_l),
            ),
            offset,
        )
        for p in packs
    ]
    return LossBreakdown(loss=_sigmoid_family(margins), margins=[u.item() for u in margins])


def adapted_beta(
    beta: float,
    batch_margin: float,
    margin_ema: float,
    c: float,
) -> float:
    """beta * (1 + c * (batch_margin - margin_ema)), clamped to [beta/2, 2 beta]."""
    proposed = beta * (1.0 + c * (batch_margin - margin_ema))
    return min(max(proposed, beta / 2.0), 2.0 * beta)


def beta_dpo_loss(
    packs: Sequence[RewardPack],
    state: BetaDpoState,
    config: ObjectiveConfig,
    pinned_beta: Optional[float] = None,
) -> LossBreakdown:
    """
    DPO with a per-batch adaptive beta.

    The running statistic is the EMA of the mean raw log-ratio margin
    (r_w - r_l) / beta. On the first batch the EMA starts at the batch mean,
    so beta_t = beta. Rewards are rescaled by beta_t / beta; beta_t itself is
    a constant of the graph.

    Returns:
        Breakdown whose beta_state holds the advanced EMA
    """
    _require_batch(packs)
    beta = config.beta
    raw_margins = [(p.r_w.item() - p.r_l.item()) / beta for p in packs]
    batch_margin = float(np.mean(raw_margins))
    ema = batch_margin if state.margin_ema is None else state.margin_ema

    beta_t = adapted_beta(beta, batch_margin, ema, config.beta_dpo_c)
    if pinned_beta is not None:
        beta_t = pinned_beta
    decay = config.beta_dpo_decay
    next_state = BetaDpoState(margin_ema=decay * ema + (1.0 - decay) * batch_margin)

    factor = beta_t / beta
    margins = [ge.scale(ge.subtract(p.r_w, p.r_l), factor) for p in packs]
    return LossBreakdown(
        loss=_sigmoid_family(margins),
        margins=[u.item() for u in margins],
        effective_beta=beta_t,
        beta_state=next_state,
    )


def dpo_shift_loss(
    packs: Sequence[RewardPack],
    shift_lambda: float,
    mode: ShiftMode = ShiftMode.MULTIPLICATIVE,
) -> LossBreakdown:
    """
    multiplicative: mean of softplus(-(r_w - lambda r_l));
    additive: mean of softplus(-(r_w - r_l - lambda)).

    Raises:
        InvalidConfigurationError: If lambda is outside (0, 1]
    """
    if not 0.0 < shift_lambda <= 1.0:
        raise InvalidConfigurationError(f"shift lambda must be in (0, 1], got {shift_lambda}")
    _require_batch(packs)
    if mode == ShiftMode.ADDITIVE:
        offset = ge.constant(shift_lambda)
        margins = [ge.subtract(ge.subtract(p.r_w, p.r_l), offset) for p in packs]
    else:
        margins = [ge.subtract(p.r_w, ge.scale(p.r_l, shift_lambda)) for p in packs]
    return LossBreakdown(loss=_sigmoid_family(margins), margins=[u.item() for u in margins])


def _alpha_denominator(r_l: float, epsilon: float) -> tuple[float, bool]:
    sign = 1.0 if r_l > 0 else -1.0  # sign(0) := -1
    return sign * max(abs(r_l), epsilon), abs(r_l) < epsilon


def acpo_alpha(r_w: float, r_l: float, tau: float, config: ObjectiveConfig) -> AlphaRecord:
    """
    Closed-form calibration coefficient.

    alpha_raw = (r_w - tau) / (sign(r_l) * max(|r_l|, epsilon)), then clamped
    to [alpha_lo, alpha_hi]. Plain numbers in, plain numbers out.
    """
    denom, floored = _alpha_denominator(r_l, config.epsilon)
    raw = (r_w - tau) / denom
    hat = min(max(raw, config.alpha_lo), config.alpha_hi)
    return AlphaRecord(
        alpha_raw=raw,
        alpha_hat=hat,
        clamped_lo=raw < config.alpha_lo,
        clamped_hi=raw > config.alpha_hi,
        denom_floored=floored,
    )


def _alpha_node(record: AlphaRecord, r_w: Node, tau: float, r_l: float, config: ObjectiveConfig) -> Node:
    # Interior values keep the expression in r_w; with detach_alpha the
    # expression is cut before it reaches the loss.
    if config.alpha_lo < record.alpha_hat < config.alpha_hi:
        denom, _ = _alpha_denominator(r_l, config.epsilon)
        expression = ge.scale(ge.subtract(r_w, ge.constant(tau)), 1.0 / denom)
    else:
        expression = ge.constant(record.alpha_hat)
    return ge.detach(expression) if config.detach_alpha else expression


def _sum_nodes(nodes: list[Node]) -> Node:
    total = nodes[0]
    for node in nodes[1:]:
        total = ge.add(total, node)
    return total


def acpo_loss(
    packs: Sequence[RewardPack],
    config: ObjectiveConfig,
    pinned_alpha: Optional[Sequence[float]] = None,
) -> LossBreakdown:
    """
    mean of softplus(-(r_w - alpha_hat * r_l)).

    Under tau_mode=batch a single alpha is computed from the batch-mean
    rewards and target and shared by every pair. pinned_alpha replaces the
    computed coefficients (used to hold them fixed while differencing).
    """
    _require_batch(packs)
    taus = resolve_targets(packs, config)

    if config.tau_mode == TauMode.BATCH:
        scale = 1.0 / len(packs)
        mean_r_w = ge.scale(_sum_nodes([p.r_w for p in packs]), scale)
        mean_r_l = float(np.mean([p.r_l.item() for p in packs]))
        record = acpo_alpha(mean_r_w.item(), mean_r_l, taus[0], config)
        shared = _alpha_node(record, mean_r_w, taus[0], mean_r_l, config)
        records = [record] * len(packs)
        alpha_nodes = [shared] * len(packs)
    else:
        records, alpha_nodes = [], []
        for pack, tau in zip(packs, taus):
            record = acpo_alpha(pack.r_w.item(), pack.r_l.item(), tau, config)
            records.append(record)
            alpha_nodes.append(_alpha_node(record, pack.r_w, tau, pack.r_l.item(), config))

    if pinned_alpha is not None:
        alpha_nodes = [ge.constant(a) for a in pinned_alpha]

    margins = [ge.subtract(p.r_w, ge.multiply(a, p.r_l)) for p, a in zip(packs, alpha_nodes)]
    return LossBreakdown(
        loss=_sigmoid_family(margins),
        margins=[u.item() for u in margins],
        alphas=records,
    )


def _flat_grads(params: Sequence[Node]) -> np.ndarray:
    return np.concatenate(
        [(p.grad if p.grad is not None else np.zeros_like(p.value)).ravel() for p in params]
    )


def _zero(params: Sequence[Node]) -> None:
    for p in params:
        p.zero_grad()


def acpo_analytic_gradient(
    packs: Sequence[RewardPack],
    config: ObjectiveConfig,
    params: Sequence[Node],
) -> np.ndarray:
    """
    Gradient of acpo_loss with alpha_hat held constant, assembled by hand:

        (1/B) sum_i -(1 - sigmoid(u_i)) * (grad r_w_i - alpha_hat_i * grad r_l_i)

    Each grad r is obtained by a backward pass through that reward alone.

    Returns:
        Flat gradient in the order of `params`
    """
    breakdown = acpo_loss(packs, config)
    total = np.zeros(int(sum(p.value.size for p in params)))
    count = len(packs)
    for pack, u, record in zip(packs, breakdown.margins, breakdown.alphas):
        coefficient = -(1.0 - ge.sigmoid_value(u)) / count
        _zero(params)
        ge.backward(pack.r_w)
        grad_w = _flat_grads(params)
        _zero(params)
        ge.backward(pack.r_l)
        grad_l = _flat_grads(params)
        total += coefficient * (grad_w - record.alpha_hat * grad_l)
    return total


class DpoObjective(IPreferenceObjective):
    kind = ObjectiveKind.DPO

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        return dpo_loss(packs)


class IpoObjective(IPreferenceObjective):
    kind = ObjectiveKind.IPO

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        return ipo_loss(packs, self.config.beta)


class SimpoObjective(IPreferenceObjective):
    kind = ObjectiveKind.SIMPO

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        return simpo_loss(packs, self.config.simpo_beta, self.config.gamma)


class BetaDpoObjective(IPreferenceObjective):
    """Carries the margin EMA from batch to batch."""

    kind = ObjectiveKind.BETA_DPO

    def __init__(self, config: ObjectiveConfig):
        super().__init__(config)
        self.state = BetaDpoState()

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        breakdown = beta_dpo_loss(packs, self.state, self.config)
        self.state = breakdown.beta_state
        return breakdown

    def reset(self) -> None:
        self.state = BetaDpoState()


class DpoShiftObjective(IPreferenceObjective):
    kind = ObjectiveKind.DPO_SHIFT

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        return dpo_shift_loss(packs, self.config.shift_lambda, self.config.shift_mode)


class AcpoObjective(IPreferenceObjective):
    kind = ObjectiveKind.ACPO

    def compute(self, packs: list[RewardPack]) -> LossBreakdown:
        breakdown = acpo_loss(packs, self.config)
        saturated = sum(r.clamped_lo or r.clamped_hi for r in breakdown.alphas)
        if saturated == len(breakdown.alphas) and len(breakdown.alphas) > 1:
            logger.debug(f"All {saturated} alpha values clamped in this batch")
        return breakdown


OBJECTIVES: dict[ObjectiveKind, type[IPreferenceObjective]] = {
    ObjectiveKind.DPO: DpoObjective,
    ObjectiveKind.IPO: IpoObjective,
    ObjectiveKind.SIMPO: SimpoObjective,
    ObjectiveKind.BETA_DPO: BetaDpoObjective,
    ObjectiveKind.DPO_SHIFT: DpoShiftObjective,
    ObjectiveKind.ACPO: AcpoObjective,
}


def parse_objective_kind(name: str) -> ObjectiveKind:
    """
    Raises:
        UnknownObjectiveError: If name is not a known objective
    """
    try:
        return ObjectiveKind(name)
    except ValueError as e:
        known = ", ".join(k.value for k in ObjectiveKind)
        raise UnknownObjectiveError(f"Unknown objective '{name}' (expected one of: {known})") from e


def build_objective(config: ObjectiveConfig) -> IPreferenceObjective:
    """Instantiate the objective named by config.kind."""
    return OBJECTIVES[config.kind](config)

