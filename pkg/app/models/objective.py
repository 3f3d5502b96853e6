"""Objective domain models: configuration, reward packs and loss breakdowns."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.models.graph import Node


FORMAL_ALPHA_WINDOW = (0.0, 1.0)
EMPIRICAL_ALPHA_WINDOW = (0.3, 0.95)


class ObjectiveKind(str, Enum):
    """Preference objectives available to the trainer."""
    DPO = "dpo"
    IPO = "ipo"
    SIMPO = "simpo"
    BETA_DPO = "beta-dpo"
    DPO_SHIFT = "dpo-shift"
    ACPO = "acpo"


class TauMode(str, Enum):
    """Granularity of the advantage target used by ACPO."""
    PAIR = "pair"  # tau per pair, alpha per pair
    BATCH = "batch"  # batch-mean tau, one alpha per batch
    STATIC = "static"  # constant margin, ablation of the length target


class ShiftMode(str, Enum):
    """Reading of the DPO-Shift coefficient."""
    MULTIPLICATIVE = "multiplicative"  # u = r_w - lambda * r_l
    ADDITIVE = "additive"  # u = r_w - r_l - lambda


class ObjectiveConfig(BaseModel):
    """
    Hyperparameters of every objective.

    Attributes:
        beta: KL coefficient shared by the reference-based objectives
        delta: Per-token advantage target
        epsilon: Floor on |r_l| in the alpha denominator
        alpha_lo, alpha_hi: Clamp window for alpha
        detach_alpha: Stop-gradient on alpha; False only for fault injection
    """

    kind: ObjectiveKind = ObjectiveKind.DPO
    beta: float = Field(default=0.1, gt=0)
    delta: float = Field(default=0.1, gt=0)
    epsilon: float = Field(default=1e-5, gt=0)
    alpha_lo: float = 0.0
    alpha_hi: float = 1.0
    tau_mode: TauMode = TauMode.PAIR
    static_margin: float = 0.1
    detach_alpha: bool = True

    simpo_beta: float = Field(default=2.0, gt=0)
    gamma: float = 0.5

    shift_lambda: float = 0.95
    shift_mode: ShiftMode = ShiftMode.MULTIPLICATIVE

    beta_dpo_c: float = Field(default=0.1, ge=0)
    beta_dpo_decay: float = Field(default=0.9, ge=0, lt=1)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_ranges(self) -> "ObjectiveConfig":
        if not (0.0 <= self.alpha_lo <= self.alpha_hi <= 1.0):
            raise ValueError(
                f"alpha bounds must satisfy 0 <= alpha_lo <= alpha_hi <= 1, "
                f"got [{self.alpha_lo}, {self.alpha_hi}]"
            )
        if not (0.0 < self.shift_lambda <= 1.0):
            raise ValueError(f"shift lambda must be in (0, 1], got {self.shift_lambda}")
        return self


@dataclass
class RewardPack:
    """
    Implicit rewards of one preference pair.

    r_w and r_l are differentiable; the reference log-probs and tau are plain
    numbers. logp_w / logp_l are the raw policy log-probs (used by SimPO).
    """
    r_w: Node
    r_l: Node
    logp_w: Node
    logp_l: Node
    logp_w_ref: float
    logp_l_ref: float
    len_w: int
    len_l: int
    tau: float


@dataclass(frozen=True)
class AlphaRecord:
    """Closed-form calibration coefficient before and after clamping."""
    alpha_raw: float
    alpha_hat: float
    clamped_lo: bool
    clamped_hi: bool
    denom_floored: bool


@dataclass(frozen=True)
class BetaDpoState:
    """Running statistics of the beta-DPO margin (None until the first batch)."""
    margin_ema: Optional[float] = None


@dataclass
class LossBreakdown:
    """Batch loss plus the per-pair quantities that produced it."""
    loss: Node
    margins: list[float] = field(default_factory=list)
    alphas: Optional[list[AlphaRecord]] = None
    effective_beta: Optional[float] = None
    beta_state: Optional[BetaDpoState] = None
