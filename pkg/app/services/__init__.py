"""Preference lab service layer."""

from app.services.comparison_service import ComparisonResult, ComparisonService, export_curves
from app.services.objectives import (
    acpo_alpha,
    acpo_analytic_gradient,
    acpo_loss,
    beta_dpo_loss,
    build_objective,
    dpo_loss,
    dpo_shift_loss,
    ipo_loss,
    parse_objective_kind,
    simpo_loss,
)
from app.services.policy_service import (
    clone_as_reference,
    init_model,
    next_token_log_probs,
    seq_log_prob,
    sequence_log_probs,
)
from app.services.reward_service import (
    RewardService,
    advantage_target,
    avg_step_advantage,
    implicit_reward,
)
from app.services.synthdata_service import (
    gen_dataset,
    make_world,
    planted_log_likelihood,
    planted_mapping,
    regenerate,
    sample_pair,
)
from app.services.trainer_service import TrainerService, TrainResult, train
from app.services.verification_service import VerificationService

__all__ = [
    "ComparisonResult",
    "ComparisonService",
    "export_curves",
    "acpo_alpha",
    "acpo_analytic_gradient",
    "acpo_loss",
    "beta_dpo_loss",
    "build_objective",
    "dpo_loss",
    "dpo_shift_loss",
    "ipo_loss",
    "parse_objective_kind",
    "simpo_loss",
    "clone_as_reference",
    "init_model",
    "next_token_log_probs",
    "seq_log_prob",
    "sequence_log_probs",
    "RewardService",
    "advantage_target",
    "avg_step_advantage",
    "implicit_reward",
    "gen_dataset",
    "make_world",
    "planted_log_likelihood",
    "planted_mapping",
    "regenerate",
    "sample_pair",
    "TrainerService",
    "TrainResult",
    "train",
    "VerificationService",
]
