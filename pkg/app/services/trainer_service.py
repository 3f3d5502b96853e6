"""Mini-batch preference training with per-step telemetry."""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from app.adapters import InMemoryTelemetrySink, build_optimizer
from app.exceptions import (
    InvalidConfigurationError,
    InvalidPolicyError,
    NonFiniteLossError,
    ReferenceDriftError,
)
from app.models import (
    Dataset,
    GraphArena,
    LossBreakdown,
    ObjectiveKind,
    PreferencePair,
    RewardPack,
    TelemetryRow,
    TelemetryTable,
    TrainConfig,
)
from app.ports import IOptimizer, IPolicyModel, IPreferenceObjective, ITelemetrySink
from app.services.objectives import build_objective
from app.services.reward_service import RewardService


logger = logging.getLogger(__name__)

SATURATION_WARNING = 0.9


@dataclass
class TrainResult:
    """Trained policy and the telemetry of every step."""
    model: IPolicyModel
    table: TelemetryTable


@dataclass(frozen=True)
class Batch:
    """One mini-batch with its position in the shuffled schedule."""
    batch_id: str
    indices: tuple[int, ...]
    pairs: list[PreferencePair]
    epoch_start: bool


def iterate_batches(dataset: Dataset, batch_size: int, seed: int) -> Iterator[Batch]:
    """
    Endless seeded-shuffled batch schedule.

    Every epoch visits each pair once in a fresh permutation; the last batch
    of an epoch may be partial.
    """
    rng = np.random.default_rng(seed)
    epoch = 0
    while True:
        order = rng.permutation(len(dataset))
        for k, start in enumerate(range(0, len(order), batch_size)):
            indices = tuple(int(i) for i in order[start:start + batch_size])
            yield Batch(
                batch_id=f"e{epoch}b{k}",
                indices=indices,
                pairs=[dataset.pairs[i] for i in indices],
                epoch_start=k == 0,
            )
        epoch += 1


def telemetry_row(step: int, packs: list[RewardPack], breakdown: LossBreakdown) -> TelemetryRow:
    """Batch statistics of one step, measured before the update."""
    mean_r_w = float(np.mean([p.r_w.item() for p in packs]))
    mean_r_l = float(np.mean([p.r_l.item() for p in packs]))
    row = TelemetryRow(
        step=step,
        loss=breakdown.loss.item(),
        mean_r_w=mean_r_w,
        mean_r_l=mean_r_l,
        mean_margin=mean_r_w - mean_r_l,
        mean_logp_w=float(np.mean([p.logp_w.item() for p in packs])),
        mean_logp_l=float(np.mean([p.logp_l.item() for p in packs])),
        effective_beta=breakdown.effective_beta,
    )
    if breakdown.alphas:
        alphas = np.array([a.alpha_hat for a in breakdown.alphas])
        row.mean_alpha = float(alphas.mean())
        row.min_alpha = float(alphas.min())
        row.max_alpha = float(alphas.max())
        row.frac_alpha_lo = float(np.mean([a.clamped_lo for a in breakdown.alphas]))
        row.frac_alpha_hi = float(np.mean([a.clamped_hi for a in breakdown.alphas]))
    return row


class TrainerService:
    """
    Runs the training loop for one objective.

    Attributes:
        config: Training configuration
        objective: Loss to minimize
        optimizer: Update rule applied to the policy parameters
        sink: Receives one TelemetryRow per step
    """

    def __init__(
        self,
        config: TrainConfig,
        optimizer: Optional[IOptimizer] = None,
        sink: Optional[ITelemetrySink] = None,
        objective: Optional[IPreferenceObjective] = None,
    ):
        self.config = config
        self.objective = objective or build_objective(config.objective)
        self.optimizer = optimizer or build_optimizer(config.optimizer, config.learning_rate)
        self.sink = sink or InMemoryTelemetrySink()
        self.rewards = RewardService(config.objective)

    def train(self, model: IPolicyModel, ref: IPolicyModel, dataset: Dataset) -> TrainResult:
        """
        Optimize `model` in place against the frozen `ref`.

        Raises:
            InvalidPolicyError: If ref is not frozen
            InvalidConfigurationError: If the dataset is empty
            NonFiniteLossError: If a batch loss is NaN or infinite
            ReferenceDriftError: If reference log-probs changed during training
        """
        if not ref.frozen:
            raise InvalidPolicyError("Reference policy must be frozen")
        if len(dataset) == 0:
            raise InvalidConfigurationError("Cannot train on an empty dataset")

        cfg = self.config
        kind = cfg.objective.kind
        logger.info(
            f"Training {kind.value} for {cfg.steps} steps "
            f"(batch {cfg.batch_size}, lr {cfg.learning_rate}, {cfg.optimizer.value}, seed {cfg.seed})"
        )
        self.objective.reset()
        params = model.parameters()
        schedule = iterate_batches(dataset, cfg.batch_size, cfg.seed)

        try:
            for step in range(cfg.steps):
                batch = next(schedule)
                if batch.epoch_start:
                    self.rewards.clear_cache()
                with GraphArena() as arena:
                    packs = self.rewards.build_packs(model, ref, batch.pairs, cache_key=batch.indices)
                    breakdown = self.objective.compute(packs)
                    loss = breakdown.loss.item()
                    if not math.isfinite(loss):
                        raise NonFiniteLossError(step, batch.batch_id, loss)
                    row = telemetry_row(step, packs, breakdown)
                    self.sink.write(row)
                    arena.backward(breakdown.loss)
                self.optimizer.step(params)
                self._log_progress(row, kind)
        finally:
            self.sink.close()

        if cfg.steps > 0 and not self.rewards.audit_reference(ref):
            raise ReferenceDriftError("Reference log-probabilities changed during training")
        logger.info(f"Finished {kind.value}: {cfg.steps} steps")
        return TrainResult(model=model, table=self.sink.table())

    def _log_progress(self, row: TelemetryRow, kind: ObjectiveKind) -> None:
        if row.step % self.config.log_every != 0:
            return
        logger.info(
            f"step {row.step}: loss={row.loss:.6f} r_w={row.mean_r_w:.4f} "
            f"r_l={row.mean_r_l:.4f} margin={row.mean_margin:.4f} logp_w={row.mean_logp_w:.4f}"
        )
        if kind == ObjectiveKind.ACPO and row.frac_alpha_lo is not None:
            saturated = row.frac_alpha_lo + row.frac_alpha_hi
            if saturated >= SATURATION_WARNING:
                logger.warning(f"step {row.step}: {saturated:.0%} of alpha values clamped")


def train(
    model: IPolicyModel,
    ref: IPolicyModel,
    dataset: Dataset,
    config: TrainConfig,
    sink: Optional[ITelemetrySink] = None,
    optimizer: Optional[IOptimizer] = None,
) -> TrainResult:
    """Train with the objective and optimizer named by the config."""
    return TrainerService(config, optimizer=optimizer, sink=sink).train(model, ref, dataset)
