"""Training domain models."""

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from app.models.objective import ObjectiveConfig


class OptimizerKind(str, Enum):
    """Parameter update rule."""
    ADAM = "adam"
    SGD = "sgd"  # plain gradient descent, for ablation


class TrainConfig(BaseModel):
    """Everything the training loop needs besides models and data."""

    objective: ObjectiveConfig = Field(default_factory=ObjectiveConfig)
    learning_rate: float = Field(default=1e-3, gt=0)
    steps: int = Field(default=2000, ge=0)
    batch_size: int = Field(default=32, ge=1)
    seed: int = Field(default=1, ge=0)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    deterministic: bool = True
    log_every: int = Field(default=100, ge=1)
    telemetry_path: Optional[str] = None

    model_config = {"frozen": True}


@dataclass
class TelemetryRow:
    """
    Statistics of one optimization step, measured before the update.

    Alpha columns are None unless the objective is ACPO; effective_beta is
    None unless the objective is beta-DPO.
    """
    step: int
    loss: float
    mean_r_w: float
    mean_r_l: float
    mean_margin: float
    mean_logp_w: float
    mean_logp_l: float
    mean_alpha: Optional[float] = None
    min_alpha: Optional[float] = None
    max_alpha: Optional[float] = None
    frac_alpha_lo: Optional[float] = None
    frac_alpha_hi: Optional[float] = None
    effective_beta: Optional[float] = None


TELEMETRY_COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(TelemetryRow))


@dataclass
class TelemetryTable:
    """Ordered telemetry rows of one run."""
    rows: list[TelemetryRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[Optional[float]]:
        return [getattr(row, name) for row in self.rows]
