"""Domain models for the preference lab."""

from app.models.graph import GraphArena, Node, is_recording, no_grad
from app.models.manifest import RunManifest
from app.models.objective import (
    EMPIRICAL_ALPHA_WINDOW,
    FORMAL_ALPHA_WINDOW,
    AlphaRecord,
    BetaDpoState,
    LossBreakdown,
    ObjectiveConfig,
    ObjectiveKind,
    RewardPack,
    ShiftMode,
    TauMode,
)
from app.models.policy import MlpDims, PolicyKind, TokenSeq, Vocab
from app.models.preference import (
    DATASET_FORMAT,
    CorruptionMode,
    Dataset,
    PreferencePair,
    WorldSpec,
    overlap_prefix_len,
)
from app.models.training import (
    TELEMETRY_COLUMNS,
    OptimizerKind,
    TelemetryRow,
    TelemetryTable,
    TrainConfig,
)
from app.models.verification import GradCheckReport, PropertyResult, VerificationReport

__all__ = [
    "GraphArena",
    "Node",
    "is_recording",
    "no_grad",
    "RunManifest",
    "EMPIRICAL_ALPHA_WINDOW",
    "FORMAL_ALPHA_WINDOW",
    "AlphaRecord",
    "BetaDpoState",
    "LossBreakdown",
    "ObjectiveConfig",
    "ObjectiveKind",
    "RewardPack",
    "ShiftMode",
    "TauMode",
    "MlpDims",
    "PolicyKind",
    "TokenSeq",
    "Vocab",
    "DATASET_FORMAT",
    "CorruptionMode",
    "Dataset",
    "PreferencePair",
    "WorldSpec",
    "overlap_prefix_len",
    "TELEMETRY_COLUMNS",
    "OptimizerKind",
    "TelemetryRow",
    "TelemetryTable",
    "TrainConfig",
    "GradCheckReport",
    "PropertyResult",
    "VerificationReport",
]
