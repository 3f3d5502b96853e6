"""Ports (abstract contracts) of the preference lab."""

from app.ports.checkpoint_store import ICheckpointStore
from app.ports.dataset_repository import IDatasetRepository
from app.ports.optimizer import IOptimizer
from app.ports.policy_model import IPolicyModel
from app.ports.preference_objective import IPreferenceObjective
from app.ports.telemetry_sink import ITelemetrySink

__all__ = [
    "ICheckpointStore",
    "IDatasetRepository",
    "IOptimizer",
    "IPolicyModel",
    "IPreferenceObjective",
    "ITelemetrySink",
]
