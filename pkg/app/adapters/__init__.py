"""Adapters (concrete implementations of the ports)."""

from app.adapters.adam_optimizer import AdamOptimizer, AdamState, adam_update
from app.adapters.bigram_policy import BigramPolicy
from app.adapters.csv_telemetry_sink import CsvTelemetrySink, export_csv, read_csv
from app.adapters.in_memory_checkpoint_store import InMemoryCheckpointStore
from app.adapters.in_memory_dataset_repository import InMemoryDatasetRepository
from app.adapters.in_memory_telemetry_sink import InMemoryTelemetrySink
from app.adapters.mlp_policy import MlpPolicy
from app.adapters.optimizer_factory import build_optimizer
from app.adapters.policy_factory import build_policy, expected_shapes
from app.adapters.sgd_optimizer import SgdOptimizer
from app.adapters.text_checkpoint_store import TextCheckpointStore
from app.adapters.text_dataset_repository import TextDatasetRepository

__all__ = [
    "AdamOptimizer",
    "AdamState",
    "adam_update",
    "BigramPolicy",
    "CsvTelemetrySink",
    "export_csv",
    "read_csv",
    "InMemoryCheckpointStore",
    "InMemoryDatasetRepository",
    "InMemoryTelemetrySink",
    "MlpPolicy",
    "build_optimizer",
    "build_policy",
    "expected_shapes",
    "SgdOptimizer",
    "TextCheckpointStore",
    "TextDatasetRepository",
]
