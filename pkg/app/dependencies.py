"""Dependency wiring for the preference lab commands."""

import logging
from functools import lru_cache
from typing import Optional

from app.adapters import (
    CsvTelemetrySink,
    InMemoryCheckpointStore,
    InMemoryDatasetRepository,
    InMemoryTelemetrySink,
    TextCheckpointStore,
    TextDatasetRepository,
    build_optimizer,
)
from app.config import AppSettings
from app.models import OptimizerKind
from app.ports import (
    ICheckpointStore,
    IDatasetRepository,
    IOptimizer,
    ITelemetrySink,
)


logger = logging.getLogger(__name__)

# Process-local stores for tests; nothing survives the process.
MEMORY_ENVIRONMENT = "memory"


# Singleton settings
@lru_cache()
def get_settings() -> AppSettings:
    """Get application settings (cached)."""
    return AppSettings()


def get_dataset_repository(settings: AppSettings) -> IDatasetRepository:
    """Text files, or an in-memory store when environment is "memory" (tests only)."""
    if settings.environment == MEMORY_ENVIRONMENT:
        return InMemoryDatasetRepository()
    return TextDatasetRepository()


def get_checkpoint_store(settings: AppSettings) -> ICheckpointStore:
    if settings.environment == MEMORY_ENVIRONMENT:
        return InMemoryCheckpointStore()
    return TextCheckpointStore()


def get_telemetry_sink(path: Optional[str]) -> ITelemetrySink:
    """CSV sink when a path is given, otherwise rows are only kept in memory."""
    if path is None:
        return InMemoryTelemetrySink()
    return CsvTelemetrySink(path)


def get_optimizer(kind: OptimizerKind, learning_rate: float) -> IOptimizer:
    return build_optimizer(kind, learning_rate)
