"""Pytest configuration for preference lab tests."""

import numpy as np
import pytest

from app.adapters import (
    AdamOptimizer,
    CsvTelemetrySink,
    InMemoryCheckpointStore,
    InMemoryDatasetRepository,
    InMemoryTelemetrySink,
    SgdOptimizer,
    TextCheckpointStore,
    TextDatasetRepository,
)
from app.models import (
    MlpDims,
    ObjectiveConfig,
    PolicyKind,
    WorldSpec,
)
from app.ports import (
    ICheckpointStore,
    IDatasetRepository,
    IOptimizer,
    IPolicyModel,
    ITelemetrySink,
)
from app.services import clone_as_reference, gen_dataset, init_model


SMALL_VOCAB = 8
SMALL_DIMS = MlpDims(embed_dim=3, window=2, hidden=4)


# ============================================================================
# Parametrized Adapter Fixtures (one contract, every implementation)
# ============================================================================

@pytest.fixture(params=["bigram", "mlp"], ids=["Bigram", "MLP"])
def policy(request) -> IPolicyModel:
    """Parametrized fixture providing both policy families on a small vocabulary."""
    return init_model(PolicyKind(request.param), SMALL_VOCAB, seed=3, dims=SMALL_DIMS)


@pytest.fixture(params=["in_memory", "text"], ids=["InMemory", "TextFile"])
def dataset_repository(request) -> IDatasetRepository:
    """Parametrized fixture providing both in-memory and text-file implementations."""
    if request.param == "in_memory":
        return InMemoryDatasetRepository()
    elif request.param == "text":
        return TextDatasetRepository()


@pytest.fixture(params=["in_memory", "text"], ids=["InMemory", "TextFile"])
def checkpoint_store(request) -> ICheckpointStore:
    """Parametrized fixture providing both in-memory and text-file implementations."""
    if request.param == "in_memory":
        return InMemoryCheckpointStore()
    elif request.param == "text":
        return TextCheckpointStore()


@pytest.fixture(params=["in_memory", "csv"], ids=["InMemory", "Csv"])
def telemetry_sink(request, tmp_path) -> ITelemetrySink:
    """Parametrized fixture providing both in-memory and CSV implementations."""
    if request.param == "in_memory":
        sink = InMemoryTelemetrySink()
    elif request.param == "csv":
        sink = CsvTelemetrySink(str(tmp_path / "telemetry.csv"))
    yield sink
    sink.close()


@pytest.fixture(params=["adam", "sgd"], ids=["Adam", "SGD"])
def optimizer(request) -> IOptimizer:
    """Parametrized fixture providing both update rules."""
    if request.param == "adam":
        return AdamOptimizer(learning_rate=0.01)
    elif request.param == "sgd":
        return SgdOptimizer(learning_rate=0.01)


@pytest.fixture
def location(tmp_path) -> str:
    """A storage location every adapter accepts (in-memory ones use it as a key)."""
    return str(tmp_path / "store" / "item.txt")


# ============================================================================
# Domain Fixtures
# ============================================================================

@pytest.fixture
def small_world() -> WorldSpec:
    return WorldSpec(vocab_size=SMALL_VOCAB, prompt_len=3, resp_len=5, overlap=0.6, seed=11)


@pytest.fixture
def small_dataset(small_world):
    return gen_dataset(small_world, 12)


@pytest.fixture
def mlp_pair(small_dataset):
    """Trainable MLP policy and its frozen reference, on the small dataset's vocabulary."""
    model = init_model(PolicyKind.MLP, SMALL_VOCAB, seed=5, dims=SMALL_DIMS)
    return model, clone_as_reference(model)


@pytest.fixture
def perturbed_pair():
    """Policy moved away from its reference so rewards are non-zero."""
    model = init_model(PolicyKind.MLP, SMALL_VOCAB, seed=7, dims=SMALL_DIMS)
    ref = clone_as_reference(model)
    rng = np.random.default_rng(7)
    for node in model.parameters().values():
        node.value = node.value + rng.normal(0.0, 0.3, size=node.shape)
    return model, ref


@pytest.fixture
def objective_config() -> ObjectiveConfig:
    return ObjectiveConfig()

