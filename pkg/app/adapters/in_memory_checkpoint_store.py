"""In-memory checkpoint store for testing."""

from app.exceptions import CheckpointFormatError
from app.ports import ICheckpointStore, IPolicyModel


class InMemoryCheckpointStore(ICheckpointStore):
    """Keeps independent copies of saved policies keyed by location."""

    def __init__(self):
        self._models: dict[str, IPolicyModel] = {}

    def save(self, model: IPolicyModel, location: str) -> None:
        self._models[location] = model.clone(frozen=model.frozen)

    def load(self, location: str) -> IPolicyModel:
        model = self._models.get(location)
        if model is None:
            raise CheckpointFormatError(f"Checkpoint not found: {location}")
        return model.clone(frozen=model.frozen)
