"""In-memory dataset repository for testing."""

import copy

from app.exceptions import DatasetFormatError
from app.models import Dataset
from app.ports import IDatasetRepository


class InMemoryDatasetRepository(IDatasetRepository):
    """Keeps deep copies of datasets keyed by location."""

    def __init__(self):
        self._datasets: dict[str, Dataset] = {}

    def save(self, dataset: Dataset, location: str) -> str:
        self._datasets[location] = copy.deepcopy(dataset)
        return dataset.manifest_sha256()

    def load(self, location: str) -> Dataset:
        dataset = self._datasets.get(location)
        if dataset is None:
            raise DatasetFormatError(f"Dataset not found: {location}")
        return copy.deepcopy(dataset)

    def manifest_hash(self, location: str) -> str:
        return self.load(location).manifest_sha256()
