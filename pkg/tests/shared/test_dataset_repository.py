"""Shared tests for dataset repository implementations.

Tests both in-memory and text-file adapters using parametrized fixtures.
"""

import pytest

from app.exceptions import DatasetFormatError
from app.ports import IDatasetRepository


class TestDatasetRepository:
    """Contract tests for IDatasetRepository."""

    def test_save_and_load(self, dataset_repository: IDatasetRepository, small_dataset, location):
        """Test that a stored dataset loads back unchanged."""
        dataset_repository.save(small_dataset, location)

        loaded = dataset_repository.load(location)

        assert loaded.world == small_dataset.world
        assert loaded.pairs == small_dataset.pairs

    def test_save_returns_manifest_hash(self, dataset_repository, small_dataset, location):
        """Test that save and manifest_hash agree."""
        digest = dataset_repository.save(small_dataset, location)

        assert digest == dataset_repository.manifest_hash(location)
        assert digest == small_dataset.manifest_sha256()
        assert len(digest) == 64

    def test_load_missing(self, dataset_repository, location):
        """Test that loading an unknown location raises."""
        with pytest.raises(DatasetFormatError):
            dataset_repository.load(location)

    def test_loaded_copy_is_independent(self, dataset_repository, small_dataset, location):
        """Test that mutating a loaded dataset does not change the stored one."""
        dataset_repository.save(small_dataset, location)

        loaded = dataset_repository.load(location)
        loaded.pairs.clear()

        assert len(dataset_repository.load(location)) == len(small_dataset)
