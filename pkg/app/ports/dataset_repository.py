"""Dataset repository port."""

import abc

from app.models import Dataset


class IDatasetRepository(abc.ABC):
    """
    Port: Abstract contract for preference dataset persistence.

    A saved dataset carries its generation manifest, so loading it yields the
    same pairs and the same WorldSpec.
    """

    @abc.abstractmethod
    def save(self, dataset: Dataset, location: str) -> str:
        """
        Persist a dataset.

        Args:
            dataset: Pairs plus generating world
            location: Adapter-specific key or path

        Returns:
            SHA-256 of the stored manifest block
        """
        pass

    @abc.abstractmethod
    def load(self, location: str) -> Dataset:
        """
        Load a dataset.

        Args:
            location: Key or path previously passed to save

        Returns:
            The stored dataset

        Raises:
            DatasetFormatError: If the stored data is malformed or missing
        """
        pass

    @abc.abstractmethod
    def manifest_hash(self, location: str) -> str:
        """
        SHA-256 of a stored dataset's manifest block.

        Raises:
            DatasetFormatError: If nothing is stored at location
        """
        pass
