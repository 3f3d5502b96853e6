"""Unit tests for the dataset and checkpoint text formats."""

import pytest

from app.adapters import TextDatasetRepository
from app.adapters.text_checkpoint_store import parse_checkpoint, render_checkpoint
from app.adapters.text_dataset_repository import parse_dataset, render_dataset
from app.exceptions import CheckpointFormatError, DatasetFormatError


class TestDatasetFormat:
    """Tests for the pair file layout."""

    def test_layout(self, small_dataset):
        """Test manifest lines followed by one 'prompt | chosen | rejected' line per pair."""
        lines = render_dataset(small_dataset).splitlines()

        assert lines[0] == "# format=acpo-pairs-v1"
        assert lines[1] == "# vocab=8"
        assert "# pairs=12" in lines
        body = [line for line in lines if not line.startswith("#")]
        assert len(body) == 12
        first = small_dataset.pairs[0]
        assert body[0].split(" | ")[0] == " ".join(str(t) for t in first.prompt.tokens)

    def test_manifest_hash_matches(self, small_dataset, tmp_path):
        """Test that the saved file hash equals the dataset manifest hash."""
        path = str(tmp_path / "pairs.txt")
        repository = TextDatasetRepository()

        digest = repository.save(small_dataset, path)

        assert repository.manifest_hash(path) == digest == small_dataset.manifest_sha256()

    def test_wrong_field_count(self, small_dataset):
        """Test that a line with two fields is rejected with its line number."""
        text = small_dataset.manifest_block() + "1 2 3 | 4 5 6 7 0\n"

        with pytest.raises(DatasetFormatError, match="Line 1"):
            parse_dataset(text)

    def test_empty_response(self, small_dataset):
        """Test that an empty response field is rejected."""
        text = small_dataset.manifest_block() + "1 2 3 |  | 4 5 6 7 0\n"

        with pytest.raises(DatasetFormatError):
            parse_dataset(text)

    def test_non_integer_token(self, small_dataset):
        """Test that a non-numeric token is rejected."""
        text = small_dataset.manifest_block() + "1 2 x | 1 2 3 4 5 | 1 2 3 4 6\n"

        with pytest.raises(DatasetFormatError):
            parse_dataset(text)

    def test_pair_count_mismatch(self, small_dataset):
        """Test that a truncated file no longer matches its declared pair count."""
        lines = render_dataset(small_dataset).splitlines()

        with pytest.raises(DatasetFormatError, match="declares 12 pairs"):
            parse_dataset("\n".join(lines[:-1]) + "\n")

    def test_unknown_format(self, small_dataset):
        """Test that another dataset format version is rejected."""
        text = render_dataset(small_dataset).replace("acpo-pairs-v1", "pairs-v0")

        with pytest.raises(DatasetFormatError, match="Unsupported"):
            parse_dataset(text)


class TestCheckpointFormat:
    """Tests for the checkpoint layout."""

    def test_header(self, policy):
        """Test the header lines and the end marker."""
        lines = render_checkpoint(policy).splitlines()

        assert lines[1] == "format=acpo-checkpoint-v1"
        assert lines[2] == f"kind={policy.kind.value}"
        assert lines[-1] == "end"

    def test_missing_end_marker(self, policy):
        """Test that a truncated checkpoint is rejected."""
        text = render_checkpoint(policy).rstrip("\n").rsplit("\n", 1)[0]

        with pytest.raises(CheckpointFormatError, match="end marker"):
            parse_checkpoint(text)

    def test_wrong_shape(self, policy):
        """Test that values not matching the declared dimensions are rejected."""
        text = render_checkpoint(policy).replace("vocab=8", "vocab=9")

        with pytest.raises(CheckpointFormatError):
            parse_checkpoint(text)

    def test_unknown_kind(self, policy):
        """Test that an unknown policy kind is rejected."""
        text = render_checkpoint(policy).replace(f"kind={policy.kind.value}", "kind=transformer")

        with pytest.raises(CheckpointFormatError):
            parse_checkpoint(text)

    def test_unknown_format(self, policy):
        """Test that another checkpoint format version is rejected."""
        text = render_checkpoint(policy).replace("acpo-checkpoint-v1", "acpo-checkpoint-v0")

        with pytest.raises(CheckpointFormatError, match="Unsupported"):
            parse_checkpoint(text)
