"""Unit tests for configuration resolution and run manifests."""

import argparse
import json

import pytest

from app.cli.common import (
    MANIFEST_FILE,
    TRAINING_FLAGS,
    flat_config,
    objective_config,
    read_config_file,
    require_file_stores,
    resolve_settings,
    train_config,
    write_manifest,
)
from app.adapters import InMemoryDatasetRepository, TextDatasetRepository
from app.config import AppSettings
from app.dependencies import get_dataset_repository
from app.exceptions import InvalidConfigurationError
from app.models import ObjectiveKind


def _args(**values) -> argparse.Namespace:
    namespace = {dest: None for dest in TRAINING_FLAGS}
    namespace["config"] = None
    namespace.update(values)
    return argparse.Namespace(**namespace)


class TestReadConfigFile:
    """Tests for read_config_file."""

    def test_key_value_lines(self, tmp_path):
        """Test comments, blank lines, spacing and dashed keys."""
        path = tmp_path / "run.conf"
        path.write_text("# sweep point\nbeta = 0.2\nlearning-rate=0.01\n\n", encoding="utf-8")

        assert read_config_file(str(path)) == {"beta": "0.2", "learning_rate": "0.01"}

    def test_unknown_key(self, tmp_path):
        """Test that keys outside the run settings are rejected by name."""
        path = tmp_path / "run.conf"
        path.write_text("temperature=2\n", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError, match="temperature"):
            read_config_file(str(path))

    def test_process_keys_rejected(self, tmp_path):
        """Test that process settings cannot come from a run config."""
        path = tmp_path / "run.conf"
        path.write_text("log_level=DEBUG\n", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError):
            read_config_file(str(path))

    def test_malformed_line(self, tmp_path):
        """Test that a line without '=' is rejected with its location."""
        path = tmp_path / "run.conf"
        path.write_text("beta 0.2\n", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError, match="expected key=value"):
            read_config_file(str(path))

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a configuration error."""
        with pytest.raises(InvalidConfigurationError, match="not found"):
            read_config_file(str(tmp_path / "absent.conf"))

    def test_invalid_manifest(self, tmp_path):
        """Test that a broken manifest.json is a configuration error."""
        path = tmp_path / MANIFEST_FILE
        path.write_text("{not json", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError):
            read_config_file(str(path))


class TestResolveSettings:
    """Tests for defaults, config file and flag precedence."""

    def test_defaults(self):
        """Test settings defaults with the formal alpha window."""
        settings = resolve_settings(_args(), TRAINING_FLAGS)

        assert settings.beta == 0.1
        assert (settings.alpha_lo, settings.alpha_hi) == (0.0, 1.0)

    def test_flag_overrides_file(self, tmp_path):
        """Test that flags win over the config file."""
        path = tmp_path / "run.conf"
        path.write_text("beta=0.2\nsteps=50\n", encoding="utf-8")

        settings = resolve_settings(_args(config=str(path), beta=0.3), TRAINING_FLAGS)

        assert settings.beta == 0.3
        assert settings.steps == 50

    def test_flag_dest_mapping(self):
        """Test flags whose names differ from the settings fields."""
        settings = resolve_settings(_args(lr=0.02, batch=8, gamma=1.0, policy="bigram"), TRAINING_FLAGS)

        assert settings.learning_rate == 0.02
        assert settings.batch_size == 8
        assert settings.simpo_gamma == 1.0
        assert settings.policy_kind == "bigram"

    def test_empirical_preset(self):
        """Test that the empirical preset sets [0.3, 0.95]."""
        settings = resolve_settings(_args(alpha_preset="empirical"), TRAINING_FLAGS)

        assert (settings.alpha_lo, settings.alpha_hi) == (0.3, 0.95)

    def test_explicit_bound_beats_preset(self):
        """Test that an explicit bound overrides the preset."""
        settings = resolve_settings(_args(alpha_preset="empirical", alpha_hi=0.8), TRAINING_FLAGS)

        assert (settings.alpha_lo, settings.alpha_hi) == (0.3, 0.8)

    def test_unknown_preset(self, tmp_path):
        """Test that an unknown preset is rejected."""
        path = tmp_path / "run.conf"
        path.write_text("alpha_preset=loose\n", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError, match="alpha preset"):
            resolve_settings(_args(config=str(path)), TRAINING_FLAGS)

    def test_unparseable_value(self, tmp_path):
        """Test that a non-numeric value for a numeric setting is rejected."""
        path = tmp_path / "run.conf"
        path.write_text("steps=many\n", encoding="utf-8")

        with pytest.raises(InvalidConfigurationError):
            resolve_settings(_args(config=str(path)), TRAINING_FLAGS)


class TestConfigBuilders:
    """Tests for objective and training config construction."""

    def test_objective_config(self):
        """Test that objective hyperparameters are copied from settings."""
        settings = AppSettings(simpo_gamma=0.25, tau_mode="batch")

        config = objective_config(settings, ObjectiveKind.SIMPO)

        assert config.kind == ObjectiveKind.SIMPO
        assert config.gamma == 0.25
        assert config.tau_mode.value == "batch"

    @pytest.mark.parametrize(
        "overrides",
        [{"shift_lambda": 1.5}, {"alpha_lo": 0.9, "alpha_hi": 0.1}, {"beta": 0.0}, {"tau_mode": "global"}],
    )
    def test_objective_config_rejected(self, overrides):
        """Test that out-of-range hyperparameters become configuration errors."""
        with pytest.raises(InvalidConfigurationError):
            objective_config(AppSettings(**overrides), ObjectiveKind.ACPO)

    def test_train_config_rejects_zero_batch(self):
        """Test that batch size 0 is rejected."""
        settings = AppSettings(batch_size=0)

        with pytest.raises(InvalidConfigurationError):
            train_config(settings, objective_config(settings, ObjectiveKind.DPO))


class TestRunManifest:
    """Tests for manifest.json and its reuse as a config file."""

    def test_written_fields(self, tmp_path):
        """Test the manifest command, config, dataset hash and excluded process keys."""
        settings = AppSettings(steps=7)

        path = write_manifest(tmp_path, "train", settings, "abc123", {"telemetry": "telemetry.csv"})

        manifest = json.loads(path.read_text(encoding="utf-8"))
        assert path.name == MANIFEST_FILE
        assert manifest["command"] == "train"
        assert manifest["config"]["steps"] == "7"
        assert manifest["dataset_manifest_sha256"] == "abc123"
        assert "log_level" not in manifest["config"]

    def test_manifest_reproduces_settings(self, tmp_path):
        """Test that a manifest read back as config gives the same run settings."""
        original = resolve_settings(_args(beta=0.25, alpha_preset="empirical", steps=30), TRAINING_FLAGS)
        path = write_manifest(tmp_path, "train", original, "", {})

        reloaded = resolve_settings(_args(config=str(path)), TRAINING_FLAGS)

        assert flat_config(reloaded) == flat_config(original)


class TestRequireFileStores:
    """Tests for the in-memory environment guard."""

    def test_memory_environment_rejected(self):
        """Test that commands refuse stores that vanish with the process."""
        with pytest.raises(InvalidConfigurationError, match="tests only"):
            require_file_stores(AppSettings(environment="memory"))

    def test_local_environment_accepted(self):
        """Test that the default environment passes."""
        require_file_stores(AppSettings(environment="local"))

    def test_memory_environment_still_wires_in_memory_store(self):
        """Test that the in-memory wiring stays available to tests."""
        assert isinstance(get_dataset_repository(AppSettings(environment="memory")), InMemoryDatasetRepository)
        assert isinstance(get_dataset_repository(AppSettings()), TextDatasetRepository)
