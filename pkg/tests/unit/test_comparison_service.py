"""Unit tests for multi-objective comparison runs."""

import math

import numpy as np
import pytest

from app.adapters import InMemoryTelemetrySink
from app.models import ObjectiveConfig, ObjectiveKind, PolicyKind, TrainConfig
from app.services import ComparisonService, export_curves, init_model
from app.services.comparison_service import CURVE_COLUMNS
from tests.conftest import SMALL_DIMS, SMALL_VOCAB


@pytest.fixture
def base_config() -> TrainConfig:
    return TrainConfig(objective=ObjectiveConfig(), learning_rate=0.05, steps=5, batch_size=4, seed=2)


@pytest.fixture
def initial():
    return init_model(PolicyKind.MLP, SMALL_VOCAB, seed=9, dims=SMALL_DIMS)


class TestComparisonService:
    """Tests for ComparisonService.compare."""

    def test_one_run_per_objective(self, initial, small_dataset, base_config):
        """Test one telemetry table per objective and one curve row per step."""
        kinds = [ObjectiveKind.DPO, ObjectiveKind.ACPO, ObjectiveKind.SIMPO]

        result = ComparisonService().compare(initial, small_dataset, kinds, base_config)

        assert list(result.runs) == kinds
        assert len(result.curves) == 15
        for kind in kinds:
            assert len(result.runs[kind].table) == 5

    def test_runs_share_starting_point(self, initial, small_dataset, base_config):
        """Test that every objective starts from the same policy and reference."""
        kinds = [ObjectiveKind.DPO, ObjectiveKind.ACPO]

        result = ComparisonService().compare(initial, small_dataset, kinds, base_config)

        first = [result.runs[k].table.rows[0] for k in kinds]
        assert first[0].loss == first[1].loss == pytest.approx(math.log(2.0))
        assert first[0].mean_logp_w == first[1].mean_logp_w

    def test_initial_policy_untouched(self, initial, small_dataset, base_config):
        """Test that the shared starting policy is copied, not trained."""
        before = initial.flat_parameters()

        ComparisonService().compare(initial, small_dataset, [ObjectiveKind.DPO], base_config)

        np.testing.assert_array_equal(initial.flat_parameters(), before)
        assert not initial.frozen

    def test_curves_relative_to_first_step(self, initial, small_dataset, base_config):
        """Test that delta_r_w is measured from the first step."""
        result = ComparisonService().compare(initial, small_dataset, [ObjectiveKind.ACPO], base_config)

        final = result.final(ObjectiveKind.ACPO)
        rows = result.runs[ObjectiveKind.ACPO].table.rows
        assert result.curves[0].delta_r_w == 0.0
        assert final.step == 4
        assert final.delta_r_w == rows[-1].mean_r_w - rows[0].mean_r_w
        assert result.final(ObjectiveKind.DPO) is None

    def test_sink_factory_per_objective(self, initial, small_dataset, base_config):
        """Test that each objective gets its own sink."""
        sinks = {}

        def factory(kind):
            sinks[kind] = InMemoryTelemetrySink()
            return sinks[kind]

        kinds = [ObjectiveKind.DPO, ObjectiveKind.IPO]
        ComparisonService(sink_factory=factory).compare(initial, small_dataset, kinds, base_config)

        assert list(sinks) == kinds
        assert all(len(sink.table()) == 5 for sink in sinks.values())


class TestExportCurves:
    """Tests for the long-format curve file."""

    def test_layout(self, initial, small_dataset, base_config, tmp_path):
        """Test header, row count and objective blocks of the curve file."""
        kinds = [ObjectiveKind.DPO, ObjectiveKind.ACPO]
        result = ComparisonService().compare(initial, small_dataset, kinds, base_config)
        path = tmp_path / "curves.csv"

        export_curves(result.curves, str(path))

        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CURVE_COLUMNS)
        assert len(lines) == 11
        assert lines[1].startswith("dpo,0,0,")
        assert lines[6].startswith("acpo,0,0,")
