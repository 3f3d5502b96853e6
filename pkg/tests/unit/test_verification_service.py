"""Unit tests for the property suite."""

import numpy as np
import pytest

from app.config import AppSettings
from app.models import ObjectiveKind
from app.services import VerificationService
from app.services.verification_service import FAULT_UNDETACHED_ALPHA, toy_problem


@pytest.fixture
def settings() -> AppSettings:
    return AppSettings(gradcheck_coords=12)


@pytest.fixture
def service(settings) -> VerificationService:
    return VerificationService(settings)


class TestToyProblem:
    """Tests for the random toy setup."""

    def test_seeded(self):
        """Test that the toy problem depends only on the seed."""
        a, b = toy_problem(3), toy_problem(3)

        np.testing.assert_array_equal(a.model.flat_parameters(), b.model.flat_parameters())
        assert a.pairs == b.pairs

    def test_model_moved_from_reference(self):
        """Test that the policy is perturbed away from its frozen reference."""
        problem = toy_problem(0)

        assert problem.ref.frozen
        assert not np.array_equal(problem.model.flat_parameters(), problem.ref.flat_parameters())


class TestVerificationService:
    """Tests for individual properties and full runs."""

    @pytest.mark.parametrize("kind", list(ObjectiveKind))
    def test_gradients(self, service, kind):
        """Test the finite-difference check for each objective on one seed."""
        result = service.check_gradients(toy_problem(1), kind, seed=1)

        assert result.passed, result
        assert result.name == f"gradcheck[{kind.value}]"

    @pytest.mark.parametrize(
        "kind, seed",
        [(ObjectiveKind.IPO, 19), (ObjectiveKind.SIMPO, 14), (ObjectiveKind.BETA_DPO, 14)],
    )
    def test_gradients_with_vanishing_coordinates(self, kind, seed):
        """Test seeds whose sampled coordinates include exact-zero gradients under a large loss."""
        result = VerificationService(AppSettings()).check_gradients(toy_problem(seed), kind, seed=seed)

        assert result.passed, result

    def test_default_suite_on_twenty_seeds(self):
        """Test the default verify run: every property, 20 seeds, 200 coordinates per gradient check."""
        report = VerificationService(AppSettings()).run(seeds=20)

        assert report.passed, report.failures()
        gradchecks = [r for r in report.results if r.name.startswith("gradcheck[")]
        assert len(gradchecks) == 20 * len(ObjectiveKind)

    def test_acpo_oracle(self, service):
        """Test autodiff against the hand-assembled ACPO gradient."""
        assert service.check_acpo_oracle(toy_problem(2), seed=2).passed

    def test_gradient_asymmetry(self, service):
        """Test that the r_l to r_w pressure ratio carries alpha."""
        assert service.check_gradient_asymmetry(toy_problem(2), seed=2).passed

    def test_degeneration(self, service):
        """Test that ACPO at alpha 1 and DPO-Shift at lambda 1 equal DPO exactly."""
        result = service.check_degeneration(toy_problem(4), seed=4)

        assert result.passed
        assert result.max_error == 0.0

    def test_normalization(self, service):
        """Test that next-token rows of both policy kinds sum to 1."""
        assert service.check_normalization(5).passed

    def test_reward_decomposition(self, service):
        """Test that bigram rewards decompose into per-token log-ratios."""
        assert service.check_reward_decomposition(5).passed

    @pytest.mark.parametrize(
        "check",
        ["check_alpha_boundaries", "check_alpha_monotonicity", "check_tau_linearity"],
    )
    def test_seedless_properties(self, service, check):
        """Test the boundary table, monotonicity and tau linearity."""
        assert getattr(service, check)().passed

    def test_alpha_fuzz(self, service):
        """Test random inputs for a finite alpha inside both windows."""
        assert service.check_alpha_fuzz(3).passed

    def test_boundedness(self, service):
        """Test that ACPO never pushes r_l harder than DPO at a larger margin."""
        assert service.check_boundedness(3).passed

    def test_full_run(self, service):
        """Test that every property passes on one seed."""
        report = service.run(seeds=1)

        assert report.passed, report.failures()
        names = set(report.summary())
        assert {"gradcheck[acpo]", "acpo-oracle", "degeneration", "alpha-fuzz"} <= names

    def test_undetached_alpha_detected(self, settings):
        """Test that removing the stop-gradient fails the oracle."""
        report = VerificationService(settings, fault=FAULT_UNDETACHED_ALPHA).run(seeds=1)

        assert not report.passed
        assert "acpo-oracle" in {r.name for r in report.failures()}

    def test_unknown_fault(self, settings):
        """Test that an unknown fault name is rejected."""
        with pytest.raises(ValueError):
            VerificationService(settings, fault="off-by-one")
