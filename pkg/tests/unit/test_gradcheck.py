"""Unit tests for the finite-difference gradient checker."""

import numpy as np
import pytest

from app.autodiff import engine as ge
from app.autodiff import finite_diff_check, relative_error, roundoff_bound
from app.exceptions import NonFiniteEvaluationError


class TestRelativeError:
    """Tests for relative_error."""

    def test_equal_values(self):
        """Test that identical derivatives have zero error."""
        assert relative_error(2.0, 2.0) == 0.0

    def test_floor_for_tiny_values(self):
        """Test that near-zero gradients are compared against the 1e-8 floor."""
        assert relative_error(0.0, 1e-12) == pytest.approx(1e-4)

    def test_symmetric(self):
        """Test that the error does not depend on argument order."""
        assert relative_error(1.0, 1.1) == relative_error(1.1, 1.0)


class TestRoundoffBound:
    """Tests for roundoff_bound."""

    def test_scales_with_loss_magnitude(self):
        """Test that the bound is a fixed number of ulps of the larger evaluation over 2h."""
        expected = 64 * float(np.spacing(28.8)) / 2e-4

        assert roundoff_bound(28.8, 28.7, 1e-4) == pytest.approx(expected)
        assert roundoff_bound(1.0, 1.0, 1e-4) < roundoff_bound(28.8, 28.8, 1e-4)

    def test_covers_few_ulp_noise_at_large_loss(self):
        """Test that three ulps of a loss near 28.8 stay inside the bound."""
        noise = 3 * float(np.spacing(28.8)) / 2e-4

        assert noise < roundoff_bound(28.8, 28.8, 1e-4) < 1e-8


class TestFiniteDiffCheck:
    """Tests for finite_diff_check."""

    def test_passes_for_correct_gradient(self):
        """Test a smooth function of a matrix parameter."""
        w = ge.parameter(np.array([[0.3, -0.7], [1.1, 0.2]]))
        x = ge.constant(np.array([0.5, -1.5]))

        report = finite_diff_check(lambda: ge.sum(ge.softplus(ge.matmul(w, x))), [w])

        assert report.passed
        assert report.coordinates_checked == 4
        assert report.max_rel_error < 1e-6

    def test_detects_wrong_gradient(self):
        """Test that a detached path makes the analytic gradient disagree."""
        w = ge.parameter(np.array([0.5, 1.5]))

        report = finite_diff_check(lambda: ge.sum(ge.multiply(w, ge.detach(w))), [w])

        assert not report.passed
        assert report.max_rel_error > 0.4

    def test_samples_coordinates(self):
        """Test that max_coords limits the number of checked coordinates."""
        w = ge.parameter(np.linspace(-1.0, 1.0, 30))

        report = finite_diff_check(
            lambda: ge.sum(ge.sigmoid(w)), [w], max_coords=10, rng=np.random.default_rng(0)
        )

        assert report.coordinates_checked == 10
        assert report.passed

    def test_restores_parameters(self):
        """Test that perturbed values are put back."""
        w = ge.parameter(np.array([0.25, -0.5]))
        before = w.value.copy()

        finite_diff_check(lambda: ge.sum(ge.multiply(w, w)), [w])

        np.testing.assert_array_equal(w.value, before)

    def test_rejects_nonpositive_step(self):
        """Test that h must be positive."""
        w = ge.parameter(np.ones(2))
        with pytest.raises(ValueError):
            finite_diff_check(lambda: ge.sum(w), [w], h=0.0)

    def test_non_finite_evaluation(self):
        """Test that NaN evaluations are reported, not compared."""
        w = ge.parameter(np.array([1.0]))
        nan = ge.constant(np.array([np.nan]))

        with pytest.raises(NonFiniteEvaluationError):
            finite_diff_check(lambda: ge.sum(ge.multiply(w, nan)), [w])

    def test_large_loss_with_vanishing_gradient_passes(self):
        """Test that rounding noise of a large loss is not scored as a gradient error."""
        w = ge.parameter(np.array([0.2, -0.4, 0.9]))
        offset = ge.constant(30.0)

        report = finite_diff_check(lambda: ge.sum(ge.add(offset, ge.scale(w, 1e-11))), [w])

        assert report.passed
        assert report.roundoff_limited == 3
        assert report.max_rel_error == 0.0

    def test_large_loss_still_detects_wrong_gradient(self):
        """Test that the roundoff allowance does not hide a real mismatch."""
        w = ge.parameter(np.array([0.5, 1.5]))
        offset = ge.constant(30.0)

        report = finite_diff_check(
            lambda: ge.sum(ge.add(offset, ge.multiply(w, ge.detach(w)))), [w]
        )

        assert not report.passed
        assert report.roundoff_limited == 0
