"""Central finite-difference check of reverse-mode gradients."""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from app.autodiff.engine import backward
from app.exceptions import NonFiniteEvaluationError
from app.models import GradCheckReport, Node, no_grad


logger = logging.getLogger(__name__)

REL_ERROR_FLOOR = 1e-8
ROUNDOFF_ULPS = 64


def relative_error(analytic: float, numeric: float) -> float:
    """|a - n| / max(|a|, |n|, 1e-8)."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), REL_ERROR_FLOOR)


def roundoff_bound(f_plus: float, f_minus: float, h: float) -> float:
    """
    Largest central difference that rounding of the two evaluations alone can produce.

    A loss of magnitude |f| is only known to a few ulps, so a coordinate whose
    true derivative is (near) zero still shows a numeric derivative of about
    ulp(|f|) / h. With a large loss that noise exceeds the 1e-8 floor of the
    relative error.
    """
    ulp = float(np.spacing(max(abs(f_plus), abs(f_minus))))
    return ROUNDOFF_ULPS * ulp / (2.0 * h)


def _evaluate(f: Callable[[], Node]) -> float:
    value = f().item()
    if not math.isfinite(value):
        raise NonFiniteEvaluationError(f"Function evaluated to non-finite value {value}")
    return value


def finite_diff_check(
    f: Callable[[], Node],
    params: Sequence[Node],
    h: float = 1e-4,
    tol: float = 1e-4,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GradCheckReport:
    """
    Compare reverse-mode gradients of a scalar function with central differences.

    Coordinates where analytic and numeric derivatives differ by no more than
    `roundoff_bound` count as agreeing; every other coordinate is scored with
    `relative_error`.

    Args:
        f: Deterministic function rebuilding its graph from `params` on each call
        params: Leaf nodes whose values are perturbed in place
        h: Finite-difference step
        tol: Pass threshold on the maximum relative error
        max_coords: Check a random subset of this many coordinates (all if None)
        rng: Generator used to choose the subset

    Returns:
        GradCheckReport with the maximum relative error over checked coordinates

    Raises:
        ValueError: If h is not positive
        NonFiniteEvaluationError: If any evaluation of f is NaN or infinite
    """
    if h <= 0:
        raise ValueError(f"Finite-difference step must be positive, got {h}")

    seed = f()
    if not math.isfinite(seed.item()):
        raise NonFiniteEvaluationError(f"Function evaluated to non-finite value {seed.item()}")
    backward(seed)
    analytic = [
        (p.grad.copy() if p.grad is not None else np.zeros_like(p.value)) for p in params
    ]

    coords = [(k, i) for k, p in enumerate(params) for i in range(p.value.size)]
    if max_coords is not None and max_coords < len(coords):
        rng = rng if rng is not None else np.random.default_rng(0)
        chosen = rng.choice(len(coords), size=max_coords, replace=False)
        coords = [coords[j] for j in sorted(chosen)]

    worst = 0.0
    worst_coord: Optional[tuple[int, int]] = None
    roundoff_limited = 0
    with no_grad():
        for k, i in coords:
            values = params[k].value
            original = values.flat[i]
            values.flat[i] = original + h
            f_plus = _evaluate(f)
            values.flat[i] = original - h
            f_minus = _evaluate(f)
            values.flat[i] = original
            numeric = (f_plus - f_minus) / (2.0 * h)
            a = float(analytic[k].flat[i])
            if abs(a - numeric) <= roundoff_bound(f_plus, f_minus, h):
                roundoff_limited += 1
                error = 0.0
            else:
                error = relative_error(a, numeric)
            if error > worst or worst_coord is None:
                worst, worst_coord = error, (k, i)

    report = GradCheckReport(
        max_rel_error=worst,
        tolerance=tol,
        passed=worst < tol,
        coordinates_checked=len(coords),
        worst_coordinate=worst_coord,
        roundoff_limited=roundoff_limited,
    )
    logger.debug(
        f"Gradient check over {report.coordinates_checked} coordinates "
        f"({report.roundoff_limited} within roundoff): "
        f"max rel err {report.max_rel_error:.3e} ({'PASS' if report.passed else 'FAIL'})"
    )
    return report
