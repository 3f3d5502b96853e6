"""Verification domain models."""

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class GradCheckReport:
    """
    Outcome of a finite-difference gradient check.

    Attributes:
        max_rel_error: Largest relative error over the checked coordinates
        tolerance: Pass threshold
        passed: max_rel_error < tolerance
        coordinates_checked: Number of (parameter, index) coordinates compared
        worst_coordinate: (parameter position, flat index) of the largest error
        roundoff_limited: Coordinates whose discrepancy is within evaluation roundoff
    """
    max_rel_error: float
    tolerance: float
    passed: bool
    coordinates_checked: int
    worst_coordinate: Optional[tuple[int, int]] = None
    roundoff_limited: int = 0


@dataclass(frozen=True)
class PropertyResult:
    """One checked property on one seed."""
    name: str
    seed: Optional[int]
    max_error: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    """All property results of a verification run."""
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[PropertyResult]:
        return [r for r in self.results if not r.passed]

    def summary(self) -> dict[str, tuple[float, float, bool]]:
        """Worst error, tolerance and overall outcome per property name."""
        out: dict[str, tuple[float, float, bool]] = {}
        for r in self.results:
            worst, tol, ok = out.get(r.name, (0.0, r.tolerance, True))
            out[r.name] = (max(worst, r.max_error), tol, ok and r.passed)
        return out
