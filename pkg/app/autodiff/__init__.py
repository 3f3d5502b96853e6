"""Reverse-mode differentiation engine and gradient checking."""

from app.autodiff import engine
from app.autodiff.gradcheck import finite_diff_check, relative_error, roundoff_bound

__all__ = ["engine", "finite_diff_check", "relative_error", "roundoff_bound"]
