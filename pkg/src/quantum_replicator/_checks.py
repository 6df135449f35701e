"""Input validation helpers and exception types shared by all modules."""

from __future__ import annotations

import numpy as np

SIMPLEX_TOL = 1e-12


class NumericalError(RuntimeError):
    """A computation produced non-finite values or failed to converge."""


class ConvergenceError(NumericalError):
    pass


class BoundarySingularityError(ValueError):
    """Raised when a construction divides by sqrt(x_i) at a boundary point."""


def as_payoff(a, square: bool = True) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"payoff matrix must be a non-empty 2-d array, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"payoff matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff matrix has non-finite entries")
    return a


def as_simplex(x, n: int | None = None, tol: float = SIMPLEX_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"population state must be a non-empty vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise ValueError(f"dimension mismatch: state has {x.size} components, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("population state has non-finite components")
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise ValueError("population state has components outside [0, 1]")
    if abs(x.sum() - 1.0) > max(tol, x.size * np.finfo(float).eps):
        raise ValueError(f"initial state not on simplex: components sum to {float(x.sum())!r}")
    return x


def check_index(i: int, n: int) -> int:
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
        raise TypeError(f"strategy index must be an integer, got {type(i).__name__}")
    if not 0 <= i < n:
        raise IndexError(f"strategy index {i} out of range for {n} strategies")
    return int(i)


def check_finite(arr: np.ndarray, step: int, what: str = "state") -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite {what} encountered at step {step}")
