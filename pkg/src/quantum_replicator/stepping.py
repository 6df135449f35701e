"""Fixed-step explicit integrators and the shared integrator configuration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

METHODS = ("rk4-fixed", "euler")


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for the fixed-step integrators.

    ``boundary_clip`` is the floor applied to every component after a step
    (0 means plain clipping of negative values). ``renormalize_each_step``
    rescales the clipped state back onto the simplex.
    """

    dt: float = 0.01
    t_max: float = 50.0
    method: str = "rk4-fixed"
    boundary_clip: float = 0.0
    renormalize_each_step: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if self.dt >= self.t_max:
            raise ValueError("dt must be smaller than t_max")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.boundary_clip >= 0:
            raise ValueError("boundary_clip must be non-negative")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def times(self) -> np.ndarray:
        # i * dt rather than a running sum so every run stores identical times
        return np.arange(self.n_steps + 1) * self.dt

    def check_dimension(self, n: int) -> None:
        if self.boundary_clip >= 1.0 / n:
            raise ValueError(f"boundary_clip must be below 1/n = {1.0 / n}")


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    return y + dt * f(y)


def stepper(method: str) -> Callable:
    if method == "rk4-fixed":
        return rk4_step
    if method == "euler":
        return euler_step
    raise ValueError(f"unknown method {method!r}")


def project_simplex(x: np.ndarray, floor: float = 0.0, renormalize: bool = True) -> np.ndarray:
    """Clip components below ``floor`` and optionally rescale to unit sum."""
    x = np.maximum(x, floor)
    if renormalize:
        x = x / x.sum()
    return x
