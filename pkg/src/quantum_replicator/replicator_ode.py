"""Vector replicator dynamics: fields, fixed-step integration and fixed points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._checks import ConvergenceError, as_payoff, as_simplex, check_finite
from .game_core import AsymmetricGame
from .stepping import IntegratorConfig, project_simplex, stepper

MARGINAL_BAND = 1e-7
FD_STEP = 1e-6


@dataclass(frozen=True)
class Trajectory:
    """States sampled at uniform times with per-step observables."""

    times: np.ndarray
    states: np.ndarray
    avg_fitness: np.ndarray
    entropy: np.ndarray

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class FixedPointReport:
    state: np.ndarray
    residual: float
    jacobian_eigenvalues: np.ndarray
    stability: str
    iterations: int = 0


def shannon_entropy(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    nz = x[x > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def _field(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    f = a @ x
    return (f - x @ f) * x


def replicator_field(a, x) -> np.ndarray:
    """Return dx/dt = [f_i(x) - <f(x)>] x_i."""
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    return _field(a, x)


def _asym_field(a, b, x, y, literal):
    ay = a @ y
    bx = b @ x
    if literal:
        # index printed as 1 in the source formula, kept for comparison only
        dx = (ay[0] - x @ ay) * x
        dy = (bx[0] - y @ bx) * y
    else:
        dx = (ay - x @ ay) * x
        dy = (bx - y @ bx) * y
    return dx, dy


def asymmetric_field(game: AsymmetricGame, x, y, literal_index: bool = False):
    """Two-population replicator field ``(dx, dy)``.

    ``literal_index=True`` uses the payoff of strategy 1 in every row, which
    does not keep the simplices invariant; it is exposed for comparison.
    """
    n, m = game.shape
    x = as_simplex(x, n)
    y = as_simplex(y, m)
    return _asym_field(game.a, game.b, x, y, literal_index)


def _run(field, y0, cfg: IntegratorConfig, post):
    step = stepper(cfg.method)
    times = cfg.times()
    out = np.empty((len(times),) + y0.shape)
    out[0] = y0
    y = y0
    for k in range(1, len(times)):
        with np.errstate(over="ignore", invalid="ignore"):
            y = step(field, y, cfg.dt)
        check_finite(y, k)
        y = post(y)
        out[k] = y
    return times, out


def _observables(a, states, opponent=None):
    other = states if opponent is None else opponent
    avg = np.einsum("ti,ij,tj->t", states, a, other)
    ent = np.array([shannon_entropy(s) for s in states])
    return avg, ent


def integrate(a, x0, cfg: IntegratorConfig | None = None) -> Trajectory:
    cfg = cfg or IntegratorConfig()
    a = as_payoff(a)
    x0 = as_simplex(x0, a.shape[0])
    cfg.check_dimension(a.shape[0])

    def post(x):
        return project_simplex(x, cfg.boundary_clip, cfg.renormalize_each_step)

    times, states = _run(lambda x: _field(a, x), x0.copy(), cfg, post)
    avg, ent = _observables(a, states)
    return Trajectory(times, states, avg, ent)


def integrate_asymmetric(
    game: AsymmetricGame,
    x0,
    y0,
    cfg: IntegratorConfig | None = None,
    literal_index: bool = False,
) -> tuple[Trajectory, Trajectory]:
    cfg = cfg or IntegratorConfig()
    n, m = game.shape
    x0 = as_simplex(x0, n)
    y0 = as_simplex(y0, m)
    cfg.check_dimension(max(n, m))

    def field(z):
        dx, dy = _asym_field(game.a, game.b, z[:n], z[n:], literal_index)
        return np.concatenate([dx, dy])

    def post(z):
        return np.concatenate(
            [
                project_simplex(z[:n], cfg.boundary_clip, cfg.renormalize_each_step),
                project_simplex(z[n:], cfg.boundary_clip, cfg.renormalize_each_step),
            ]
        )

    times, states = _run(field, np.concatenate([x0, y0]), cfg, post)
    xs, ys = states[:, :n], states[:, n:]
    avg_x, ent_x = _observables(game.a, xs, ys)
    avg_y, ent_y = _observables(game.b, ys, xs)
    return Trajectory(times, xs, avg_x, ent_x), Trajectory(times, ys, avg_y, ent_y)


def _reduced(a, z):
    # simplex coordinates: first n-1 components, the last is implied
    x = np.append(z, 1.0 - z.sum())
    return _field(a, x)[:-1]


def tangent_jacobian(a, x, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of the field on the simplex tangent space."""
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    z = x[:-1]
    k = z.size
    jac = np.empty((k, k))
    for j in range(k):
        e = np.zeros(k)
        e[j] = h
        jac[:, j] = (_reduced(a, z + e) - _reduced(a, z - e)) / (2 * h)
    return jac


def classify_stability(eigenvalues: np.ndarray, band: float = MARGINAL_BAND) -> str:
    if eigenvalues.size == 0:
        return "stable"
    top = float(np.max(eigenvalues.real))
    if top < -band:
        return "stable"
    if top > band:
        return "unstable"
    return "marginal"


def find_fixed_point(a, x_guess, tol: float = 1e-9, max_iter: int = 200) -> FixedPointReport:
    """Damped Newton iteration for a zero of the replicator field.

    Iterates in the first n-1 simplex coordinates. Each trial point is
    clipped back onto the simplex and the step is halved until the residual
    decreases.
    """
    a = as_payoff(a)
    x = as_simplex(x_guess, a.shape[0]).copy()
    n = a.shape[0]
    if n == 1:
        return FixedPointReport(x, 0.0, np.array([], dtype=complex), "stable")

    def residual(x):
        return float(np.max(np.abs(_field(a, x))))

    res = residual(x)
    for it in range(max_iter + 1):
        if res < tol:
            eig = np.linalg.eigvals(tangent_jacobian(a, x)).astype(complex)
            return FixedPointReport(x, res, eig, classify_stability(eig), it)
        jac = tangent_jacobian(a, x)
        f = _reduced(a, x[:-1])
        try:
            delta = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jac, -f, rcond=None)[0]
        lam = 1.0
        while lam > 1e-10:
            z = x[:-1] + lam * delta
            cand = project_simplex(np.append(z, 1.0 - z.sum()))
            cand_res = residual(cand)
            if cand_res < res:
                break
            lam *= 0.5
        else:
            break
        x, res = cand, cand_res
    raise ConvergenceError(f"no fixed point within {max_iter} iterations (residual {res:.3e})")
