"""Matrix (commutator) form of the replicator dynamics.

The frequency matrix ``X`` has entries ``sqrt(x_i x_j)``; it is a symmetric
rank-one projector whose diagonal is the population state. Its evolution is
``dX/dt = [L, X]`` with ``L = [Q, X]`` and ``Q = diag(f(x)) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._checks import BoundarySingularityError, as_payoff, as_simplex, check_finite
from .replicator_ode import _field, shannon_entropy
from .stepping import IntegratorConfig, project_simplex, stepper

X_TOL = 1e-8
EPSILON_INTERIOR = 1e-12
PROJECTIONS = ("diagonal-rebuild", "none")


def commutator(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return p @ q - q @ p


def _build_X(x: np.ndarray) -> np.ndarray:
    s = np.sqrt(np.maximum(x, 0.0))
    return np.outer(s, s)


def build_X(x) -> np.ndarray:
    return _build_X(as_simplex(x))


def check_frequency_matrix(X, tol: float = X_TOL) -> np.ndarray:
    """Validate a frequency matrix and return it as a float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"frequency matrix must be square, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("frequency matrix has non-finite entries")
    if np.max(np.abs(X - X.T)) > tol:
        raise ValueError("frequency matrix is not symmetric")
    if abs(np.trace(X) - 1.0) > tol:
        raise ValueError(f"frequency matrix trace is {np.trace(X)!r}, expected 1")
    if np.max(np.abs(X @ X - X)) > tol:
        raise ValueError("frequency matrix is not idempotent")
    if np.min(X) < -tol:
        raise ValueError("frequency matrix has negative entries")
    return X


def build_U(a, x) -> np.ndarray:
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    f = a @ x
    return np.diag(f - x @ f)


def build_Q(a, x) -> np.ndarray:
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    return np.diag(0.5 * (a @ x))


def _lambda(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    return commutator(np.diag(0.5 * (a @ x)), _build_X(x))


def build_lambda(a, x) -> np.ndarray:
    """Antisymmetric selection operator ``L = [Q, X]``."""
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    return _lambda(a, x)


def lambda_elements(a, x) -> np.ndarray:
    """Entrywise ``L_ij = (f_i - f_j) sqrt(x_i x_j) / 2``, independent of the commutator."""
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    n = x.size
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            fi = sum(a[i, k] * x[k] for k in range(n))
            fj = sum(a[j, k] * x[k] for k in range(n))
            out[i, j] = 0.5 * (fi * np.sqrt(x[i] * x[j]) - np.sqrt(x[j] * x[i]) * fj)
    return out


def theta_elements(a, x) -> np.ndarray:
    """Entrywise formula for the right-hand side ``[L, X]`` of the matrix flow."""
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    n = x.size
    avg = sum(a[l, k] * x[k] * x[l] for k in range(n) for l in range(n))
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            sij = np.sqrt(x[i] * x[j])
            fi = sum(a[i, k] * x[k] for k in range(n))
            fj = sum(a[j, k] * x[k] for k in range(n))
            out[i, j] = 0.5 * fi * sij + 0.5 * fj * sij - avg * sij
    return out


def _matrix_field(a: np.ndarray, X: np.ndarray) -> np.ndarray:
    lam = _lambda(a, np.diag(X).copy())
    return commutator(lam, X)


def matrix_field(a, X) -> np.ndarray:
    """Return ``[L, X]`` with ``L`` built from the diagonal of ``X``."""
    a = as_payoff(a)
    X = check_frequency_matrix(X)
    if X.shape != a.shape:
        raise ValueError(f"dimension mismatch: X is {X.shape}, payoff is {a.shape}")
    as_simplex(np.diag(X), tol=X_TOL)
    return _matrix_field(a, X)


@dataclass(frozen=True)
class DecompositionCheck:
    """Residuals (max-abs) of each identity in the G/Q/X decomposition."""

    residuals: dict
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def verify_decomposition(a, x, tol: float = 1e-10) -> DecompositionCheck:
    """Evaluate every intermediate matrix of the matrix-form derivation.

    Requires a strictly interior state because the construction multiplies
    by ``x_i ** -0.5``.
    """
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    if np.any(x < EPSILON_INTERIOR):
        raise BoundarySingularityError(
            "state is not strictly interior: x_i ** -0.5 is singular at the boundary"
        )
    n = x.size
    dxdt = _field(a, x)
    xh = np.sqrt(x)
    v = dxdt / xh
    U = build_U(a, x)
    Q = build_Q(a, x)
    X = _build_X(x)
    f = a @ x
    avg = x @ f

    G = 0.5 * np.outer(v, xh)
    g_elem = np.array([[0.5 * xh[j] / xh[i] * dxdt[i] for j in range(n)] for i in range(n)])
    s = np.sqrt(np.outer(x, x))
    G1_elem = 0.5 * f[:, None] * s
    G2_elem = 0.5 * f[None, :] * s
    G3_elem = avg * s
    G1, G2, G3 = Q @ X, X @ Q, 2.0 * X @ Q @ X
    sym = G + G.T
    field = _matrix_field(a, X)

    def r(p, q):
        return float(np.max(np.abs(p - q)))

    residuals = {
        "v_equals_U_xhat": r(v, U @ xh),
        "G_elements": r(G, g_elem),
        "G_equals_half_U_xhat_xhatT": r(G, 0.5 * U @ np.outer(xh, xh)),
        "G1_equals_QX": r(G1, G1_elem),
        "G2_equals_XQ": r(G2, G2_elem),
        "G3_equals_2XQX": r(G3, G3_elem),
        "G_sym_equals_G1_G2_G3": r(sym, G1 + G2 - G3),
        "G_sym_equals_matrix_field": r(sym, field),
        "double_commutator": r(commutator(commutator(Q, X), X), field),
        "theta_elements": r(theta_elements(a, x), field),
        "lambda_elements": r(lambda_elements(a, x), commutator(Q, X)),
        "diagonal_equals_vector_field": r(np.diag(field), dxdt),
    }
    return DecompositionCheck(residuals, tol)


@dataclass(frozen=True)
class MatrixTrajectory:
    """Frequency matrices at uniform times plus drift diagnostics.

    ``trace_drift`` and ``idempotency_drift`` hold ``|Tr X - 1|`` and
    ``max|X^2 - X|`` per stored step.
    """

    times: np.ndarray
    matrices: np.ndarray
    avg_fitness: np.ndarray
    entropy: np.ndarray
    trace_drift: np.ndarray
    idempotency_drift: np.ndarray
    projection: str

    def __len__(self):
        return len(self.times)

    def diagonals(self) -> np.ndarray:
        return np.diagonal(self.matrices, axis1=1, axis2=2).copy()


def integrate_matrix(
    a,
    X0,
    cfg: IntegratorConfig | None = None,
    projection: str = "diagonal-rebuild",
) -> MatrixTrajectory:
    """Fixed-step integration of ``dX/dt = [L, X]``.

    With ``projection="diagonal-rebuild"`` the diagonal is clipped,
    renormalized and ``X`` rebuilt after every step. With ``"none"`` the raw
    steps are stored and the invariant drift is only measured.
    """
    cfg = cfg or IntegratorConfig()
    if projection not in PROJECTIONS:
        raise ValueError(f"unknown projection {projection!r}; expected one of {PROJECTIONS}")
    a = as_payoff(a)
    X = check_frequency_matrix(X0)
    if X.shape != a.shape:
        raise ValueError(f"dimension mismatch: X0 is {X.shape}, payoff is {a.shape}")
    as_simplex(np.diag(X), tol=X_TOL)
    cfg.check_dimension(a.shape[0])

    step = stepper(cfg.method)
    times = cfg.times()
    mats = np.empty((len(times),) + X.shape)
    mats[0] = X

    def field(M):
        return _matrix_field(a, M)

    for k in range(1, len(times)):
        X = step(field, X, cfg.dt)
        check_finite(X, k)
        if projection == "diagonal-rebuild":
            d = project_simplex(np.clip(np.diag(X), 0.0, 1.0), cfg.boundary_clip, True)
            X = _build_X(d)
        mats[k] = X

    diags = np.diagonal(mats, axis1=1, axis2=2)
    avg = np.einsum("ti,ij,tj->t", diags, a, diags)
    ent = np.array([shannon_entropy(np.clip(d, 0.0, None)) for d in diags])
    trace_drift = np.abs(np.trace(mats, axis1=1, axis2=2) - 1.0)
    idem = np.max(np.abs(mats @ mats - mats), axis=(1, 2))
    return MatrixTrajectory(times, mats, avg, ent, trace_drift, idem, projection)
