"""Symmetric two-player games: fitness, best replies and Nash/ESS checks.

Payoff matrices are plain ``numpy`` arrays with rows indexed by the focal
strategy and columns by the opponent strategy. Population states are points
of the probability simplex. Strategy indices are zero-based.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from ._checks import as_payoff, as_simplex, check_index

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
MAX_ENUMERATION_SIZE = 5

CANONICAL_GAMES = {
    "hawk-dove": ((-1.0, 2.0), (0.0, 1.0)),
    "prisoners-dilemma": ((3.0, 0.0), (5.0, 1.0)),
    "rock-paper-scissors": ((0.0, -1.0, 1.0), (1.0, 0.0, -1.0), (-1.0, 1.0, 0.0)),
    "matching-pennies": ((1.0, -1.0), (-1.0, 1.0)),
}

__all__ = [
    "CANONICAL_GAMES",
    "AsymmetricGame",
    "EquilibriumReport",
    "average_fitness",
    "best_replies",
    "default_mutant_grid",
    "find_equilibria",
    "fitness",
    "fitness_vector",
    "is_ess",
    "is_nash",
    "payoff",
    "simplex_lattice",
]


@dataclass(frozen=True)
class AsymmetricGame:
    """Bimatrix game; ``a`` is n x m for player one, ``b`` is m x n for player two."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_payoff(self.a, square=False)
        b = as_payoff(self.b, square=False)
        if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
            raise ValueError(f"incompatible bimatrix shapes {a.shape} and {b.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape


@dataclass(frozen=True)
class EquilibriumReport:
    state: np.ndarray
    is_nash: bool
    is_strict: bool
    is_ess: bool
    support: frozenset = field(default_factory=frozenset)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.is_strict and not self.is_nash:
            raise ValueError("a strict equilibrium must be Nash")
        if self.is_ess and not self.is_nash:
            raise ValueError("an ESS must be Nash")


def _game_and_state(a, x):
    a = as_payoff(a)
    x = as_simplex(x, a.shape[0])
    return a, x


def fitness_vector(a, x) -> np.ndarray:
    """Return ``A x``, the payoff of every pure strategy against ``x``."""
    a, x = _game_and_state(a, x)
    return a @ x


def fitness(a, x, i: int) -> float:
    a, x = _game_and_state(a, x)
    i = check_index(i, a.shape[0])
    return float(np.dot(a[i], x))


def average_fitness(a, x) -> float:
    a, x = _game_and_state(a, x)
    return float(x @ a @ x)


def payoff(a, p, q) -> float:
    """Expected payoff E(p, q) of strategy ``p`` against strategy ``q``."""
    a = as_payoff(a)
    p = as_simplex(p, a.shape[0])
    q = as_simplex(q, a.shape[0])
    return float(p @ a @ q)


def best_replies(a, q, tol: float = DEFAULT_TOL) -> frozenset:
    f = fitness_vector(a, q)
    return frozenset(int(i) for i in np.flatnonzero(f >= f.max() - tol))


def is_nash(a, p, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """Return ``(is_nash, is_strict)`` for the symmetric profile ``(p, p)``.

    Checking pure deviations suffices since E(r, p) is linear in r.
    A strict equilibrium needs a pure ``p`` that beats every other pure
    strategy by more than ``tol``.
    """
    a, p = _game_and_state(a, p)
    f = a @ p
    e_pp = float(p @ f)
    nash = bool(np.all(e_pp >= f - tol))
    support = np.flatnonzero(p > tol)
    strict = False
    if nash and support.size == 1:
        others = np.delete(f, support[0])
        strict = bool(np.all(e_pp > others + tol))
    return nash, strict


def simplex_lattice(n: int, m: int) -> np.ndarray:
    """All points of the simplex whose coordinates are multiples of 1/m."""
    rows = []
    # stars and bars: choose n-1 bar positions among m+n-1 slots
    for bars in itertools.combinations(range(m + n - 1), n - 1):
        edges = (-1,) + bars + (m + n - 1,)
        rows.append([edges[k + 1] - edges[k] - 1 for k in range(n)])
    return np.asarray(rows, dtype=float) / m


def default_mutant_grid(n: int) -> int:
    return 50 if n <= 2 else 20


def is_ess(a, p, tol: float = DEFAULT_TOL, mutant_grid: int | None = None) -> bool:
    """Test the two ESS conditions against pure mutants and a simplex lattice.

    A strict Nash equilibrium is accepted without the mutant scan.
    """
    a, p = _game_and_state(a, p)
    n = a.shape[0]
    if mutant_grid is None:
        mutant_grid = default_mutant_grid(n)
    if mutant_grid < 2:
        raise ValueError("mutant_grid must be at least 2")
    nash, strict = is_nash(a, p, tol)
    if not nash:
        return False
    if strict:
        return True

    mutants = np.vstack([np.eye(n), simplex_lattice(n, mutant_grid)])
    mutants = mutants[np.max(np.abs(mutants - p), axis=1) > 1e-12]
    e_pp = p @ a @ p
    e_rp = mutants @ (a @ p)
    e_pr = mutants @ (a.T @ p)
    e_rr = np.einsum("ki,ij,kj->k", mutants, a, mutants)

    first = e_pp > e_rp + tol
    second = (np.abs(e_pp - e_rp) <= tol) & (e_pr > e_rr + tol)
    return bool(np.all(first | second))


def _support_solution(a: np.ndarray, support: tuple[int, ...]) -> np.ndarray | None:
    k = len(support)
    idx = np.asarray(support)
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = a[np.ix_(idx, idx)]
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    if np.linalg.cond(system) > 1e12:
        return None
    sol = np.linalg.solve(system, rhs)
    x = np.zeros(a.shape[0])
    x[idx] = sol[:k]
    return x


def find_equilibria(
    a,
    tol: float = DEFAULT_TOL,
    mutant_grid: int | None = None,
) -> list[EquilibriumReport]:
    """Enumerate support-equalizing states and classify each one.

    Every support set is tried in order of size. States outside the simplex
    are dropped, singular support systems are skipped (logged at INFO), and
    duplicates reached from different supports are reported once.
    """
    a = as_payoff(a)
    n = a.shape[0]
    if n > MAX_ENUMERATION_SIZE:
        raise ValueError(f"support enumeration is limited to n <= {MAX_ENUMERATION_SIZE}, got {n}")

    found: list[np.ndarray] = []
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            x = _support_solution(a, support)
            if x is None:
                log.info("skipping singular support system %s", support)
                continue
            if np.any(x < -tol):
                continue
            x = np.maximum(x, 0.0)
            x /= x.sum()
            if any(np.max(np.abs(x - y)) < 1e-9 for y in found):
                continue
            found.append(x)

    reports = []
    for x in found:
        nash, strict = is_nash(a, x, tol)
        ess = is_ess(a, x, tol, mutant_grid) if nash else False
        reports.append(
            EquilibriumReport(
                state=x,
                is_nash=nash,
                is_strict=strict,
                is_ess=ess,
                support=frozenset(int(i) for i in np.flatnonzero(x > tol)),
                tol=tol,
            )
        )
    return reports
