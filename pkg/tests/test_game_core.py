from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from quantum_replicator.game_core import (
    AsymmetricGame,
    EquilibriumReport,
    average_fitness,
    best_replies,
    find_equilibria,
    fitness,
    is_ess,
    is_nash,
    simplex_lattice,
)

from .conftest import HAWK_DOVE, PRISONERS, RPS


def loop_fitness(a, x, i):
    return sum(Fraction(a[i][j]) * Fraction(x[j]) for j in range(len(x)))


def test_fitness_examples():
    x = (0.5, 0.5)
    assert fitness(PRISONERS, x, 0) == float(loop_fitness([[3, 0], [5, 1]], x, 0)) == 1.5
    assert fitness(PRISONERS, x, 1) == float(loop_fitness([[3, 0], [5, 1]], x, 1)) == 3.0


def test_fitness_pure_strategy_selects_entry(rng):
    a = rng.uniform(-1, 1, (4, 4))
    for j in range(4):
        e = np.eye(4)[j]
        for i in range(4):
            assert fitness(a, e, i) == a[i, j]


def test_fitness_errors():
    with pytest.raises(IndexError):
        fitness(PRISONERS, (0.5, 0.5), 2)
    with pytest.raises(ValueError, match="dimension mismatch"):
        fitness(PRISONERS, (0.2, 0.3, 0.5), 0)
    with pytest.raises(ValueError, match="square"):
        fitness(np.ones((2, 3)), (0.5, 0.5), 0)


def test_average_fitness_examples(rng):
    assert average_fitness(PRISONERS, (0.5, 0.5)) == pytest.approx(2.25, abs=1e-15)
    for _ in range(10):
        assert abs(average_fitness(RPS, rng.dirichlet(np.ones(3)))) < 1e-15
    a = rng.uniform(-1, 1, (3, 3))
    for j in range(3):
        assert average_fitness(a, np.eye(3)[j]) == a[j, j]


def test_best_replies_examples():
    assert best_replies(PRISONERS, (0.5, 0.5)) == {1}
    assert best_replies(HAWK_DOVE, (0.5, 0.5)) == {0, 1}
    same_rows = np.array([[1.0, 2.0, 3.0]] * 3)
    assert best_replies(same_rows, (0.2, 0.3, 0.5)) == {0, 1, 2}


def test_is_nash_examples():
    assert is_nash(PRISONERS, (0, 1)) == (True, True)
    assert is_nash(HAWK_DOVE, (0.5, 0.5)) == (True, False)
    assert is_nash(PRISONERS, (1, 0)) == (False, False)


def brute_force_ess(a, p, samples=200_000, seed=7, tol=1e-9):
    """Random Dirichlet mutants, independent of the lattice used by is_ess.

    Mutants closer than 1e-3 to p are dropped: the second ESS condition is
    quadratic in |r - p| and falls under ``tol`` there.
    """
    rng = np.random.default_rng(seed)
    n = len(p)
    r = np.vstack([np.eye(n), rng.dirichlet(np.full(n, 0.7), samples)])
    r = r[np.max(np.abs(r - p), axis=1) > 1e-3]
    e_pp = p @ a @ p
    e_rp = r @ a @ p
    e_pr = r @ a.T @ p
    e_rr = np.einsum("ki,ij,kj->k", r, a, r)
    return bool(np.all((e_pp > e_rp + tol) | ((abs(e_pp - e_rp) <= tol) & (e_pr > e_rr + tol))))


@pytest.mark.parametrize(
    "a, p, expected",
    [
        (HAWK_DOVE, np.array([0.5, 0.5]), True),
        (RPS, np.full(3, 1 / 3), False),
        (PRISONERS, np.array([0.0, 1.0]), True),
    ],
)
def test_is_ess_examples(a, p, expected):
    assert brute_force_ess(a, p) is expected
    assert is_ess(a, p) is expected


def test_is_ess_rejects_non_nash():
    assert not is_ess(PRISONERS, (1, 0))


def test_simplex_lattice_counts():
    pts = simplex_lattice(3, 4)
    assert len(pts) == 15  # C(6, 2)
    assert np.allclose(pts.sum(axis=1), 1.0)
    assert len({tuple(p) for p in pts}) == 15


def test_find_equilibria_hawk_dove():
    reports = find_equilibria(HAWK_DOVE)
    by_state = {tuple(np.round(r.state, 12)): r for r in reports}
    assert set(by_state) == {(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)}
    assert not by_state[(1.0, 0.0)].is_nash
    assert not by_state[(0.0, 1.0)].is_nash
    mixed = by_state[(0.5, 0.5)]
    assert mixed.is_nash and mixed.is_ess and not mixed.is_strict
    assert mixed.support == {0, 1}


def test_find_equilibria_prisoners():
    nash = [r for r in find_equilibria(PRISONERS) if r.is_nash]
    assert len(nash) == 1
    assert np.array_equal(nash[0].state, [0.0, 1.0])
    assert nash[0].is_strict and nash[0].is_ess


def test_find_equilibria_rps():
    nash = [r for r in find_equilibria(RPS) if r.is_nash]
    assert len(nash) == 1
    assert np.allclose(nash[0].state, 1 / 3, atol=1e-14)
    assert not nash[0].is_ess


def test_find_equilibria_skips_singular_support(caplog):
    a = np.array([[1.0, 2.0], [1.0, 2.0]])
    with caplog.at_level("INFO"):
        reports = find_equilibria(a)
    assert "singular support" in caplog.text
    assert len(reports) == 2


def test_find_equilibria_size_guard():
    with pytest.raises(ValueError, match="n <= 5"):
        find_equilibria(np.zeros((6, 6)))


def test_report_invariants():
    with pytest.raises(ValueError):
        EquilibriumReport(np.array([1.0]), is_nash=False, is_strict=True, is_ess=False)
    with pytest.raises(ValueError):
        EquilibriumReport(np.array([1.0]), is_nash=False, is_strict=False, is_ess=True)


def test_asymmetric_game_shapes():
    AsymmetricGame(np.ones((2, 3)), np.ones((3, 2)))
    with pytest.raises(ValueError):
        AsymmetricGame(np.ones((2, 3)), np.ones((2, 3)))


# -- properties --------------------------------------------------------------

finite = st.floats(-10, 10, allow_nan=False)


@st.composite
def game_and_states(draw, n=None):
    n = n or draw(st.integers(2, 5))
    a = draw(hnp.arrays(float, (n, n), elements=finite))
    w1 = draw(hnp.arrays(float, n, elements=st.floats(0.01, 1)))
    w2 = draw(hnp.arrays(float, n, elements=st.floats(0.01, 1)))
    return a, w1 / w1.sum(), w2 / w2.sum()


@settings(max_examples=100, deadline=None)
@given(game_and_states(), st.floats(0, 1))
def test_fitness_is_linear(data, alpha):
    a, x, y = data
    z = alpha * x + (1 - alpha) * y
    z = z / z.sum()
    for i in range(len(x)):
        lhs = fitness(a, z, i)
        rhs = alpha * fitness(a, x, i) + (1 - alpha) * fitness(a, y, i)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, np.abs(a).max())


@settings(max_examples=100, deadline=None)
@given(game_and_states())
def test_average_fitness_forms_agree(data):
    a, x, _ = data
    quad = average_fitness(a, x)
    weighted = sum(x[i] * fitness(a, x, i) for i in range(len(x)))
    double = sum(a[k, l] * x[k] * x[l] for k in range(len(x)) for l in range(len(x)))
    scale = max(1.0, np.abs(a).max())
    assert abs(quad - weighted) < 1e-12 * scale
    assert abs(quad - double) < 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(float, (3, 3), elements=st.floats(-1, 1)))
def test_ess_implies_nash_and_strict_implies_ess(a):
    for r in find_equilibria(a):
        if r.is_ess:
            assert r.is_nash
        if r.is_strict:
            assert r.is_ess


@settings(max_examples=40, deadline=None)
@given(
    hnp.arrays(float, (3, 3), elements=st.integers(-4, 4).map(float)),
    st.integers(0, 2),
    st.integers(-5, 5).map(float),
)
def test_column_shift_invariance(a, col, c):
    # integer payoffs keep every payoff margin either exactly zero or far above tol
    shifted = a.copy()
    shifted[:, col] += c
    for r in find_equilibria(a):
        p = r.state
        assert is_nash(a, p) == is_nash(shifted, p)
        assert is_ess(a, p) == is_ess(shifted, p)
        assert best_replies(a, p) == best_replies(shifted, p)
