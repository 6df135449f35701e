"""Density operators, von Neumann evolution, entropy and Gibbs states.

Conventions: hbar = 1 and the Boltzmann constant is dropped, so entropies
are in nats and ``beta`` is an inverse energy. The quantized game maps the
population state onto the diagonal of a density matrix and the frequency
matrix ``X`` onto the density matrix itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._checks import NumericalError, as_payoff, check_finite, check_index
from .matrix_form import commutator
from .replicator_ode import shannon_entropy
from .stepping import IntegratorConfig, stepper

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
DIAGONAL_TOL = 1e-10

Generator = Callable[[np.ndarray], np.ndarray]


# -- states -----------------------------------------------------------------


def as_state_vector(psi, tol: float = 1e-12) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise ValueError(f"state vector must be a non-empty 1-d array, got shape {psi.shape}")
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector is not normalized (squared norm {norm!r})")
    return psi


def _is_hermitian(m: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def check_density(rho, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = np.asarray(rho)
    if not np.iscomplexobj(rho):
        rho = rho.astype(float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if not _is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def check_hamiltonian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h)
    if not np.iscomplexobj(h):
        h = h.astype(float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("Hamiltonian has non-finite entries")
    if not _is_hermitian(h, tol):
        raise ValueError("Hamiltonian is not Hermitian")
    return h


def density_from_pure(psi) -> np.ndarray:
    psi = as_state_vector(psi)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class Ensemble:
    weights: np.ndarray
    states: Sequence

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.states):
            raise ValueError(f"{w.size} weights for {len(self.states)} states")
        if np.any(w < 0) or np.any(w > 1) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble weights must lie in [0, 1] and sum to 1")
        states = tuple(as_state_vector(s) for s in self.states)
        if len({s.size for s in states}) > 1:
            raise ValueError("ensemble states have different dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)


def density_from_ensemble(e: Ensemble) -> np.ndarray:
    rho = sum(p * np.outer(s, s.conj()) for p, s in zip(e.weights, e.states))
    return check_density(rho)


def expectation(rho, a) -> float:
    """Ensemble average ``Tr(rho A)`` of a Hermitian observable."""
    rho = np.asarray(rho)
    a = np.asarray(a)
    if rho.shape != a.shape:
        raise ValueError(f"dimension mismatch: rho is {rho.shape}, observable is {a.shape}")
    if not _is_hermitian(a, HERMITIAN_TOL):
        raise ValueError("observable is not Hermitian")
    val = np.trace(rho @ a)
    if abs(np.imag(val)) > 1e-12:
        raise NumericalError(f"expectation has imaginary part {np.imag(val)!r}")
    return float(np.real(val))


def coherence(rho, n_index: int, p_index: int) -> complex:
    rho = np.asarray(rho)
    n_index = check_index(n_index, rho.shape[0])
    p_index = check_index(p_index, rho.shape[1])
    return complex(rho[n_index, p_index])


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def von_neumann_field(h, rho) -> np.ndarray:
    """Right-hand side ``-i [H, rho]`` of the von Neumann equation."""
    h = check_hamiltonian(h)
    rho = np.asarray(rho)
    if h.shape != rho.shape:
        raise ValueError(f"dimension mismatch: H is {h.shape}, rho is {rho.shape}")
    return -1j * commutator(h, rho)


# -- entropy and thermal states --------------------------------------------


def entropy(m) -> float:
    """Von Neumann entropy ``-Tr(m ln m)`` in nats, with ``0 ln 0 = 0``.

    Works for density matrices and frequency matrices alike.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not _is_hermitian(m, 1e-10):
        raise ValueError("matrix is not Hermitian")
    lam = np.linalg.eigvalsh(m)
    if np.min(lam) < -PSD_TOL:
        raise ValueError(f"matrix has eigenvalue {np.min(lam)!r} below -{PSD_TOL}")
    return shannon_entropy(np.clip(lam, 0.0, None))


def diagonal_entropy(x) -> float:
    return shannon_entropy(np.asarray(x, dtype=float))


def _spectrum(h: np.ndarray):
    if np.count_nonzero(h - np.diag(np.diag(h))) == 0:
        return np.real(np.diag(h)).astype(float), None
    return np.linalg.eigh(h)


def _shifted_weights(energies: np.ndarray, beta: float):
    if not (np.isfinite(beta) and beta >= 0):
        raise ValueError(f"beta must be a finite non-negative number, got {beta!r}")
    e_min = float(np.min(energies))
    return np.exp(-beta * (energies - e_min)), e_min


def log_partition_function(h, beta: float) -> float:
    energies, _ = _spectrum(check_hamiltonian(h))
    w, e_min = _shifted_weights(energies, beta)
    return float(np.log(np.sum(w)) - beta * e_min)


def partition_function(h, beta: float) -> float:
    """``Z = Tr exp(-beta H)`` evaluated with the ground energy factored out."""
    energies, _ = _spectrum(check_hamiltonian(h))
    w, e_min = _shifted_weights(energies, beta)
    with np.errstate(over="raise"):
        try:
            z = float(np.sum(w) * np.exp(-beta * e_min))
        except FloatingPointError:
            z = np.inf
    if not np.isfinite(z) or z <= 0:
        raise OverflowError(f"partition function is not representable (log Z = {np.log(np.sum(w)) - beta * e_min})")
    return z


def gibbs_state(h, beta: float) -> np.ndarray:
    """Thermal state ``exp(-beta H) / Z`` built in the eigenbasis of ``H``."""
    h = check_hamiltonian(h)
    n = h.shape[0]
    if beta == 0:
        return np.eye(n) / n
    energies, vecs = _spectrum(h)
    w, _ = _shifted_weights(energies, beta)
    pops = w / np.sum(w)
    if vecs is None:
        return np.diag(pops)
    rho = (vecs * pops) @ vecs.conj().T
    return 0.5 * (rho + rho.conj().T)


# -- quantized game ---------------------------------------------------------


def _game_and_density(a, rho):
    a = as_payoff(a)
    rho = np.asarray(rho)
    if rho.shape != a.shape:
        raise ValueError(f"dimension mismatch: rho is {rho.shape}, payoff is {a.shape}")
    return a, np.real(np.diag(rho)).astype(float)


def quantized_fitness(a, rho, i: int) -> float:
    a, d = _game_and_density(a, rho)
    i = check_index(i, a.shape[0])
    return float(a[i] @ d)


def quantized_average_fitness(a, rho) -> float:
    a, d = _game_and_density(a, rho)
    return float(d @ a @ d)


def _is_diagonal(m: np.ndarray, tol: float = DIAGONAL_TOL) -> bool:
    off = m - np.diag(np.diag(m))
    return bool(np.max(np.abs(off)) <= tol) if off.size else True


@dataclass(frozen=True)
class StateHamiltonian:
    """Generator and Hamiltonian derived from a diagonal game and state.

    ``energy`` is ``Tr(rho H)``. It is only guaranteed to vanish when rho is
    idempotent; otherwise ``energy_flagged`` is set and the value is kept.
    """

    lam: np.ndarray
    h: np.ndarray
    energy: complex
    idempotent: bool
    energy_flagged: bool

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.h).copy()

    @property
    def eigenvectors(self) -> np.ndarray:
        return np.eye(self.h.shape[0])


def _diagonal_lambda(a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return 0.5 * (a @ rho - rho @ a @ rho)


def hamiltonian_from_state(a, rho) -> StateHamiltonian:
    a = as_payoff(a)
    rho = np.asarray(rho)
    if rho.shape != a.shape:
        raise ValueError(f"dimension mismatch: rho is {rho.shape}, payoff is {a.shape}")
    if not (_is_diagonal(a) and _is_diagonal(rho)):
        raise ValueError("payoff matrix and density matrix must both be diagonal")
    lam = _diagonal_lambda(a, rho)
    h = 1j * lam
    energy = complex(np.trace(rho @ h))
    idempotent = bool(np.max(np.abs(rho @ rho - rho)) <= 1e-12)
    if idempotent and abs(energy) > 1e-12:
        raise NumericalError(f"idempotent state with non-zero energy {energy!r}")
    return StateHamiltonian(lam, h, energy, idempotent, energy_flagged=not idempotent and abs(energy) > 1e-12)


def fixed_hamiltonian(h) -> Generator:
    """Generator for a time-independent Hamiltonian: ``drho/dt = [-iH, rho]``."""
    g = -1j * check_hamiltonian(h)
    return lambda rho: g


def payoff_generator(a, form: str = "diagonal") -> Generator:
    """State-dependent generator derived from a payoff matrix.

    ``"diagonal"`` uses ``(A rho - rho A rho) / 2``, valid for diagonal
    payoffs and states. ``"commutator"`` uses ``[Q(diag rho), rho]``, the
    matrix-form selection operator with the frequency matrix replaced by rho.
    """
    a = as_payoff(a)
    if form == "diagonal":
        if not _is_diagonal(a):
            raise ValueError("the diagonal generator needs a diagonal payoff matrix")
        return lambda rho: _diagonal_lambda(a, rho)
    if form == "commutator":
        return lambda rho: commutator(np.diag(0.5 * (a @ np.real(np.diag(rho)))), rho)
    raise ValueError(f"unknown generator form {form!r}")


@dataclass(frozen=True)
class DensityTrajectory:
    times: np.ndarray
    states: np.ndarray
    purity: np.ndarray
    entropy: np.ndarray

    def __len__(self):
        return len(self.times)


def integrate_von_neumann(
    generator: Generator,
    rho0,
    cfg: IntegratorConfig | None = None,
) -> DensityTrajectory:
    """Integrate ``drho/dt = [G(rho), rho]`` with fixed steps.

    After every step rho is replaced by its Hermitian part and rescaled to
    unit trace. Real inputs with a real generator stay real.
    """
    cfg = cfg or IntegratorConfig()
    rho = check_density(rho0)
    g0 = np.asarray(generator(rho))
    if g0.shape != rho.shape:
        raise ValueError(f"dimension mismatch: generator is {g0.shape}, rho is {rho.shape}")
    dtype = complex if (np.iscomplexobj(g0) or np.iscomplexobj(rho)) else float
    rho = rho.astype(dtype)

    def field(r):
        return commutator(generator(r), r)

    step = stepper(cfg.method)
    times = cfg.times()
    out = np.empty((len(times),) + rho.shape, dtype=dtype)
    out[0] = rho
    for k in range(1, len(times)):
        rho = step(field, rho, cfg.dt)
        check_finite(rho, k, "density matrix")
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.real(np.trace(rho))
        out[k] = rho
    pur = np.real(np.einsum("tij,tji->t", out, out))
    ent = np.array([entropy(r) for r in out])
    return DensityTrajectory(times, out, pur, ent)


# -- diagnostics ------------------------------------------------------------


@dataclass(frozen=True)
class TraceIdentities:
    trace_a_rho: complex
    expectation_sym: float
    trace_rho_a_rho: complex
    average_fitness: float
    residual_expectation: float
    residual_average: float
    residual_lambda_fixed: float
    diagonal: bool


def trace_fitness_identities(a, rho) -> TraceIdentities:
    """Compare trace forms of the quantized fitness with the elementwise ones.

    ``residual_lambda_fixed`` measures ``max|[L, rho] - L|`` for the diagonal
    generator, the special case in which the matrix flow equals ``L``.
    """
    a = as_payoff(a)
    rho = np.asarray(rho)
    if rho.shape != a.shape:
        raise ValueError(f"dimension mismatch: rho is {rho.shape}, payoff is {a.shape}")
    t_a_rho = complex(np.trace(a @ rho))
    a_sym = 0.5 * (a + a.T)
    exp_sym = float(np.real(np.trace(rho @ a_sym)))
    t_rar = complex(np.trace(rho @ a @ rho))
    avg = quantized_average_fitness(a, rho)
    lam = _diagonal_lambda(a, rho)
    return TraceIdentities(
        trace_a_rho=t_a_rho,
        expectation_sym=exp_sym,
        trace_rho_a_rho=t_rar,
        average_fitness=avg,
        residual_expectation=abs(t_a_rho - exp_sym),
        residual_average=abs(t_rar - avg),
        residual_lambda_fixed=float(np.max(np.abs(commutator(lam, rho) - lam))),
        diagonal=_is_diagonal(rho),
    )
