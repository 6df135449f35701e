"""Replicator dynamics, its matrix (commutator) form and the density-matrix bridge."""

from ._checks import BoundarySingularityError, ConvergenceError, NumericalError
from .game_core import (
    CANONICAL_GAMES,
    AsymmetricGame,
    EquilibriumReport,
    average_fitness,
    best_replies,
    find_equilibria,
    fitness,
    is_ess,
    is_nash,
)
from .matrix_form import (
    build_lambda,
    build_Q,
    build_U,
    build_X,
    integrate_matrix,
    matrix_field,
    verify_decomposition,
)
from .quantum_bridge import (
    Ensemble,
    coherence,
    density_from_ensemble,
    density_from_pure,
    diagonal_entropy,
    entropy,
    expectation,
    fixed_hamiltonian,
    gibbs_state,
    hamiltonian_from_state,
    integrate_von_neumann,
    partition_function,
    payoff_generator,
    purity,
    quantized_average_fitness,
    quantized_fitness,
    trace_fitness_identities,
    von_neumann_field,
)
from .replicator_ode import (
    FixedPointReport,
    Trajectory,
    asymmetric_field,
    find_fixed_point,
    integrate,
    integrate_asymmetric,
    replicator_field,
)
from .stepping import IntegratorConfig

__version__ = "0.1.0"
