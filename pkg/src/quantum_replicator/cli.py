"""Scenario-driven command line front end.

Usage::

    qrepl <subcommand> --config scenario.toml [--out DIR] [--seed N] [--quiet]

Subcommands: simulate, equilibria, entropy, gibbs, compare, sweep.
Configs are TOML (or JSON for files ending in ``.json``). Trajectories are
written as CSV with 17 significant digits; run summaries as JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import game_core, matrix_form, quantum_bridge, replicator_ode
from ._checks import NumericalError, as_payoff, as_simplex
from .stepping import METHODS, IntegratorConfig

log = logging.getLogger("quantum_replicator")

MODES = ("vector", "matrix", "von-neumann", "compare")
GENERATORS = ("fixed", "diagonal", "commutator")
SUBCOMMANDS = ("simulate", "equilibria", "entropy", "gibbs", "compare", "sweep")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


class ConfigError(ValueError):
    pass


# -- config -----------------------------------------------------------------


@dataclass(frozen=True)
class QuantumSection:
    hamiltonian: tuple | None = None
    hamiltonian_imag: tuple | None = None
    initial_density: tuple | None = None
    initial_density_imag: tuple | None = None
    generator: str = "fixed"
    beta: tuple = (1.0,)


@dataclass(frozen=True)
class SweepSection:
    count: int = 20
    size: int = 3
    workers: int = 1


@dataclass(frozen=True)
class OutputSection:
    trajectory: str = "trajectory.csv"
    summary: str = "summary.json"


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario. Matrices are stored as nested tuples."""

    game: tuple | str | None = None
    game_b: tuple | None = None
    size: int | None = None
    initial_state: tuple | str | None = None
    initial_state_b: tuple | None = None
    mode: str = "vector"
    seed: int = 0
    tol: float = game_core.DEFAULT_TOL
    projection: str = "diagonal-rebuild"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    quantum: QuantumSection = field(default_factory=QuantumSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    outputs: OutputSection = field(default_factory=OutputSection)

    def to_dict(self) -> dict:
        """Config echo; feeding it back to :func:`parse_config` gives an equal scenario."""

        def clean(v):
            if isinstance(v, tuple):
                return [clean(u) for u in v]
            if isinstance(v, dict):
                return {k: clean(u) for k, u in v.items() if u is not None}
            return v

        return clean(asdict(self))


def _matrix(value, name: str, square: bool = True) -> tuple:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{name}': not a numeric matrix ({exc})") from None
    if arr.ndim != 2 or arr.size == 0:
        raise ConfigError(f"field '{name}': expected a non-empty 2-d array, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"field '{name}': matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"field '{name}': non-finite entries")
    return tuple(tuple(float(v) for v in row) for row in arr)


def _vector(value, name: str) -> tuple:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{name}': not a numeric vector ({exc})") from None
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError(f"field '{name}': expected a non-empty 1-d array")
    return tuple(float(v) for v in arr)


def _simplex(value, name: str, n: int | None) -> tuple:
    vec = _vector(value, name)
    try:
        as_simplex(vec, n, tol=1e-9)
    except ValueError as exc:
        msg = str(exc)
        if "not on simplex" in msg or "outside" in msg:
            raise ConfigError(f"field '{name}': initial state not on simplex ({msg})") from None
        raise ConfigError(f"field '{name}': {msg}") from None
    return vec


def _section(doc: dict, name: str, cls):
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"section '{name}' must be a table")
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"section '{name}': unknown field(s) {sorted(unknown)}")
    return raw


def _game_size(game) -> int | None:
    if game is None:
        return None
    if isinstance(game, str):
        return None
    return len(game)


def parse_config_dict(doc: dict) -> ScenarioConfig:
    top = {f.name for f in fields(ScenarioConfig)}
    unknown = set(doc) - top
    if unknown:
        raise ConfigError(f"unknown top-level field(s) {sorted(unknown)}")

    mode = doc.get("mode", "vector")
    if mode not in MODES:
        raise ConfigError(f"field 'mode': expected one of {MODES}, got {mode!r}")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("field 'seed': expected a non-negative integer")

    size = doc.get("size")
    game = doc.get("game")
    if isinstance(game, str):
        if game == "random":
            if not isinstance(size, int) or size < 1:
                raise ConfigError("field 'size': a positive integer is required for game = 'random'")
        elif game not in game_core.CANONICAL_GAMES:
            names = sorted(game_core.CANONICAL_GAMES) + ["random"]
            raise ConfigError(f"field 'game': unknown game {game!r}; expected a matrix or one of {names}")
    elif game is not None:
        game = _matrix(game, "game", square="game_b" not in doc)
    n = size if game == "random" else (
        len(game_core.CANONICAL_GAMES[game]) if isinstance(game, str) else _game_size(game)
    )

    game_b = doc.get("game_b")
    if game_b is not None:
        if not isinstance(game, tuple):
            raise ConfigError("field 'game_b' needs an explicit matrix in 'game'")
        game_b = _matrix(game_b, "game_b", square=False)
        if len(game_b) != len(game[0]) or len(game_b[0]) != len(game):
            raise ConfigError("dimension mismatch between 'game' and 'game_b'")
        if mode != "vector":
            raise ConfigError("asymmetric games ('game_b') are only supported in mode 'vector'")

    init = doc.get("initial_state")
    if isinstance(init, str):
        if init != "random":
            raise ConfigError("field 'initial_state': expected a vector or 'random'")
    elif init is not None:
        init = _simplex(init, "initial_state", n)
    if init == "random" and game is None:
        raise ConfigError("field 'initial_state': 'random' needs a game to size it")
    init_b = doc.get("initial_state_b")
    if init_b is not None:
        init_b = _simplex(init_b, "initial_state_b", len(game_b) if game_b else None)
    if game_b is not None and init_b is None:
        raise ConfigError("field 'initial_state_b' is required for asymmetric games")

    tol = doc.get("tol", game_core.DEFAULT_TOL)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol <= 0:
        raise ConfigError("field 'tol': expected a positive number")

    projection = doc.get("projection", "diagonal-rebuild")
    if projection not in matrix_form.PROJECTIONS:
        raise ConfigError(f"field 'projection': expected one of {matrix_form.PROJECTIONS}")

    integ = _section(doc, "integrator", IntegratorConfig)
    integ = {"dt": 0.01, "t_max": 50.0, "method": "rk4-fixed", **integ}
    if integ["method"] not in METHODS:
        raise ConfigError(f"field 'integrator.method': expected one of {METHODS}")
    try:
        integrator = IntegratorConfig(
            dt=float(integ["dt"]),
            t_max=float(integ["t_max"]),
            method=integ["method"],
            boundary_clip=float(integ.get("boundary_clip", 0.0)),
            renormalize_each_step=bool(integ.get("renormalize_each_step", True)),
        )
        if n is not None:
            integrator.check_dimension(n)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section 'integrator': {exc}") from None

    q = _section(doc, "quantum", QuantumSection)
    qkw = {}
    for key in ("hamiltonian", "hamiltonian_imag", "initial_density", "initial_density_imag"):
        if q.get(key) is not None:
            qkw[key] = _matrix(q[key], f"quantum.{key}")
    generator = q.get("generator", "fixed")
    if generator not in GENERATORS:
        raise ConfigError(f"field 'quantum.generator': expected one of {GENERATORS}")
    beta = q.get("beta", [1.0])
    beta = _vector([beta] if isinstance(beta, (int, float)) else beta, "quantum.beta")
    if any(b < 0 for b in beta):
        raise ConfigError("field 'quantum.beta': inverse temperatures must be non-negative")
    quantum = QuantumSection(generator=generator, beta=beta, **qkw)
    dims = {len(m) for m in qkw.values()}
    if n is not None:
        dims.add(n)
    if len(dims) > 1:
        raise ConfigError(f"dimension mismatch between game and quantum matrices: {sorted(dims)}")

    sw = {**asdict(SweepSection()), **_section(doc, "sweep", SweepSection)}
    for key in ("count", "size", "workers"):
        if not isinstance(sw[key], int) or sw[key] < 1:
            raise ConfigError(f"field 'sweep.{key}': expected a positive integer")
    if sw["size"] > game_core.MAX_ENUMERATION_SIZE:
        raise ConfigError(f"field 'sweep.size': at most {game_core.MAX_ENUMERATION_SIZE}")
    sweep = SweepSection(**sw)

    outputs = OutputSection(**_section(doc, "outputs", OutputSection))

    return ScenarioConfig(
        game=game,
        game_b=game_b,
        size=size,
        initial_state=init,
        initial_state_b=init_b,
        mode=mode,
        seed=seed,
        tol=float(tol),
        projection=projection,
        integrator=integrator,
        quantum=quantum,
        sweep=sweep,
        outputs=outputs,
    )


def check_mode_fields(cfg: ScenarioConfig, mode: str) -> None:
    """Raise :class:`ConfigError` if ``cfg`` lacks what ``mode`` needs to run."""
    q = cfg.quantum
    if mode in ("vector", "matrix", "compare"):
        if cfg.game is None:
            raise ConfigError(f"field 'game' is required for mode {mode!r}")
        if cfg.initial_state is None:
            raise ConfigError(f"field 'initial_state' is required for mode {mode!r}")
    if mode == "von-neumann":
        if q.generator == "fixed" and q.hamiltonian is None:
            raise ConfigError("field 'quantum.hamiltonian' is required for the fixed generator")
        if q.generator != "fixed" and cfg.game is None:
            raise ConfigError(f"field 'game' is required for the {q.generator!r} generator")
        if q.initial_density is None and cfg.initial_state is None:
            raise ConfigError("von-neumann mode needs 'quantum.initial_density' or 'initial_state'")


def parse_config(text: str, fmt: str = "toml") -> ScenarioConfig:
    """Parse and validate a scenario document (TOML or JSON)."""
    try:
        if fmt == "toml":
            doc = tomllib.loads(text)
        elif fmt == "json":
            doc = json.loads(text)
        else:
            raise ConfigError(f"unknown config format {fmt!r}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a table/object")
    return parse_config_dict(doc)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "toml"
    return parse_config(path.read_text(encoding="utf-8"), fmt)


# -- scenario resolution ----------------------------------------------------


def random_game(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(n, n))


def resolve(cfg: ScenarioConfig):
    """Return ``(A, x0)`` with random parts drawn from ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.game is None:
        a = None
    elif cfg.game == "random":
        a = random_game(rng, cfg.size)
    elif isinstance(cfg.game, str):
        a = np.array(game_core.CANONICAL_GAMES[cfg.game])
    else:
        a = np.array(cfg.game)
    if cfg.initial_state == "random":
        x0 = rng.dirichlet(np.ones(a.shape[0]))
    elif cfg.initial_state is None:
        x0 = None
    else:
        x0 = np.array(cfg.initial_state)
        x0 = x0 / x0.sum()
    return a, x0


def _complex(re, im):
    m = np.array(re, dtype=float)
    if im is not None:
        m = m + 1j * np.array(im, dtype=float)
    return m


# -- output -----------------------------------------------------------------


def fmt_number(v) -> str:
    return format(float(v), ".17g")


def write_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(fmt_number(v) for v in row) for row in rows)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_trajectory(t, path, observables: dict | None = None) -> None:
    """Write a trajectory as CSV, one row per stored step.

    State columns depend on the trajectory kind: ``x_i`` for vectors, the
    upper triangle ``X_ij`` for frequency matrices and ``rho_ij_re`` /
    ``rho_ij_im`` for density matrices. Observable columns default to
    ``avg_fitness`` and ``entropy``.
    """
    if len(t) == 0:
        raise ValueError("cannot write an empty trajectory")
    if isinstance(t, replicator_ode.Trajectory):
        n = t.states.shape[1]
        header = [f"x_{i + 1}" for i in range(n)]
        cols = [t.states[:, i] for i in range(n)]
    elif isinstance(t, matrix_form.MatrixTrajectory):
        n = t.matrices.shape[1]
        iu = np.triu_indices(n)
        header = [f"X_{i + 1}{j + 1}" for i, j in zip(*iu)]
        cols = [t.matrices[:, i, j] for i, j in zip(*iu)]
    elif isinstance(t, quantum_bridge.DensityTrajectory):
        n = t.states.shape[1]
        header, cols = [], []
        for i, j in zip(*np.triu_indices(n)):
            header += [f"rho_{i + 1}{j + 1}_re", f"rho_{i + 1}{j + 1}_im"]
            cols += [np.real(t.states[:, i, j]), np.imag(t.states[:, i, j])]
    else:
        raise TypeError(f"unsupported trajectory type {type(t).__name__}")
    if observables is None:
        observables = {"avg_fitness": t.avg_fitness, "entropy": t.entropy}
    header = ["t"] + header + list(observables)
    cols = [t.times] + cols + [np.asarray(v) for v in observables.values()]
    write_csv(path, header, zip(*cols))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (set, frozenset)):
        return sorted(_jsonable(u) for u in v)
    return v


@dataclass
class RunSummary:
    command: str
    config: dict
    results: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    duration_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True) + "\n"


def _equilibria_records(a, tol):
    if a.shape[0] > game_core.MAX_ENUMERATION_SIZE:
        return []
    return [
        {
            "state": r.state,
            "is_nash": r.is_nash,
            "is_strict": r.is_strict,
            "is_ess": r.is_ess,
            "support": r.support,
        }
        for r in game_core.find_equilibria(a, tol)
    ]


# -- runners ----------------------------------------------------------------


def _run_vector(cfg, a, x0, out: Path, summary: RunSummary):
    if cfg.game_b is not None:
        game = game_core.AsymmetricGame(a, np.array(cfg.game_b))
        tx, ty = replicator_ode.integrate_asymmetric(game, x0, np.array(cfg.initial_state_b), cfg.integrator)
        path_x = out / cfg.outputs.trajectory
        path_y = path_x.with_name(path_x.stem + "_b" + path_x.suffix)
        emit_trajectory(tx, path_x)
        emit_trajectory(ty, path_y)
        dx, dy = replicator_ode.asymmetric_field(game, tx.final, ty.final)
        summary.files += [path_x.name, path_y.name]
        summary.results.update(
            final_state=tx.final,
            final_state_b=ty.final,
            residual=float(max(np.max(np.abs(dx)), np.max(np.abs(dy)))),
            entropy_endpoints=[tx.entropy[0], tx.entropy[-1]],
            entropy_endpoints_b=[ty.entropy[0], ty.entropy[-1]],
        )
        return
    traj = replicator_ode.integrate(a, x0, cfg.integrator)
    path = out / cfg.outputs.trajectory
    emit_trajectory(traj, path)
    summary.files.append(path.name)
    summary.results.update(
        final_state=traj.final,
        residual=float(np.max(np.abs(replicator_ode.replicator_field(a, traj.final)))),
        entropy_endpoints=[traj.entropy[0], traj.entropy[-1]],
        equilibria=_equilibria_records(a, cfg.tol),
    )


def _run_matrix(cfg, a, x0, out: Path, summary: RunSummary):
    traj = matrix_form.integrate_matrix(a, matrix_form.build_X(x0), cfg.integrator, cfg.projection)
    path = out / cfg.outputs.trajectory
    emit_trajectory(traj, path)
    summary.files.append(path.name)
    final = traj.matrices[-1]
    d = np.clip(np.diag(final), 0.0, None)
    d = d / d.sum()
    summary.results.update(
        final_state=d,
        final_matrix=final,
        residual=float(np.max(np.abs(replicator_ode.replicator_field(a, d)))),
        entropy_endpoints=[traj.entropy[0], traj.entropy[-1]],
        max_trace_drift=float(traj.trace_drift.max()),
        max_idempotency_drift=float(traj.idempotency_drift.max()),
        equilibria=_equilibria_records(a, cfg.tol),
    )


def _run_compare(cfg, a, x0, out: Path, summary: RunSummary):
    vec = replicator_ode.integrate(a, x0, cfg.integrator)
    mat = matrix_form.integrate_matrix(a, matrix_form.build_X(x0), cfg.integrator, cfg.projection)
    dev = np.max(np.abs(mat.diagonals() - vec.states), axis=1)
    path = out / cfg.outputs.trajectory
    mpath = path.with_name(path.stem + "_matrix" + path.suffix)
    dpath = path.with_name(path.stem + "_deviation" + path.suffix)
    emit_trajectory(vec, path)
    emit_trajectory(mat, mpath)
    write_csv(dpath, ["t", "max_deviation"], zip(vec.times, dev))
    summary.files += [path.name, mpath.name, dpath.name]
    summary.results.update(
        final_state=vec.final,
        final_state_matrix=mat.diagonals()[-1],
        residual=float(np.max(np.abs(replicator_ode.replicator_field(a, vec.final)))),
        max_deviation=float(dev.max()),
        entropy_endpoints=[vec.entropy[0], vec.entropy[-1]],
    )


def _density0(cfg, x0):
    q = cfg.quantum
    if q.initial_density is not None:
        return _complex(q.initial_density, q.initial_density_imag)
    return matrix_form.build_X(x0)


def _run_von_neumann(cfg, a, x0, out: Path, summary: RunSummary):
    q = cfg.quantum
    rho0 = _density0(cfg, x0)
    observables = {}
    if q.generator == "fixed":
        h = _complex(q.hamiltonian, q.hamiltonian_imag)
        gen = quantum_bridge.fixed_hamiltonian(h)
    else:
        gen = quantum_bridge.payoff_generator(a, q.generator)
    traj = quantum_bridge.integrate_von_neumann(gen, rho0, cfg.integrator)
    if a is not None:
        observables["avg_fitness"] = [quantum_bridge.quantized_average_fitness(a, r) for r in traj.states]
    if q.generator == "fixed":
        observables["energy"] = np.real(np.einsum("tij,ji->t", traj.states, h))
    observables["purity"] = traj.purity
    observables["entropy"] = traj.entropy
    path = out / cfg.outputs.trajectory
    emit_trajectory(traj, path, observables)
    summary.files.append(path.name)
    summary.results.update(
        final_density=traj.states[-1],
        final_diagonal=np.real(np.diag(traj.states[-1])),
        max_trace_drift=float(np.max(np.abs(np.trace(traj.states, axis1=1, axis2=2) - 1.0))),
        purity_endpoints=[traj.purity[0], traj.purity[-1]],
        entropy_endpoints=[traj.entropy[0], traj.entropy[-1]],
    )


def cmd_simulate(cfg, out, summary, mode=None):
    mode = mode or cfg.mode
    check_mode_fields(cfg, mode)
    a, x0 = resolve(cfg)
    summary.results["mode"] = mode
    runner = {
        "vector": _run_vector,
        "matrix": _run_matrix,
        "compare": _run_compare,
        "von-neumann": _run_von_neumann,
    }[mode]
    runner(cfg, a, x0, out, summary)


def cmd_compare(cfg, out, summary):
    if cfg.game is None or cfg.initial_state is None:
        raise ConfigError("compare needs 'game' and 'initial_state'")
    if cfg.game_b is not None:
        raise ConfigError("compare does not support asymmetric games")
    cmd_simulate(cfg, out, summary, mode="compare")


def cmd_equilibria(cfg, out, summary):
    a, _ = resolve(cfg)
    if a is None:
        raise ConfigError("equilibria needs 'game'")
    reports = game_core.find_equilibria(a, cfg.tol)
    n = a.shape[0]
    rows, records = [], []
    for r in reports:
        try:
            fp = replicator_ode.find_fixed_point(a, r.state, tol=cfg.tol)
            stability = fp.stability
            eig = fp.jacobian_eigenvalues
        except NumericalError:
            stability, eig = "unknown", []
        records.append(
            {
                "state": r.state,
                "is_nash": r.is_nash,
                "is_strict": r.is_strict,
                "is_ess": r.is_ess,
                "support": r.support,
                "stability": stability,
                "jacobian_eigenvalues": eig,
            }
        )
        code = {"stable": -1, "marginal": 0, "unstable": 1}.get(stability, 2)
        rows.append(list(r.state) + [int(r.is_nash), int(r.is_strict), int(r.is_ess), code])
    path = out / "equilibria.csv"
    header = [f"x_{i + 1}" for i in range(n)] + ["is_nash", "is_strict", "is_ess", "stability"]
    write_csv(path, header, rows)
    summary.files.append(path.name)
    summary.results["equilibria"] = records


def cmd_entropy(cfg, out, summary):
    a, x0 = resolve(cfg)
    res = {}
    if x0 is not None:
        X = matrix_form.build_X(x0)
        res["state"] = x0
        res["diagonal_entropy"] = quantum_bridge.diagonal_entropy(x0)
        res["frequency_matrix_entropy"] = quantum_bridge.entropy(X)
    q = cfg.quantum
    if q.initial_density is not None:
        rho = quantum_bridge.check_density(_complex(q.initial_density, q.initial_density_imag))
        res["density_entropy"] = quantum_bridge.entropy(rho)
        res["density_purity"] = quantum_bridge.purity(rho)
        res["density_diagonal_entropy"] = quantum_bridge.diagonal_entropy(np.real(np.diag(rho)))
    if not res:
        raise ConfigError("entropy needs 'initial_state' or 'quantum.initial_density'")
    summary.results.update(res)


def cmd_gibbs(cfg, out, summary):
    q = cfg.quantum
    if q.hamiltonian is None:
        raise ConfigError("gibbs needs 'quantum.hamiltonian'")
    h = _complex(q.hamiltonian, q.hamiltonian_imag)
    n = h.shape[0]
    rows, records = [], []
    for beta in q.beta:
        rho = quantum_bridge.gibbs_state(h, beta)
        pops = np.real(np.diag(rho))
        log_z = quantum_bridge.log_partition_function(h, beta)
        s = quantum_bridge.entropy(rho)
        rows.append([beta, log_z, s] + list(pops))
        records.append({"beta": beta, "log_partition_function": log_z, "entropy": s, "state": rho})
    path = out / "gibbs.csv"
    write_csv(path, ["beta", "log_z", "entropy"] + [f"rho_{i + 1}{i + 1}" for i in range(n)], rows)
    summary.files.append(path.name)
    summary.results["gibbs"] = records


def _sweep_one(args):
    seed_seq, n, tol = args
    a = random_game(np.random.default_rng(seed_seq), n)
    reports = game_core.find_equilibria(a, tol)
    nash = [r for r in reports if r.is_nash]
    return {
        "n_candidates": len(reports),
        "n_nash": len(nash),
        "n_strict": sum(r.is_strict for r in reports),
        "n_ess": sum(r.is_ess for r in reports),
        "interior_nash": int(any(len(r.support) == n for r in nash)),
    }


def cmd_sweep(cfg, out, summary):
    sw = cfg.sweep
    children = np.random.SeedSequence(cfg.seed).spawn(sw.count)
    jobs = [(c, sw.size, cfg.tol) for c in children]
    if sw.workers > 1:
        with ProcessPoolExecutor(max_workers=sw.workers) as pool:
            stats = list(pool.map(_sweep_one, jobs))
    else:
        stats = [_sweep_one(j) for j in jobs]
    keys = ["n_candidates", "n_nash", "n_strict", "n_ess", "interior_nash"]
    path = out / "sweep.csv"
    write_csv(path, ["game"] + keys, ([k] + [s[key] for key in keys] for k, s in enumerate(stats)))
    summary.files.append(path.name)
    nash_counts = [s["n_nash"] for s in stats]
    summary.results.update(
        games=sw.count,
        size=sw.size,
        mean_nash=float(np.mean(nash_counts)),
        nash_count_histogram={str(k): nash_counts.count(k) for k in sorted(set(nash_counts))},
        games_with_ess=sum(s["n_ess"] > 0 for s in stats),
        games_with_interior_nash=sum(s["interior_nash"] for s in stats),
        total_ess=sum(s["n_ess"] for s in stats),
        total_strict=sum(s["n_strict"] for s in stats),
    )


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "entropy": cmd_entropy,
    "gibbs": cmd_gibbs,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def run_scenario(cfg: ScenarioConfig, command: str = "simulate", out=".") -> RunSummary:
    """Run ``command`` for ``cfg``, writing CSV files and the JSON summary into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    summary = RunSummary(command=command, config=cfg.to_dict())
    start = time.perf_counter()
    COMMANDS[command](cfg, out, summary)
    summary.duration_s = time.perf_counter() - start
    spath = out / cfg.outputs.summary
    spath.write_text(summary.to_json(), encoding="utf-8")
    return summary


# -- entry point ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrepl", description="Replicator dynamics and its density-matrix form.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="scenario file (TOML, or JSON by suffix)")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--quiet", action="store_true", help="do not print the summary")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg = parse_config_dict({**cfg.to_dict(), "seed": args.seed})
        summary = run_scenario(cfg, args.subcommand, args.out)
    except (NumericalError, OverflowError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"qrepl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError, OSError) as exc:
        print(f"qrepl: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        sys.stdout.write(summary.to_json())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
