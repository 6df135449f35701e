"""Acceptance criteria for the package, one check per criterion.

Each check returns ``(passed, detail)``. Under pytest a PASS/FAIL line per
criterion is printed in the terminal summary; ``python -m tests.test_acceptance``
prints the same lines directly.
"""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from quantum_replicator.cli import main
from quantum_replicator.game_core import CANONICAL_GAMES, find_equilibria
from quantum_replicator.matrix_form import build_X, integrate_matrix, verify_decomposition
from quantum_replicator import BoundarySingularityError
from quantum_replicator.quantum_bridge import (
    entropy,
    expectation,
    fixed_hamiltonian,
    gibbs_state,
    hamiltonian_from_state,
    integrate_von_neumann,
)
from quantum_replicator.replicator_ode import find_fixed_point, integrate
from quantum_replicator.stepping import IntegratorConfig

from .conftest import ACCEPTANCE_LINES, HAWK_DOVE, PRISONERS, RPS

SEED = 20240611


def cross_oracle():
    rng = np.random.default_rng(SEED)
    cfg = IntegratorConfig(dt=0.01, t_max=20)
    worst = 0.0
    for k in range(20):
        n = (2, 3, 4)[k % 3]
        a = rng.uniform(-1, 1, (n, n))
        x0 = rng.dirichlet(np.ones(n))
        vec = integrate(a, x0, cfg)
        mat = integrate_matrix(a, build_X(x0), cfg, "diagonal-rebuild")
        worst = max(worst, float(np.max(np.abs(mat.diagonals() - vec.states))))
    return worst <= 1e-6, f"max |X_ii - x_i| = {worst:.2e} over 20 games"


def decomposition_chain():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(100):
        n = 2 + k % 4
        check = verify_decomposition(rng.uniform(-1, 1, (n, n)), rng.dirichlet(np.ones(n)))
        worst = max(worst, check.max_residual)
    rejected = 0
    for x in ((1.0, 0.0), (0.5, 0.5, 0.0)):
        try:
            verify_decomposition(np.ones((len(x), len(x))), x)
        except BoundarySingularityError:
            rejected += 1
    return worst < 1e-10 and rejected == 2, f"max residual {worst:.2e}, boundary rejections {rejected}/2"


def frequency_matrix_properties():
    rng = np.random.default_rng(SEED)
    construct = 0.0
    for _ in range(50):
        x = rng.dirichlet(np.ones(rng.integers(2, 6)))
        X = build_X(x)
        if not np.array_equal(X, X.T):
            return False, "build_X not exactly symmetric"
        construct = max(construct, abs(np.trace(X) - 1), np.max(np.abs(X @ X - X)))
    cfg = IntegratorConfig(dt=0.01, t_max=20)
    x0 = np.array([0.2, 0.3, 0.5])
    projected = integrate_matrix(RPS, build_X(x0), cfg, "diagonal-rebuild")
    free = integrate_matrix(RPS, build_X(x0), cfg, "none")
    ok = construct < 1e-12 and projected.trace_drift.max() <= 1e-9 and free.trace_drift.max() <= 1e-9
    detail = (
        f"construction {construct:.1e}, trace drift {projected.trace_drift.max():.1e} (projected) "
        f"{free.trace_drift.max():.1e} (none), idempotency drift (none) {free.idempotency_drift.max():.1e}"
    )
    return ok, detail


def _verdict(a, point):
    reports = find_equilibria(a)
    match = [r for r in reports if np.max(np.abs(r.state - point)) < 1e-9]
    if not match:
        return None
    fp = find_fixed_point(a, point)
    return match[0], fp.stability, reports


def equilibrium_classification():
    hd, hd_stab, _ = _verdict(HAWK_DOVE, np.array([0.5, 0.5]))
    pd, pd_stab, pd_all = _verdict(PRISONERS, np.array([0.0, 1.0]))
    rps, rps_stab, _ = _verdict(RPS, np.full(3, 1 / 3))
    checks = [
        hd.is_nash and hd.is_ess and hd_stab == "stable",
        pd.is_nash and pd.is_strict and pd.is_ess and pd_stab == "stable",
        sum(r.is_nash for r in pd_all) == 1,
        rps.is_nash and not rps.is_ess and rps_stab == "marginal",
    ]
    return all(checks), f"HD {hd_stab}, PD {pd_stab}, RPS {rps_stab}; verdicts {checks}"


def convergence():
    hd = integrate(HAWK_DOVE, (0.1, 0.9), IntegratorConfig(dt=0.01, t_max=100)).final
    pd = integrate(PRISONERS, (0.9, 0.1), IntegratorConfig(dt=0.01, t_max=200)).final
    e_hd = float(np.max(np.abs(hd - 0.5)))
    e_pd = float(np.max(np.abs(pd - (0.0, 1.0))))
    return e_hd < 1e-6 and e_pd < 1e-6, f"HD error {e_hd:.1e}, PD error {e_pd:.1e}"


def rps_conservation():
    traj = integrate(RPS, (0.2, 0.3, 0.5), IntegratorConfig(dt=0.01, t_max=50))
    prod = traj.states.prod(axis=1)
    drift = float(np.max(np.abs(prod - prod[0])))
    return drift <= 1e-5, f"max |x1x2x3 - c| = {drift:.1e}"


def entropy_anchors():
    rng = np.random.default_rng(SEED)
    mixed = max(abs(entropy(np.eye(n) / n) - np.log(n)) for n in range(2, 9))
    pure = 0.0
    for n in range(2, 6):
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi /= np.linalg.norm(psi)
        pure = max(pure, abs(entropy(np.outer(psi, psi.conj()))))
    freq = max(entropy(build_X(rng.dirichlet(np.ones(rng.integers(2, 7))))) for _ in range(50))
    ok = mixed <= 1e-12 and pure <= 1e-12 and freq <= 1e-10
    return ok, f"maximally mixed {mixed:.1e}, pure {pure:.1e}, frequency matrices {freq:.1e}"


def max_entropy_at_energy(energies, target, iters=5000):
    """Maximize -sum p ln p on {sum p = 1, sum p E = target, p >= 0} by projected gradient.

    Written for three levels, where the feasible set is a segment.
    """
    c = np.vstack([np.ones_like(energies), energies])
    b = np.array([1.0, target])
    pinv = np.linalg.pinv(c)
    null = np.eye(len(energies)) - pinv @ c
    p = np.full(len(energies), 1 / len(energies))
    p = p - pinv @ (c @ p - b)
    # slide along the feasible line to the middle of its positive segment
    direction = np.linalg.svd(c)[2][-1]
    assert np.allclose(c @ direction, 0)
    bounds = -p / direction
    lo = bounds[direction > 0].max()
    hi = bounds[direction < 0].min()
    p = p + 0.5 * (lo + hi) * direction
    def objective(q):
        return -np.sum(q * np.log(q))

    for _ in range(iters):
        step = null @ -(np.log(p) + 1.0)
        slope = step @ step
        if slope < 1e-20:
            break
        eta = 1.0
        while np.any(p + eta * step <= 0) or objective(p + eta * step) < objective(p) + 1e-4 * eta * slope:
            eta /= 2
            if eta < 1e-16:
                return p
        p = p + eta * step
        if eta * np.sqrt(slope) < 1e-13:
            break
    return p


def gibbs_anchors():
    two = np.real(np.diag(gibbs_state(np.diag([0.0, 1.0]), 1.0)))
    e_two = float(np.max(np.abs(two - (0.731059, 0.268941))))
    h3 = np.diag([0.0, 1.0, 2.0])
    infinite_t = np.array_equal(gibbs_state(h3, 0.0), np.eye(3) / 3)
    ground = float(np.max(np.abs(gibbs_state(h3, 50.0) - np.diag([1.0, 0.0, 0.0]))))
    betas = np.linspace(0.0, 10.0, 20)
    s = np.array([entropy(gibbs_state(h3, b)) for b in betas])
    monotone = bool(np.all(np.diff(s) <= 1e-12))
    maxent = 0.0
    for beta in (0.3, 1.0, 2.5):
        rho = np.real(np.diag(gibbs_state(h3, beta)))
        p = max_entropy_at_energy(np.diag(h3), float(rho @ np.diag(h3)))
        maxent = max(maxent, float(np.max(np.abs(p - rho))))
    ok = e_two <= 1e-6 and infinite_t and ground <= 1e-12 and monotone and maxent <= 1e-4
    return ok, (
        f"two-level {e_two:.1e}, beta=0 exact {infinite_t}, ground {ground:.1e}, "
        f"monotone {monotone}, max-entropy match {maxent:.1e}"
    )


def energy_anchor():
    rng = np.random.default_rng(SEED)
    worst, count = 0.0, 0
    for n in range(1, 5):
        for _ in range(5):
            a = np.diag(rng.uniform(-3, 3, n))
            for j in range(n):
                rho = np.diag(np.eye(n)[j])
                res = hamiltonian_from_state(a, rho)
                worst = max(worst, abs(expectation(rho, res.h)), abs(res.energy))
                count += 1
    counter = hamiltonian_from_state(np.diag([2.0, 3.0]), np.diag([0.5, 0.5]))
    ok = worst <= 1e-12 and counter.energy_flagged and not counter.idempotent
    return ok, f"{count} vertex cases, max |<H>| {worst:.1e}; diag(0.5,0.5) flagged {counter.energy_flagged}"


def von_neumann_integrity():
    rng = np.random.default_rng(SEED)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = 0.5 * (m + m.conj().T)
    w = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho0 = w @ w.conj().T
    rho0 /= np.trace(rho0).real
    traj = integrate_von_neumann(fixed_hamiltonian(h), rho0, IntegratorConfig(dt=0.01, t_max=10))
    trace = float(np.max(np.abs(np.trace(traj.states, axis1=1, axis2=2) - 1)))
    herm = float(np.max(np.abs(traj.states - np.conj(np.swapaxes(traj.states, 1, 2)))))
    spec0 = np.linalg.eigvalsh(rho0)
    spec = float(max(np.max(np.abs(np.linalg.eigvalsh(r) - spec0)) for r in traj.states))
    rabi = integrate_von_neumann(
        fixed_hamiltonian([[0, 1], [1, 0]]), np.diag([1.0, 0.0]), IntegratorConfig(dt=np.pi / 400, t_max=np.pi / 4)
    )
    e_rabi = abs(rabi.states[-1, 0, 0].real - 0.5)
    ok = trace <= 1e-9 and herm <= 1e-12 and spec <= 1e-6 and e_rabi <= 1e-6
    return ok, f"trace {trace:.1e}, hermiticity {herm:.1e}, spectrum {spec:.1e}, rabi {e_rabi:.1e}"


def cli_determinism():
    golden = Path(__file__).parent / "golden"
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cfg = tmp / "random.toml"
        cfg.write_text('game = "random"\nsize = 3\ninitial_state = "random"\nseed = 42\n[integrator]\nt_max = 5\n')
        identical = True
        for command in ("simulate", "compare"):
            runs = [tmp / f"{command}-{k}" for k in range(2)]
            for out in runs:
                if main([command, "--config", str(cfg), "--out", str(out), "--quiet"]) != 0:
                    return False, f"{command} failed"
            for path in runs[0].glob("*.csv"):
                identical &= path.read_bytes() == (runs[1] / path.name).read_bytes()
        matched = 0
        states = {"hawk-dove": "0.1, 0.9", "prisoners-dilemma": "0.9, 0.1", "rock-paper-scissors": "0.2, 0.3, 0.5"}
        for game in sorted(CANONICAL_GAMES):
            if game not in states:
                continue
            g = tmp / f"{game}.toml"
            g.write_text(f'game = "{game}"\ninitial_state = [{states[game]}]\n[integrator]\ndt = 0.05\nt_max = 2.0\n')
            out = tmp / game
            main(["simulate", "--config", str(g), "--out", str(out), "--quiet"])
            matched += (out / "trajectory.csv").read_bytes() == (golden / f"{game}.csv").read_bytes()
    return identical and matched == 3, f"repeat runs identical {identical}, golden matches {matched}/3"


CRITERIA = [
    (1, "cross-oracle equivalence", cross_oracle),
    (2, "decomposition identity chain", decomposition_chain),
    (3, "frequency matrix properties", frequency_matrix_properties),
    (4, "equilibrium classification", equilibrium_classification),
    (5, "convergence", convergence),
    (6, "RPS conservation", rps_conservation),
    (7, "entropy anchors", entropy_anchors),
    (8, "Gibbs anchors", gibbs_anchors),
    (9, "quantum energy anchor", energy_anchor),
    (10, "von Neumann integrity", von_neumann_integrity),
    (11, "CLI determinism", cli_determinism),
]


def run_criterion(number, name, check):
    ok, detail = check()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail}"
    print(line)
    return ok, line


@pytest.mark.parametrize("number, name, check", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, name, check):
    ok, line = run_criterion(number, name, check)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    raise SystemExit(0 if all(results) else 1)
