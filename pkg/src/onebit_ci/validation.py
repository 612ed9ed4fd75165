"""Property suites behind ``onebit-ci validate``.

Each suite draws its cases from ``numpy.random.default_rng((seed, case))``
so a failing case can be replayed from the printed seed pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import solvers
from .baselines import brute_force, has_perfect_partition, partition_instance
from .model import build_model, ci_objective
from .numerics import project_simplex
from .oracles import simplex_projection_kkt, x_update_grid

__all__ = ["SuiteResult", "run_all", "SUITES"]


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def fail(self, key, msg):
        self.failures.append((key, msg))


def _random_model(rng, K, Nt, M=8):
    H = (rng.standard_normal((K, Nt)) + 1j * rng.standard_normal((K, Nt))) / np.sqrt(2)
    return build_model(H, rng.integers(0, M, K), M)


def suite_simplex(seed, cases):
    res = SuiteResult("simplex-projection-vs-kkt")
    for c in range(cases):
        rng = np.random.default_rng((seed, c))
        v = rng.normal(scale=rng.choice([0.1, 1.0, 5.0]), size=rng.integers(1, 7))
        got, want = project_simplex(v), simplex_projection_kkt(v)
        res.cases += 1
        err = np.max(np.abs(got - want))
        if err > 1e-9:
            res.fail((seed, c), f"max deviation {err:.3e}")
    return res


def suite_x_update(seed, cases):
    res = SuiteResult("x-update-vs-grid")
    for c in range(cases):
        rng = np.random.default_rng((seed, c))
        a = rng.uniform(-2, 2)
        lam = rng.uniform(0, 1)
        tau = rng.uniform(0.1, 10)
        # one coordinate, y = [1], column chosen so that x_k - A^T y / tau = a
        x_k = rng.uniform(-1, 1)
        col = np.array([[(x_k - a) * tau]])
        got = solvers.x_update(np.array([x_k]), np.array([1.0]), col, lam, tau)[0]
        want = x_update_grid(a, lam, tau)
        res.cases += 1
        if abs(got - want) > 2e-4:
            res.fail((seed, c), f"a={a:.6g} lam={lam:.6g} tau={tau:.6g}: {got} vs {want}")
    return res


def suite_penalty_equivalence(seed, cases):
    """Vertex optima of the penalty problem match the binary problem, and no
    point on a random 2-D face of the box beats the best vertex."""
    res = SuiteResult("penalty-equivalence")
    grid = np.linspace(-1, 1, 41)
    g1, g2 = np.meshgrid(grid, grid)
    for c in range(cases):
        rng = np.random.default_rng((seed, c))
        model = _random_model(rng, int(rng.integers(1, 4)), int(rng.integers(2, 9)))
        A, n = model.A, model.n
        lam = 1.01 * model.row_inf_norm
        x_star, v_star = brute_force(model)
        res.cases += 1
        pen_vertex = v_star - lam * n
        if abs(ci_objective(model, x_star) - lam * n - pen_vertex) > 1e-12:
            res.fail((seed, c), "vertex value shift mismatch")
        i, j = rng.choice(n, size=2, replace=False)
        base = rng.choice([-1.0, 1.0], size=n)
        pts = np.repeat(base[None], g1.size, axis=0)
        pts[:, i] = g1.ravel()
        pts[:, j] = g2.ravel()
        vals = np.max(pts @ A.T, axis=1) - lam * np.abs(pts).sum(axis=1)
        if vals.min() < pen_vertex - 1e-10:
            res.fail((seed, c), f"interior point beats best vertex by {pen_vertex - vals.min():.3e}")
    return res


def suite_stationary(seed, cases):
    """Limit points with a large penalty are one-bit, and ``|x_i|`` never
    shrinks below ``min(|x_i|, 1)`` along the way."""
    res = SuiteResult("stationary-structure")
    for c in range(cases):
        rng = np.random.default_rng((seed, c))
        model = _random_model(rng, int(rng.integers(1, 5)), int(rng.integers(4, 17)))
        lam = 1.5 * model.row_inf_norm
        ap = solvers.default_ao_params(model, max_iter=20000, tol=1e-8)
        bad = []

        def check(k, x_prev, x, y):
            drop = np.min(np.abs(x) - np.minimum(np.abs(x_prev), 1.0))
            if drop < -1e-12:
                bad.append((k, drop))

        x, y, _ = solvers.ao_solve(model, lam, np.zeros(model.n), np.full(model.m, 1 / model.m), ap, callback=check)
        res.cases += 1
        if bad:
            res.fail((seed, c), f"magnitude dropped at iteration {bad[0][0]} by {bad[0][1]:.3e}")
        dist = np.max(np.abs(np.abs(x) - 1.0))
        if dist > 1e-6:
            res.fail((seed, c), f"limit not one-bit: max | |x|-1 | = {dist:.3e}")
    return res


def suite_partition(seed, cases):
    res = SuiteResult("partition-instances")
    made = 0
    c = 0
    while made < cases:
        rng = np.random.default_rng((seed, c))
        c += 1
        a = rng.integers(1, 20, size=int(rng.integers(2, 9)))
        if not has_perfect_partition(a):
            continue
        made += 1
        inst = partition_instance(a)
        x, v = brute_force(inst.model)
        report = solvers.nl1p(inst.model)
        res.cases += 1
        if abs(v - inst.target) > 1e-9:
            res.fail((seed, c - 1), f"oracle value {v} != {inst.target}")
        if not np.all(x[: a.size] == 1):
            res.fail((seed, c - 1), "optimal real part is not all ones")
        if not np.all(np.abs(report.x) == 1) or report.objective < v - 1e-9:
            res.fail((seed, c - 1), "solver output infeasible or below the oracle")
    return res


SUITES = {
    "simplex": suite_simplex,
    "x-update": suite_x_update,
    "penalty": suite_penalty_equivalence,
    "stationary": suite_stationary,
    "partition": suite_partition,
}

DEFAULT_CASES = {"simplex": 2000, "x-update": 2000, "penalty": 50, "stationary": 30, "partition": 30}


def run_all(seed=0, scale=1.0):
    out = []
    for key, fn in SUITES.items():
        out.append(fn(seed, max(1, int(DEFAULT_CASES[key] * scale))))
    return out
