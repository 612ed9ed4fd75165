"""Negative l1 penalty homotopy with alternating-optimization inner solvers.

The penalty problem at a fixed ``lam`` is

    min_{x in [-1,1]^n} max_{y in simplex} y^T A x - lam ||x||_1

and is attacked by alternating a closed-form proximal step in ``x`` with a
projected ascent step in ``y`` on the perturbed objective
``y^T A x - (c_k/2) ||y||^2``. The outer loop grows ``lam`` geometrically,
warm-starting each solve, until the inner solution is one-bit feasible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Literal

import numpy as np

from .model import CiModel, ci_objective, quantize_onebit
from .numerics import mean_abs, project_simplex, spectral_norm

__all__ = [
    "AoParams",
    "HomotopyParams",
    "OuterRecord",
    "PracticalTau",
    "SolveReport",
    "TheoreticalTau",
    "ao_solve",
    "ao_solve_fixed",
    "default_ao_params",
    "default_homotopy_params",
    "generic_ao",
    "nl1p",
    "theoretical_schedule",
    "x_update",
    "y_update",
]

RHO_FLOOR = 1e-8


@dataclass(frozen=True)
class PracticalTau:
    """``tau_k = scale * k**exponent``."""

    scale: float
    exponent: float = 0.1

    def __call__(self, k, c_k=None, rho=None):
        return self.scale * k**self.exponent


@dataclass(frozen=True)
class TheoreticalTau:
    """``tau_k = 16 beta2 L12^2 / (rho c_k^2) + beta3`` with ``L12 = ||A||_2``."""

    beta2: float
    beta3: float
    L12: float

    def __call__(self, k, c_k=None, rho=None):
        return 16.0 * self.beta2 * self.L12**2 / (rho * c_k**2) + self.beta3


@dataclass(frozen=True)
class AoParams:
    """Step sizes and stopping rule of the inner alternating solver.

    ``c_k = beta1 / k**gamma``; ``tau_k`` comes from ``tau_schedule``.
    The solver stops after ``max_iter`` iterations or once the successive
    iterates of ``x`` are closer than ``tol`` in the ``stop_norm`` norm.
    """

    rho: float
    beta1: float
    gamma: float
    tau_schedule: PracticalTau | TheoreticalTau
    max_iter: int = 500
    tol: float = 1e-3
    stop_norm: Literal["l2", "inf"] = "l2"

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.beta1 > 0:
            raise ValueError("beta1 must be positive")
        if isinstance(self.tau_schedule, TheoreticalTau) and not 0 < self.gamma <= 0.5:
            raise ValueError("gamma must lie in (0, 0.5] for the theoretical schedule")
        if isinstance(self.tau_schedule, PracticalTau) and not self.tau_schedule.scale > 0:
            raise ValueError("tau scale must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.stop_norm not in ("l2", "inf"):
            raise ValueError("stop_norm must be 'l2' or 'inf'")

    def c(self, k):
        return self.beta1 / k**self.gamma

    def tau(self, k):
        return self.tau_schedule(k, self.c(k), self.rho)

    def step_distance(self, d):
        if self.stop_norm == "inf":
            return float(np.max(np.abs(d))) if d.size else 0.0
        return float(np.sqrt(d @ d))


@dataclass(frozen=True)
class HomotopyParams:
    lambda0: float
    delta: float = 5.0
    max_outer: int = 20
    feas_tol: float = 1e-6

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be positive")
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")


@dataclass(frozen=True)
class OuterRecord:
    lam: float
    inner_iterations: int
    objective: float


@dataclass
class SolveReport:
    x: np.ndarray
    objective: float
    outer_trace: list[OuterRecord] = field(default_factory=list)
    elapsed: float = 0.0
    feasible_at_exit: bool = False
    hit_max_outer: bool = False

    @property
    def inner_iterations(self):
        return sum(r.inner_iterations for r in self.outer_trace)


def default_homotopy_params(M, **overrides):
    return HomotopyParams(lambda0=0.001 * M / 8, **overrides)


def default_ao_params(model, **overrides):
    """Practical parameters used in the reported experiments.

    ``rho = 0.2/||A||_2``, ``c_k = 0.01/(rho k^0.05)`` and
    ``tau_k = (2 log2 Nt + 1)/10 * mean|A| * k^0.1``.
    """
    norm = spectral_norm(model.A)
    rho = 0.2 / norm if norm > 0 else 0.2 / RHO_FLOOR
    tau_scale = (2 * math.log2(model.Nt) + 1) / 10 * mean_abs(model.A)
    if tau_scale <= 0:
        tau_scale = 1.0
    params = dict(
        rho=rho,
        beta1=0.01 / rho,
        gamma=0.05,
        tau_schedule=PracticalTau(tau_scale, 0.1),
    )
    params.update(overrides)
    return AoParams(**params)


def theoretical_schedule(model, beta1, beta2, beta3, gamma, rho=None, **kwargs):
    """Parameters satisfying the convergence conditions for the bilinear case.

    Requires ``0 < rho <= 1/beta1``, ``0 < gamma <= 0.5``, ``beta1 > 0``,
    ``beta2 > 1`` and ``beta3 >= rho ||A||_2^2``. ``rho`` defaults to
    ``1/beta1``.
    """
    if not beta1 > 0:
        raise ValueError("beta1 > 0 violated")
    if rho is None:
        rho = 1.0 / beta1
    L12 = spectral_norm(model.A)
    violated = []
    if not 0 < rho <= 1.0 / beta1 * (1 + 1e-12):
        violated.append(f"0 < rho <= 1/beta1 (rho={rho}, 1/beta1={1.0 / beta1})")
    if not 0 < gamma <= 0.5:
        violated.append(f"0 < gamma <= 0.5 (gamma={gamma})")
    if not beta2 > 1:
        violated.append(f"beta2 > 1 (beta2={beta2})")
    if not beta3 >= rho * L12**2 * (1 - 1e-12):
        violated.append(f"beta3 >= rho*||A||_2^2 (beta3={beta3}, bound={rho * L12**2})")
    if violated:
        raise ValueError("theoretical schedule constraints violated: " + "; ".join(violated))
    return AoParams(
        rho=rho,
        beta1=beta1,
        gamma=gamma,
        tau_schedule=TheoreticalTau(beta2, beta3, L12),
        **kwargs,
    )


def x_update(x_k, y_k, model, lam, tau_k):
    """Closed-form minimizer of the linearized, proximal x-subproblem.

    Per coordinate, with ``a = x_k - (A^T y_k)/tau_k``,
    ``x = sgn(a) * min(|a| + lam/tau_k, 1)`` and ``sgn(0) = +1``.
    """
    if not tau_k > 0:
        raise ValueError("tau_k must be positive")
    A = model.A if isinstance(model, CiModel) else np.asarray(model)
    a = np.asarray(x_k, dtype=float) - (A.T @ y_k) / tau_k
    return _shrink_up(a, lam / tau_k)


def _shrink_up(a, step):
    mag = np.minimum(np.abs(a) + step, 1.0)
    return np.where(a >= 0, mag, -mag)


def y_update(y_k, x_next, model, rho, c_k):
    """Projected ascent step ``Proj(y + rho A x - rho c_k y)``."""
    A = model.A if isinstance(model, CiModel) else np.asarray(model)
    return project_simplex(y_k + rho * (A @ x_next) - rho * c_k * y_k)


def _check_start(model, x0, y0):
    x0 = np.array(x0, dtype=float)
    y0 = np.array(y0, dtype=float)
    if x0.shape != (model.n,):
        raise ValueError(f"x0 must have length {model.n}")
    if y0.shape != (model.m,):
        raise ValueError(f"y0 must have length {model.m}")
    if np.any(np.abs(x0) > 1):
        raise ValueError("x0 must lie in [-1, 1]^n")
    if np.any(y0 < 0) or abs(y0.sum() - 1) > 1e-9:
        raise ValueError("y0 must lie on the simplex")
    return x0, y0


def ao_solve(model, lam, x0, y0, params, callback=None):
    """Alternating x/y updates at a fixed penalty ``lam``.

    Returns ``(x, y, iterations)``. ``callback(k, x_prev, x, y)`` is called
    after every iteration when given.
    """
    x, y = _check_start(model, x0, y0)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    A = model.A
    AT = A.T
    rho = params.rho
    k = 0
    for k in range(1, params.max_iter + 1):
        tau = params.tau(k)
        x_new = _shrink_up(x - (AT @ y) / tau, lam / tau)
        y = project_simplex(y + rho * (A @ x_new) - rho * params.c(k) * y)
        step = params.step_distance(x_new - x)
        if callback is not None:
            callback(k, x, x_new, y)
        x = x_new
        if step < params.tol:
            break
    return x, y, k


def ao_solve_fixed(model, lam, x0, y0, params, callback=None):
    """Low-complexity variant: coordinates reaching ``|x_i| = 1`` are frozen.

    Only the active columns of ``A`` enter the matrix-vector products; the
    frozen part of ``A x`` is cached and updated when the active set shrinks.
    ``callback(k, x_prev, x, y, active)`` receives the indices updated in
    iteration ``k``.
    """
    x, y = _check_start(model, x0, y0)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    A = model.A
    rho = params.rho
    active = np.flatnonzero(np.abs(x) < 1)
    A_act = A[:, active]
    frozen_ax = A @ np.where(np.abs(x) < 1, 0.0, x)
    k = 0
    for k in range(1, params.max_iter + 1):
        tau = params.tau(k)
        x_act = x[active]
        new_act = _shrink_up(x_act - (A_act.T @ y) / tau, lam / tau)
        ax = frozen_ax + A_act @ new_act
        y = project_simplex(y + rho * ax - rho * params.c(k) * y)
        d = new_act - x_act
        step = params.step_distance(d)
        x_prev = x
        x = x.copy()
        x[active] = new_act
        if callback is not None:
            callback(k, x_prev, x, y, active)
        hit = np.abs(new_act) >= 1
        if np.any(hit):
            newly = active[hit]
            frozen_ax = frozen_ax + A[:, newly] @ x[newly]
            active = active[~hit]
            A_act = A[:, active]
        if step < params.tol:
            break
    return x, y, k


def nl1p(model, hp=None, ap=None, variant="standard", x0=None, y0=None):
    """Penalty homotopy: solve at growing ``lam`` until one-bit feasible.

    Every intermediate inner solution is quantized and the best quantized
    point (earliest on ties) is returned, so ``report.x`` is always in
    ``{-1, +1}^n``.

    Parameters
    ----------
    model : CiModel
    hp : HomotopyParams, optional
        Defaults to ``lambda0 = 0.001 M / 8``, ``delta = 5``.
    ap : AoParams, optional
        Defaults to :func:`default_ao_params`.
    variant : {"standard", "accelerated"}
    """
    if variant not in ("standard", "accelerated"):
        raise ValueError(f"unknown variant {variant!r}")
    start = time.perf_counter()
    if hp is None:
        hp = default_homotopy_params(model.M)
    if not np.any(model.A):
        x = np.ones(model.n)
        return SolveReport(
            x=x,
            objective=ci_objective(model, x),
            outer_trace=[OuterRecord(hp.lambda0, 0, 0.0)],
            elapsed=time.perf_counter() - start,
            feasible_at_exit=True,
        )
    if ap is None:
        ap = default_ao_params(model)
    inner = ao_solve if variant == "standard" else ao_solve_fixed

    x = np.zeros(model.n) if x0 is None else np.asarray(x0, dtype=float)
    y = np.full(model.m, 1.0 / model.m) if y0 is None else np.asarray(y0, dtype=float)
    lam = hp.lambda0
    trace = []
    best_x, best_obj = None, np.inf
    feasible = False
    for t in range(1, hp.max_outer + 1):
        x, y, iters = inner(model, lam, x, y, ap)
        xq = quantize_onebit(x)
        obj = ci_objective(model, xq)
        trace.append(OuterRecord(lam, iters, obj))
        if obj < best_obj:
            best_x, best_obj = xq, obj
        if np.min(np.abs(x)) >= 1 - hp.feas_tol:
            feasible = True
            break
        if t < hp.max_outer:
            lam = lam * hp.delta
    return SolveReport(
        x=best_x,
        objective=best_obj,
        outer_trace=trace,
        elapsed=time.perf_counter() - start,
        feasible_at_exit=feasible,
        hit_max_outer=not feasible,
    )


def generic_ao(
    grad_x: Callable,
    grad_y: Callable,
    solve_x: Callable,
    project_y: Callable,
    x0,
    y0,
    params: AoParams,
) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Generic perturbed alternating scheme for ``min_x max_y f(x,y) - g(x)``.

    Parameters
    ----------
    grad_x, grad_y : callable ``(x, y) -> ndarray``
        Partial gradients of the smooth coupling ``f``.
    solve_x : callable ``(x_k, grad, tau_k) -> ndarray``
        Exact minimizer over ``X`` of
        ``<grad, x - x_k> - g(x) + tau_k/2 ||x - x_k||^2``.
    project_y : callable
        Euclidean projection onto ``Y``.

    Yields ``(k, x_k, y_k)`` after each iteration; stops by the same rule as
    :func:`ao_solve`.
    """
    x = np.array(x0, dtype=float)
    y = np.array(y0, dtype=float)
    for k in range(1, params.max_iter + 1):
        x_new = solve_x(x, grad_x(x, y), params.tau(k))
        y = project_y(y + params.rho * grad_y(x_new, y) - params.rho * params.c(k) * y)
        step = params.step_distance(x_new - x)
        x = x_new
        yield k, x, y
        if step < params.tol:
            return


def ao_pieces(model, lam):
    """The callables that make :func:`generic_ao` reproduce :func:`ao_solve`."""
    A = model.A

    def solve_x(x_k, grad, tau_k):
        return _shrink_up(x_k - grad / tau_k, lam / tau_k)

    return dict(
        grad_x=lambda x, y: A.T @ y,
        grad_y=lambda x, y: A @ x,
        solve_x=solve_x,
        project_y=project_simplex,
    )
