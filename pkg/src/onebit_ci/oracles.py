"""Slow, independent reference computations used to check the fast paths."""

from __future__ import annotations

import itertools

import numpy as np

__all__ = ["simplex_projection_kkt", "x_update_grid", "stationarity_residual"]


def simplex_projection_kkt(v):
    """Projection onto the simplex by enumerating candidate supports.

    For a support ``S`` the KKT system gives ``y_S = v_S - theta`` with
    ``theta = (sum v_S - 1)/|S|``; the support is valid when ``y_S >= 0``
    and ``v_i <= theta`` off the support. Exponential in ``len(v)``.
    """
    v = np.asarray(v, dtype=float)
    m = v.size
    best, best_d = None, np.inf
    for r in range(1, m + 1):
        for S in itertools.combinations(range(m), r):
            S = list(S)
            theta = (v[S].sum() - 1.0) / r
            y = np.zeros(m)
            y[S] = v[S] - theta
            if np.any(y[S] < -1e-12):
                continue
            off = np.setdiff1d(np.arange(m), S)
            if np.any(v[off] - theta > 1e-12):
                continue
            d = np.linalg.norm(y - v)
            if d < best_d:
                best, best_d = np.maximum(y, 0.0), d
    return best


def x_update_grid(a, lam, tau, step=1e-4):
    """Grid minimizer of ``(x - a)^2 - (2 lam/tau)|x|`` over ``[-1, 1]``."""
    grid = np.linspace(-1.0, 1.0, int(round(2.0 / step)) + 1)
    b = -2.0 * lam / tau
    return grid[np.argmin((grid - a) ** 2 + b * np.abs(grid))]


def stationarity_residual(A, x, y, lo=-1.0, hi=1.0, g_subgrad=None):
    """Projected-gradient residual of ``min_x max_{y in simplex} y^T A x`` on a box."""
    from .numerics import project_simplex

    gx = A.T @ y
    if g_subgrad is not None:
        gx = gx - g_subgrad(x)
    rx = x - np.clip(x - gx, lo, hi)
    ry = y - project_simplex(y + A @ x)
    return float(np.sqrt(rx @ rx + ry @ ry))
