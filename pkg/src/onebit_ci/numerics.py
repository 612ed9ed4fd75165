"""Numerical kernels shared by the solvers and the simulation harness."""

from __future__ import annotations

import numpy as np

__all__ = [
    "RngStream",
    "mean_abs",
    "project_simplex",
    "spectral_norm",
    "standard_normal",
]


def project_simplex(v):
    """Euclidean projection onto the probability simplex.

    Sort-and-threshold method, O(m log m). Finds the largest ``r`` such that
    ``u_r - (sum(u_1..u_r) - 1) / r > 0`` on the descending sort ``u`` and
    shifts every coordinate by that threshold before clipping at zero.

    Parameters
    ----------
    v : array_like, shape (m,)

    Returns
    -------
    y : ndarray, shape (m,)
        Nonnegative, sums to one.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("project_simplex expects a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("project_simplex got non-finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    # ">=" keeps tied coordinates in the support; the projection is unaffected
    cond = u * ind >= css
    r = ind[cond][-1]
    theta = css[r - 1] / r
    y = np.maximum(v - theta, 0.0)
    # absorb round-off so the sum is one to machine precision
    s = y.sum()
    if s != 1.0:
        support = y > 0
        y[support] += (1.0 - s) / np.count_nonzero(support)
        np.maximum(y, 0.0, out=y)
    return y


def spectral_norm(A, max_iter=200, tol=1e-8):
    """Largest singular value of ``A`` by power iteration on ``A.T @ A``.

    The start vector is the normalized all-ones vector. If that start is
    annihilated by ``A`` (for instance ``[[1, -1]]``) a fixed pseudo-random
    start is used instead, so the result is deterministic either way.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("spectral_norm expects a 2-D array")
    if A.size == 0 or not np.any(A):
        return 0.0
    n = A.shape[1]
    v = np.ones(n) / np.sqrt(n)
    if np.linalg.norm(A @ v) <= 1e-12 * np.linalg.norm(A):
        v = np.random.Generator(np.random.Philox(0)).standard_normal(n)
        v /= np.linalg.norm(v)

    sigma = np.linalg.norm(A @ v)
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        v = w / nw
        new_sigma = np.linalg.norm(A @ v)
        if abs(new_sigma - sigma) <= tol * new_sigma:
            sigma = new_sigma
            break
        sigma = new_sigma
    return float(sigma)


def mean_abs(A):
    """Arithmetic mean of ``|A_ij|``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        raise ValueError("mean_abs of an empty array")
    return float(np.mean(np.abs(A)))


class RngStream:
    """Seeded, splittable random stream.

    Backed by numpy's counter-based Philox bit generator. ``spawn`` derives
    child streams from the seed sequence, so a child keyed by trial index is
    the same no matter which worker draws from it or in what order.
    Normal deviates come from numpy's ziggurat transform of the uniform
    stream, which is fixed for a given numpy release.
    """

    def __init__(self, seed=0, *, _seq=None):
        if _seq is None:
            seed = int(seed)
            if seed < 0 or seed >= 2**64:
                raise ValueError("seed must fit in an unsigned 64-bit integer")
            _seq = np.random.SeedSequence(seed)
        self._seq = _seq
        self.generator = np.random.Generator(np.random.Philox(_seq))

    @property
    def seed(self):
        return self._seq.entropy

    def child(self, *key):
        """Stream keyed by ``key`` (a tuple of non-negative ints).

        Unlike ``spawn`` this does not depend on how many children were
        requested before.
        """
        seq = np.random.SeedSequence(
            self._seq.entropy, spawn_key=tuple(self._seq.spawn_key) + tuple(int(k) for k in key)
        )
        return RngStream(_seq=seq)

    def spawn(self, n):
        return [RngStream(_seq=s) for s in self._seq.spawn(n)]

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)


def standard_normal(rng):
    """One N(0, 1) draw from ``rng``."""
    return float(rng.standard_normal())
