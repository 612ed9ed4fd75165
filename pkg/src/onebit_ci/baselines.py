"""Exhaustive oracle, zero-forcing baselines and partition-reduction instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import CiModel, _vk_from_boundaries, quantize_onebit, psk_constellation, stack_complex

__all__ = [
    "MAX_BRUTE_FORCE_N",
    "PartitionInstance",
    "brute_force",
    "has_perfect_partition",
    "partition_instance",
    "zf_direction",
    "zf_quantized",
    "zf_unquantized",
]

MAX_BRUTE_FORCE_N = 26
_BLOCK_BITS = 12


def _sign_table(bits):
    """All sign vectors of length ``bits`` in lexicographic order (-1 < +1)."""
    idx = np.arange(2**bits)[:, None]
    shifts = np.arange(bits - 1, -1, -1)[None, :]
    return np.where((idx >> shifts) & 1, 1.0, -1.0)


def brute_force(model):
    """Global minimizer of ``max_l a_l^T x`` over ``{-1, 1}^n``.

    Enumerates in lexicographic order in blocks: the trailing (up to 12)
    coordinates are tabulated once and the leading coordinates are walked,
    so each block costs one broadcast add. Ties go to the lexicographically
    smallest ``x``.

    Returns
    -------
    x : ndarray of +-1
    value : float
    """
    A = model.A if isinstance(model, CiModel) else np.asarray(model, dtype=float)
    n = A.shape[1]
    if n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force refused: n={n} exceeds {MAX_BRUTE_FORCE_N}")
    lo = min(n, _BLOCK_BITS)
    hi = n - lo
    lo_signs = _sign_table(lo)
    lo_part = lo_signs @ A[:, hi:].T  # (2**lo, m)
    A_hi = A[:, :hi]
    best_val = np.inf
    best_x = None
    for head in itertools.product((-1.0, 1.0), repeat=hi):
        head = np.array(head)
        vals = np.max(lo_part + A_hi @ head, axis=1)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_x = np.concatenate([head, lo_signs[j]])
    return best_x, best_val


def has_perfect_partition(a):
    """Subset-sum check: can ``a`` be split into two equal-sum halves?"""
    a = [int(v) for v in a]
    total = sum(a)
    if total % 2:
        return False
    reachable = 1
    for v in a:
        reachable |= reachable << v
    return bool((reachable >> (total // 2)) & 1)


@dataclass(frozen=True)
class PartitionInstance:
    a: np.ndarray
    model: CiModel

    @property
    def target(self):
        """Optimal value when a perfect partition exists."""
        return -float(np.sum(self.a))


def partition_instance(a):
    """Single-user instance whose optimum encodes the partition problem on ``a``.

    The user sees ``h = a + j a`` and the boundary directions are ``1`` and
    ``j``, so ``A = -[[a, -a], [a, a]]`` with ``x = [Re x_T; Im x_T]`` and
    ``x_T`` in ``{+-1 +- j}``. The optimum equals ``-sum(a)`` exactly when
    ``a`` splits into two halves of equal sum.
    """
    a = np.asarray(a)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("a must be a non-empty 1-D integer vector")
    if not np.all(np.equal(np.mod(a, 1), 0)) or np.any(a < 1):
        raise ValueError("partition entries must be positive integers")
    if a.size > 13:
        raise ValueError("partition instances are limited to N <= 13")
    a = a.astype(np.int64)
    V = _vk_from_boundaries(a.astype(complex) * (1 + 1j), 1 + 0j, 1j)
    model = CiModel(A=-V, K=1, Nt=a.size, M=8, scale=1.0 / np.sqrt(2 * a.size))
    return PartitionInstance(a=a, model=model)


def zf_direction(H, s, M):
    """Unnormalized ZF signal ``H^H (H H^H)^{-1} s``."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    K, Nt = H.shape
    if K > Nt:
        raise ValueError("zero forcing needs K <= Nt")
    symbols = psk_constellation(M)[np.asarray(s)]
    gram = H @ H.conj().T
    if np.linalg.cond(gram) > 1e12:
        raise np.linalg.LinAlgError("H H^H is numerically singular; ZF undefined")
    return H.conj().T @ np.linalg.solve(gram, symbols)


def zf_unquantized(H, s, M):
    """Infinite-resolution ZF transmit signal with unit power."""
    x = zf_direction(H, s, M)
    return x / np.linalg.norm(x)


def zf_quantized(H, s, M):
    """One-bit ZF: stacked ZF signal quantized entrywise to +-1."""
    return quantize_onebit(stack_complex(zf_direction(H, s, M)))
