"""Input checks shared by the estimators and the harness."""

from __future__ import annotations

import numpy as np
from sklearn.exceptions import NotFittedError

__all__ = ["NotFittedError", "check_channel", "check_is_fitted", "check_order", "check_symbols"]


def check_order(M):
    M = int(M)
    if M < 4 or M & (M - 1):
        raise ValueError(f"PSK order must be a power of two >= 4, got {M}")
    return M


def check_channel(H, *, require_full_row_rank=False):
    """Return ``H`` as a finite complex ``(K, Nt)`` array."""
    H = np.asarray(H)
    if H.ndim == 1:
        H = H[None, :]
    if H.ndim != 2 or H.shape[0] < 1 or H.shape[1] < 1:
        raise ValueError(f"channel must be a (K, Nt) array, got shape {H.shape}")
    H = H.astype(complex, copy=False)
    if not np.all(np.isfinite(H)):
        raise ValueError("channel contains NaN or inf")
    if require_full_row_rank and H.shape[0] > H.shape[1]:
        raise ValueError(f"need K <= Nt, got K={H.shape[0]}, Nt={H.shape[1]}")
    return H


def check_symbols(S, K, M):
    """Return symbol indices as an int ``(n_slots, K)`` array."""
    S = np.asarray(S)
    if S.ndim == 1:
        S = S[None, :]
    if S.ndim != 2 or S.shape[1] != K:
        raise ValueError(f"symbols must have shape (n_slots, {K}), got {S.shape}")
    if not np.issubdtype(S.dtype, np.integer):
        if not np.all(np.equal(np.mod(S, 1), 0)):
            raise ValueError("symbol indices must be integers")
        S = S.astype(int)
    if np.any(S < 0) or np.any(S >= M):
        raise ValueError(f"symbol indices must lie in [0, {M})")
    return S


def check_is_fitted(est, attrs=("H_",)):
    if not all(hasattr(est, a) for a in attrs):
        raise NotFittedError(
            f"This {type(est).__name__} instance is not fitted yet. Call 'fit' with a channel first."
        )
