"""Constructive-interference (symbol scaling) model for one-bit precoding.

Conventions
-----------
* A transmit vector ``x_T`` in C^Nt is stacked as the real vector
  ``x = [Re(x_T); Im(x_T)]`` of length ``n = 2 Nt``.
* For user ``k`` the noise-free received signal ``h_k^T x_T`` is decomposed
  along the two decision-boundary directions ``s_A = s e^{-j pi/M}`` and
  ``s_B = s e^{j pi/M}``: ``h_k^T x_T = alpha_A s_A + alpha_B s_B``.
* ``A = -[V_1; ...; V_K]`` is ``(2K, 2Nt)``, so ``A @ x`` is
  ``-[alpha_1^A, alpha_1^B, alpha_2^A, ...]`` and the CI margin is
  ``-max(A @ x)``.
* One-bit DACs emit entries of ``{+-1 +- j} / sqrt(2 Nt)``. The model folds
  the ``1/sqrt(2 Nt)`` factor into ``A`` so that the bit vector ``x`` lives
  in ``{-1, +1}^n`` while ``alpha`` refers to the unit-power signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CiModel",
    "boundary_vectors",
    "build_model",
    "build_vk",
    "ci_margin",
    "ci_objective",
    "decompose",
    "psk_constellation",
    "psk_point",
    "quantize_onebit",
    "restore_transmit_signal",
    "stack_complex",
    "unstack_complex",
]


def _check_order(M):
    M = int(M)
    if M < 4 or M & (M - 1):
        raise ValueError(f"PSK order must be a power of two >= 4, got {M}")
    return M


def psk_point(m, M):
    """Unit-modulus M-PSK symbol ``exp(j 2 pi m / M)``."""
    M = _check_order(M)
    if not 0 <= int(m) < M:
        raise ValueError(f"symbol index {m} out of range for M={M}")
    return complex(np.exp(2j * np.pi * int(m) / M))


def psk_constellation(M):
    M = _check_order(M)
    return np.exp(2j * np.pi * np.arange(M) / M)


def boundary_vectors(s, M):
    """Unit vectors along the two decision boundaries enclosing ``s``."""
    M = _check_order(M)
    s = complex(s)
    if abs(abs(s) - 1.0) > 1e-12:
        raise ValueError("boundary_vectors expects a unit-modulus symbol")
    rot = np.exp(1j * np.pi / M)
    return s / rot, s * rot


def _vk_from_boundaries(h, s_a, s_b):
    h = np.asarray(h, dtype=complex).ravel()
    den = s_a.real * s_b.imag - s_a.imag * s_b.real
    if abs(den) < 1e-15:
        raise ValueError("boundary directions are collinear; decomposition undefined")
    inv = np.array([[s_b.imag, -s_b.real], [-s_a.imag, s_a.real]])
    # real form of x_T -> h^T x_T
    hr = np.vstack([np.concatenate([h.real, -h.imag]), np.concatenate([h.imag, h.real])])
    return (inv @ hr) / den


def build_vk(h_k, s_k, M):
    """Real ``2 x 2Nt`` matrix mapping ``x`` to ``[alpha_A, alpha_B]``."""
    s_a, s_b = boundary_vectors(s_k, M)
    return _vk_from_boundaries(h_k, s_a, s_b)


@dataclass(frozen=True)
class CiModel:
    """Data of the min-max problem ``min_{x in {-1,1}^n} max_l a_l^T x``.

    Attributes
    ----------
    A : ndarray, shape (2K, 2Nt)
    K, Nt, M : int
    scale : float
        Amplitude factor ``1/sqrt(2 Nt)`` turning a bit vector into a
        unit-power transmit signal.
    """

    A: np.ndarray
    K: int
    Nt: int
    M: int
    scale: float

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.shape != (2 * self.K, 2 * self.Nt):
            raise ValueError(f"A has shape {A.shape}, expected {(2 * self.K, 2 * self.Nt)}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self):
        return 2 * self.Nt

    @property
    def m(self):
        return 2 * self.K

    @property
    def row_inf_norm(self):
        """``max_l ||a_l||_inf``: the exact-penalty threshold for lambda."""
        return float(np.max(np.abs(self.A))) if self.A.size else 0.0


def build_model(H, s, M, *, normalize=True):
    """Stack ``-V_k`` for every user into a :class:`CiModel`.

    Parameters
    ----------
    H : array_like, shape (K, Nt), complex
    s : array_like of int, shape (K,)
        Constellation indices.
    M : int
    normalize : bool
        Fold ``1/sqrt(2 Nt)`` into ``A`` (default). With ``False`` the
        entries of ``x_T`` are taken as ``+-1 +- j`` directly.
    """
    M = _check_order(M)
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    s = np.atleast_1d(np.asarray(s))
    K, Nt = H.shape
    if s.shape != (K,):
        raise ValueError(f"symbol vector has shape {s.shape}, expected ({K},)")
    if not np.all(np.isfinite(H)):
        raise ValueError("channel has non-finite entries")
    scale = 1.0 / np.sqrt(2 * Nt)
    Hs = H * scale if normalize else H
    blocks = [build_vk(Hs[k], psk_point(s[k], M), M) for k in range(K)]
    return CiModel(A=-np.vstack(blocks), K=K, Nt=Nt, M=M, scale=scale)


def stack_complex(x_T):
    x_T = np.asarray(x_T, dtype=complex)
    return np.concatenate([x_T.real, x_T.imag])


def unstack_complex(x):
    x = np.asarray(x, dtype=float)
    half = x.shape[-1] // 2
    return x[..., :half] + 1j * x[..., half:]


def ci_objective(model, x):
    """``max_l a_l^T x``; the CI margin is its negation."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.n:
        raise ValueError(f"x has length {x.shape[-1]}, expected {model.n}")
    return float(np.max(model.A @ x))


def ci_margin(model, x):
    return -ci_objective(model, x)


def decompose(model, x):
    """Per-user ``(alpha_A, alpha_B)`` pairs, shape (K, 2)."""
    return -(model.A @ np.asarray(x, dtype=float)).reshape(model.K, 2)


def quantize_onebit(x):
    """Entrywise sign with ``sgn(0) = +1`` (also for ``-0.0``)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot quantize non-finite values")
    return np.where(x >= 0, 1.0, -1.0)


def restore_transmit_signal(x, model):
    """Complex unit-power transmit vector for the bit vector ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,) or not np.all(np.abs(x) == 1.0):
        raise ValueError("expected a vector in {-1, +1}^n")
    return unstack_complex(x) * model.scale
