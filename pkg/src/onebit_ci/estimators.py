"""scikit-learn style precoders.

A precoder is fitted to a channel matrix and then maps blocks of symbol
indices to transmit vectors::

    pre = NL1PPrecoder(order=8).fit(H)
    X = pre.predict(S)          # S: (n_slots, K) ints -> X: (n_slots, Nt) complex

``get_params``/``set_params``/``clone`` come from :class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_channel, check_is_fitted, check_order, check_symbols
from .baselines import brute_force, zf_quantized, zf_unquantized
from .model import build_model, restore_transmit_signal
from .solvers import HomotopyParams, default_ao_params, nl1p

__all__ = [
    "BruteForcePrecoder",
    "NL1PPrecoder",
    "ZFPrecoder",
    "make_precoder",
    "PRECODERS",
]


class _PrecoderBase(BaseEstimator):
    """Shared fit/predict plumbing; subclasses implement ``_precode_one``."""

    one_bit = True

    def fit(self, H, y=None):
        H = check_channel(H, require_full_row_rank=self._needs_full_rank)
        check_order(self.order)
        self.H_ = H
        self.n_users_, self.n_antennas_ = H.shape
        return self

    _needs_full_rank = False

    def predict(self, S):
        """Transmit vectors for each row of symbol indices.

        Returns an ``(n_slots, Nt)`` complex array of unit-power signals.
        Per-slot solve times are kept in ``solve_seconds_`` and the number of
        inner iterations (0 for non-iterative precoders) in ``iterations_``.
        """
        check_is_fitted(self)
        S = check_symbols(S, self.n_users_, self.order)
        out = np.empty((S.shape[0], self.n_antennas_), dtype=complex)
        self.solve_seconds_ = np.empty(S.shape[0])
        self.iterations_ = np.zeros(S.shape[0], dtype=int)
        for i, s in enumerate(S):
            t0 = time.perf_counter()
            out[i], self.iterations_[i] = self._precode_one(s)
            self.solve_seconds_[i] = time.perf_counter() - t0
        return out

    def _model(self, s):
        return build_model(self.H_, s, self.order)


class NL1PPrecoder(_PrecoderBase):
    """Negative l1 penalty precoder.

    Parameters
    ----------
    order : int
        PSK order M.
    variant : {"standard", "accelerated"}
        ``"accelerated"`` freezes coordinates once they reach +-1.
    lambda0 : float or None
        Initial penalty; ``None`` means ``0.001 * order / 8``.
    delta : float
        Penalty growth factor.
    max_outer : int
    feas_tol : float
    max_iter : int
        Inner iteration cap.
    tol : float
        Inner stopping threshold on successive iterates.
    stop_norm : {"l2", "inf"}
    """

    def __init__(
        self,
        order=8,
        variant="standard",
        lambda0=None,
        delta=5.0,
        max_outer=20,
        feas_tol=1e-6,
        max_iter=500,
        tol=1e-3,
        stop_norm="l2",
    ):
        self.order = order
        self.variant = variant
        self.lambda0 = lambda0
        self.delta = delta
        self.max_outer = max_outer
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        self.tol = tol
        self.stop_norm = stop_norm

    def homotopy_params(self):
        lam0 = 0.001 * self.order / 8 if self.lambda0 is None else self.lambda0
        return HomotopyParams(lam0, self.delta, self.max_outer, self.feas_tol)

    def solve(self, model):
        ap = None
        if np.any(model.A):
            ap = default_ao_params(
                model, max_iter=self.max_iter, tol=self.tol, stop_norm=self.stop_norm
            )
        return nl1p(model, self.homotopy_params(), ap, variant=self.variant)

    def _precode_one(self, s):
        model = self._model(s)
        report = self.solve(model)
        self.last_report_ = report
        return restore_transmit_signal(report.x, model), report.inner_iterations


class ZFPrecoder(_PrecoderBase):
    """Zero-forcing precoder, one-bit quantized or infinite resolution."""

    _needs_full_rank = True

    def __init__(self, order=8, quantized=True):
        self.order = order
        self.quantized = quantized

    @property
    def one_bit(self):
        return self.quantized

    def _precode_one(self, s):
        if self.quantized:
            x = zf_quantized(self.H_, s, self.order)
            return restore_transmit_signal(x, self._model(s)), 0
        return zf_unquantized(self.H_, s, self.order), 0


class BruteForcePrecoder(_PrecoderBase):
    """Exhaustive search; only for ``2 * Nt <= 26``."""

    def __init__(self, order=8):
        self.order = order

    def _precode_one(self, s):
        model = self._model(s)
        x, _ = brute_force(model)
        return restore_transmit_signal(x, model), 0


PRECODERS = {
    "nl1p": lambda order, **kw: NL1PPrecoder(order=order, variant="standard", **kw),
    "anl1p": lambda order, **kw: NL1PPrecoder(order=order, variant="accelerated", **kw),
    "zf_quantized": lambda order, **kw: ZFPrecoder(order=order, quantized=True),
    "zf_unquantized": lambda order, **kw: ZFPrecoder(order=order, quantized=False),
    "brute_force": lambda order, **kw: BruteForcePrecoder(order=order),
}


def make_precoder(name, order, **solver_kwargs):
    """Build a registered precoder; ``solver_kwargs`` only reach the NL1P family."""
    try:
        factory = PRECODERS[name]
    except KeyError:
        raise ValueError(f"unknown precoder {name!r}; choose from {sorted(PRECODERS)}") from None
    return factory(order, **solver_kwargs)
