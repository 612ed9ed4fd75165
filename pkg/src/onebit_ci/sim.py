"""Monte Carlo BER and timing harness.

Each trial draws one Rayleigh channel, then ``block_len`` symbol vectors.
Every selected precoder is solved once per slot; the resulting signal is
sent at every SNR of the grid with fresh noise. Noise is drawn per
(slot, SNR) and shared by all precoders, so precoders are compared on
common random numbers. Randomness is keyed by ``(seed, trial)`` and is
therefore independent of the worker that runs a trial.

Bits are Gray mapped (``m ^ (m >> 1)``); SNR is ``1/sigma^2`` for a
unit-power transmit signal.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_order
from .estimators import PRECODERS, make_precoder
from .model import psk_constellation
from .numerics import RngStream

__all__ = [
    "BerRecord",
    "ExperimentConfig",
    "WORKERS_ENV",
    "bit_errors",
    "gray_bits",
    "rayleigh_channel",
    "run_sweep",
    "transmit_decode",
    "worker_count",
]

logger = logging.getLogger(__name__)

WORKERS_ENV = "ONEBIT_CI_WORKERS"
BIT_MAP = "gray"

# stream keys under a trial's RNG
_CHANNEL, _SYMBOLS, _NOISE = 0, 1, 2


def worker_count():
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        return max(1, int(raw))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    K: int = 16
    Nt: int = 128
    M: int = 8
    snr_db_grid: list = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0, 25.0])
    block_len: int = 10
    trials: int = 1000
    seed: int = 0
    precoders: list = field(default_factory=lambda: ["nl1p", "anl1p", "zf_quantized", "zf_unquantized"])
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        check_order(self.M)
        if self.K < 1 or self.Nt < 1:
            raise ValueError("K and Nt must be positive")
        if self.K > self.Nt:
            raise ValueError("need K <= Nt")
        if self.trials < 1 or self.block_len < 1:
            raise ValueError("trials and block_len must be >= 1")
        if len(self.snr_db_grid) == 0:
            raise ValueError("SNR grid is empty")
        if not self.precoders:
            raise ValueError("no precoders selected")
        unknown = [p for p in self.precoders if p not in PRECODERS]
        if unknown:
            raise ValueError(f"unknown precoders {unknown}; choose from {sorted(PRECODERS)}")
        if len(set(self.precoders)) != len(self.precoders):
            raise ValueError("duplicate precoder names")


@dataclass
class BerRecord:
    precoder: str
    snr_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    mean_solve_seconds: float
    failures: int = 0
    mean_iterations: float = 0.0

    def __post_init__(self):
        if not 0 <= self.bit_errors <= self.bits_sent:
            raise ValueError("bit_errors out of range")


def rayleigh_channel(K, Nt, rng):
    """i.i.d. CN(0, 1) entries: real and imaginary parts N(0, 1/2)."""
    if K < 1 or Nt < 1:
        raise ValueError("channel dimensions must be positive")
    z = rng.standard_normal((2, K, Nt))
    return (z[0] + 1j * z[1]) / math.sqrt(2)


def gray_bits(m, M):
    """Binary-reflected Gray label of index ``m`` as a ``log2(M)``-bit string."""
    M = int(M)
    if M < 2 or M & (M - 1):
        raise ValueError("M must be a power of two")
    if not 0 <= m < M:
        raise ValueError(f"index {m} out of range for M={M}")
    width = M.bit_length() - 1
    return format(m ^ (m >> 1), f"0{width}b")


def bit_errors(sent, decoded):
    """Total Gray-coded bit errors between two index arrays."""
    g1 = np.asarray(sent) ^ (np.asarray(sent) >> 1)
    g2 = np.asarray(decoded) ^ (np.asarray(decoded) >> 1)
    diff = np.bitwise_xor(g1, g2).astype(np.uint64)
    return int(sum(bin(int(d)).count("1") for d in diff.ravel()))


def decode(y, M):
    """Nearest PSK point per entry; ties go to the smaller index."""
    pts = psk_constellation(M)
    metric = np.real(np.asarray(y)[..., None] * np.conj(pts))
    return np.argmax(metric, axis=-1)


def transmit_decode(x_T, H, s, sigma2, rng, M):
    """Send ``x_T`` over ``H`` with CN(0, sigma2) noise and decode each user."""
    x_T = np.asarray(x_T, dtype=complex)
    if abs(np.linalg.norm(x_T) - 1.0) > 1e-6:
        raise ValueError("transmit signal must have unit power")
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    H = np.atleast_2d(H)
    z = rng.standard_normal((2, H.shape[0]))
    noise = math.sqrt(sigma2 / 2) * (z[0] + 1j * z[1])
    return decode(H @ x_T + noise, M)


def _run_trial(config, trial):
    """Bit errors, solve times and failures for one channel realization."""
    root = RngStream(config.seed).child(trial)
    H = rayleigh_channel(config.K, config.Nt, root.child(_CHANNEL))
    S = root.child(_SYMBOLS).integers(0, config.M, size=(config.block_len, config.K))
    sigma = [math.sqrt(10 ** (-snr / 10)) for snr in config.snr_db_grid]
    noise_rng = root.child(_NOISE)
    z = noise_rng.standard_normal((2, config.block_len, len(sigma), config.K))
    noise = (z[0] + 1j * z[1]) / math.sqrt(2)

    n_snr = len(sigma)
    out = {}
    for name in config.precoders:
        errors = np.zeros(n_snr, dtype=np.int64)
        bits = np.zeros(n_snr, dtype=np.int64)
        seconds, iters, failures = [], [], 0
        pre = make_precoder(name, config.M, **config.solver)
        try:
            pre.fit(H)
        except Exception as exc:  # noqa: BLE001 - recorded, not fatal
            logger.warning("precoder %s failed to fit on trial %d: %s", name, trial, exc)
            out[name] = (errors, bits, seconds, iters, config.block_len)
            continue
        for t in range(config.block_len):
            try:
                x_T = pre.predict(S[t])[0]
            except Exception as exc:  # noqa: BLE001
                logger.warning("precoder %s failed on trial %d slot %d: %s", name, trial, t, exc)
                failures += 1
                continue
            seconds.append(float(pre.solve_seconds_[0]))
            iters.append(int(pre.iterations_[0]))
            clean = H @ x_T
            for j, sg in enumerate(sigma):
                s_hat = decode(clean + sg * noise[t, j], config.M)
                errors[j] += bit_errors(S[t], s_hat)
                bits[j] += config.K * int(math.log2(config.M))
        out[name] = (errors, bits, seconds, iters, failures)
    return out


def _run_trials(args):
    config, trials = args
    return [(i, _run_trial(config, i)) for i in trials]


def run_sweep(config, workers=None):
    """Run the Monte Carlo experiment; one :class:`BerRecord` per (precoder, SNR)."""
    workers = worker_count() if workers is None else max(1, int(workers))
    trials = list(range(config.trials))
    if workers == 1 or config.trials == 1:
        results = _run_trials((config, trials))
    else:
        chunks = [trials[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_trials, [(config, c) for c in chunks]) for r in part]
        results.sort(key=lambda r: r[0])

    records = []
    n_snr = len(config.snr_db_grid)
    for name in config.precoders:
        errors = np.zeros(n_snr, dtype=np.int64)
        bits = np.zeros(n_snr, dtype=np.int64)
        seconds, iters, failures = [], [], 0
        for _, res in results:
            e, b, sec, it, f = res[name]
            errors += e
            bits += b
            seconds += sec
            iters += it
            failures += f
        if failures:
            warnings.warn(f"{name}: {failures} precoder failures excluded", RuntimeWarning, stacklevel=2)
        for j, snr in enumerate(config.snr_db_grid):
            b = int(bits[j])
            records.append(
                BerRecord(
                    precoder=name,
                    snr_db=float(snr),
                    bits_sent=b,
                    bit_errors=int(errors[j]),
                    ber=errors[j] / b if b else float("nan"),
                    mean_solve_seconds=float(np.mean(seconds)) if seconds else float("nan"),
                    failures=failures,
                    mean_iterations=float(np.mean(iters)) if iters else 0.0,
                )
            )
    return records
