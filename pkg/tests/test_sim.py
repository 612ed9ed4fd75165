import math
from dataclasses import replace

import numpy as np
import pytest

from onebit_ci.model import psk_constellation
from onebit_ci.numerics import RngStream
from onebit_ci.sim import (
    BerRecord,
    ExperimentConfig,
    bit_errors,
    decode,
    gray_bits,
    rayleigh_channel,
    run_sweep,
    transmit_decode,
    worker_count,
)


def test_channel_moments():
    H = rayleigh_channel(2, 50000, np.random.default_rng(3))
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.02)
    assert np.var(H.real) == pytest.approx(0.5, abs=0.01)
    corr = np.abs(np.mean(H[0] * H[1].conj()))
    assert corr < 0.02


def test_channel_deterministic():
    a = rayleigh_channel(3, 4, RngStream(5).child(1))
    b = rayleigh_channel(3, 4, RngStream(5).child(1))
    np.testing.assert_array_equal(a, b)


def test_gray_bits():
    assert gray_bits(0, 8) == "000"
    assert gray_bits(1, 8) == "001"
    assert gray_bits(2, 8) == "011"
    for M in (4, 8, 16):
        labels = [gray_bits(m, M) for m in range(M)]
        assert len(set(labels)) == M
        for m in range(M):
            a, b = labels[m], labels[(m + 1) % M]
            assert sum(u != v for u, v in zip(a, b)) == 1
    with pytest.raises(ValueError):
        gray_bits(8, 8)


def test_bit_errors_counts_gray_distance():
    assert bit_errors([0, 1], [0, 1]) == 0
    assert bit_errors([0], [1]) == 1
    assert bit_errors([0], [4]) == 2  # 000 vs 110


def test_decode_clean_and_tie():
    pts = psk_constellation(8)
    np.testing.assert_array_equal(decode(pts * 0.5, 8), np.arange(8))
    # exactly between points 0 and 1
    assert decode(np.array([np.exp(1j * np.pi / 8)]), 8)[0] == 0
    assert decode(np.array([np.exp(-1j * np.pi / 8)]), 8)[0] == 0


def test_transmit_noise_free():
    H = np.eye(2, dtype=complex)
    x = psk_constellation(8)[[2, 5]] / math.sqrt(2)
    np.testing.assert_array_equal(transmit_decode(x, H, [2, 5], 0.0, np.random.default_rng(0), 8), [2, 5])


def test_transmit_rejects():
    with pytest.raises(ValueError):
        transmit_decode(np.ones(2), np.eye(2), [0, 0], 0.1, np.random.default_rng(0), 8)
    with pytest.raises(ValueError):
        transmit_decode(np.array([1.0, 0]), np.eye(2), [0, 0], -1.0, np.random.default_rng(0), 8)


def test_symbol_error_matches_q_function():
    # signal at angle 0 with one boundary at pi/8: errors from the two
    # boundaries are nearly disjoint at this distance
    from math import erfc, sin

    sigma2, r = 0.05, 1.0
    d = r * sin(math.pi / 8)
    q = 0.5 * erfc(d / math.sqrt(sigma2 / 2) / math.sqrt(2))
    p = 2 * q
    n = 100000
    rng = np.random.default_rng(1)
    errs = 0
    z = rng.standard_normal((2, n))
    y = r + math.sqrt(sigma2 / 2) * (z[0] + 1j * z[1])
    errs = int(np.sum(decode(y, 8) != 0))
    se = math.sqrt(p * (1 - p) / n)
    assert abs(errs / n - p) <= 3 * se + p * p


def small_config(**kw):
    base = dict(K=2, Nt=4, M=8, snr_db_grid=[0.0, 10.0, 20.0], block_len=3, trials=4, seed=9,
                precoders=["nl1p", "zf_quantized", "zf_unquantized"])
    base.update(kw)
    return ExperimentConfig(**base)


def test_bit_accounting():
    cfg = small_config()
    recs = run_sweep(cfg, workers=1)
    assert len(recs) == 9
    for r in recs:
        assert r.bits_sent == cfg.trials * cfg.block_len * cfg.K * 3
        assert r.ber == r.bit_errors / r.bits_sent


def test_deterministic_and_worker_independent():
    strip = lambda rs: [replace(r, mean_solve_seconds=0.0) for r in rs]
    cfg = small_config()
    a = strip(run_sweep(cfg, workers=1))
    assert a == strip(run_sweep(cfg, workers=1))
    assert a == strip(run_sweep(cfg, workers=2))


def test_noise_free_positive_margin_decodes():
    from onebit_ci.baselines import brute_force
    from onebit_ci.model import build_model, restore_transmit_signal

    rng = np.random.default_rng(6)
    checked = 0
    while checked < 30:
        H = rayleigh_channel(2, 4, rng)
        s = rng.integers(0, 8, 2)
        model = build_model(H, s, 8)
        x, v = brute_force(model)
        if v >= 0:  # margin not positive: decoding is not guaranteed
            continue
        got = transmit_decode(restore_transmit_signal(x, model), H, s, 0.0, rng, 8)
        np.testing.assert_array_equal(got, s)
        checked += 1


def test_noise_free_sweep_single_user():
    # one user and 6 antennas: the optimal margin is positive on these draws
    cfg = small_config(K=1, Nt=6, snr_db_grid=[300.0], precoders=["brute_force"], trials=10)
    assert run_sweep(cfg, workers=1)[0].ber == 0.0


def test_unquantized_zf_ber_monotone():
    cfg = small_config(K=4, Nt=8, snr_db_grid=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
                       precoders=["zf_unquantized"], trials=40, block_len=10)
    recs = run_sweep(cfg, workers=1)
    inversions = 0
    for a, b in zip(recs, recs[1:]):
        if b.ber > a.ber:
            se = math.sqrt(max(a.ber * (1 - a.ber), 1e-12) / a.bits_sent)
            assert b.ber - a.ber < 2 * se
            inversions += 1
    assert inversions <= 1


def test_constant_envelope():
    from onebit_ci.estimators import make_precoder

    rng = np.random.default_rng(4)
    H = rayleigh_channel(3, 8, rng)
    S = rng.integers(0, 8, (5, 3))
    for name in ("nl1p", "anl1p", "zf_quantized", "brute_force"):
        X = make_precoder(name, 8).fit(H).predict(S)
        np.testing.assert_allclose(np.abs(X.real), 1 / 4, rtol=0, atol=1e-15)
        np.testing.assert_allclose(np.abs(X.imag), 1 / 4, rtol=0, atol=1e-15)


def test_config_validation():
    for kw in (dict(K=5, Nt=4), dict(trials=0), dict(snr_db_grid=[]), dict(precoders=["wf"]),
               dict(precoders=[]), dict(M=6)):
        with pytest.raises(ValueError):
            small_config(**kw)


def test_record_validation():
    with pytest.raises(ValueError):
        BerRecord("x", 0.0, 10, 11, 1.1, 0.0)


def test_worker_env(monkeypatch):
    monkeypatch.setenv("ONEBIT_CI_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("ONEBIT_CI_WORKERS")
    assert worker_count() >= 1


def test_failures_are_recorded_not_raised():
    # brute force refuses n > 26: every slot fails and is excluded
    cfg = small_config(K=1, Nt=14, precoders=["brute_force", "zf_quantized"], trials=1, block_len=2)
    with pytest.warns(RuntimeWarning, match="brute_force"):
        recs = run_sweep(cfg, workers=1)
    bf = [r for r in recs if r.precoder == "brute_force"]
    assert all(r.failures == 2 and r.bits_sent == 0 for r in bf)
