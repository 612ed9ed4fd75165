import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onebit_ci.baselines import (
    brute_force,
    has_perfect_partition,
    partition_instance,
    zf_direction,
    zf_quantized,
    zf_unquantized,
)
from onebit_ci.model import CiModel, ci_objective, psk_constellation, stack_complex

from conftest import random_instance


def exhaustive(A):
    best = None
    for bits in itertools.product((-1.0, 1.0), repeat=A.shape[1]):
        v = np.max(A @ np.array(bits))
        if best is None or v < best[1]:
            best = (np.array(bits), v)
    return best


class TestBruteForce:
    def test_zero_matrix_lexicographic(self):
        x, v = brute_force(CiModel(A=np.zeros((2, 4)), K=1, Nt=2, M=8, scale=0.5))
        np.testing.assert_array_equal(x, -np.ones(4))
        assert v == 0.0

    def test_single_row(self):
        x, v = brute_force(np.array([[1.0, 1.0]]))
        np.testing.assert_array_equal(x, [-1, -1])
        assert v == -2.0

    def test_refuses_large(self):
        with pytest.raises(ValueError, match="refused"):
            brute_force(np.zeros((2, 28)))

    @pytest.mark.parametrize("n", [1, 5, 13, 14])
    def test_matches_naive(self, rng, n):
        for _ in range(3):
            A = rng.standard_normal((3, n))
            x, v = brute_force(A)
            xr, vr = exhaustive(A)
            assert v == pytest.approx(vr, abs=1e-12)
            np.testing.assert_array_equal(x, xr)

    def test_lower_bounds_solver(self, rng):
        from onebit_ci.solvers import nl1p

        for _ in range(20):
            _, _, model = random_instance(rng, 2, 4)
            assert ci_objective(model, nl1p(model).x) >= brute_force(model)[1] - 1e-12


class TestPartition:
    @pytest.mark.parametrize("a,expected", [([1, 1], -2.0), ([1, 2, 3], -6.0), ([2, 3, 5], -10.0)])
    def test_perfect(self, a, expected):
        inst = partition_instance(a)
        assert has_perfect_partition(a)
        assert brute_force(inst.model)[1] == pytest.approx(expected)
        assert inst.target == expected

    def test_no_partition(self):
        inst = partition_instance([1, 2])
        assert not has_perfect_partition([1, 2])
        assert brute_force(inst.model)[1] > -3

    def test_shape(self):
        inst = partition_instance([4, 1, 7])
        assert (inst.model.K, inst.model.Nt, inst.model.M) == (1, 3, 8)
        a = np.array([4, 1, 7])
        np.testing.assert_allclose(inst.model.A, -np.block([[a, -a], [a, a]]))

    @pytest.mark.parametrize("bad", [[0, 1], [-1, 2], [1.5, 2], [], list(range(1, 15))])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            partition_instance(bad)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 20), min_size=1, max_size=9))
    def test_oracle_iff_partition(self, a):
        inst = partition_instance(a)
        x, v = brute_force(inst.model)
        perfect = has_perfect_partition(a)
        assert (abs(v + sum(a)) < 1e-9) == perfect
        if perfect:
            # real part of the optimal transmit signal is all ones
            np.testing.assert_array_equal(x[: len(a)], 1.0)


class TestZeroForcing:
    def test_scalar(self):
        np.testing.assert_array_equal(zf_quantized(np.array([[1.0]]), [0], 8), [1, 1])

    def test_identity(self, rng):
        H = np.hstack([np.eye(3), np.zeros((3, 2))])
        s = rng.integers(0, 8, 3)
        sym = psk_constellation(8)[s]
        x = zf_quantized(H, s, 8)
        re, im = x[:5], x[5:]
        np.testing.assert_array_equal(re[:3], np.where(sym.real >= 0, 1, -1))
        np.testing.assert_array_equal(im[:3], np.where(sym.imag >= 0, 1, -1))
        np.testing.assert_array_equal(re[3:], 1)

    def test_residual(self, rng):
        H = (rng.standard_normal((2, 8)) + 1j * rng.standard_normal((2, 8))) / np.sqrt(2)
        s = rng.integers(0, 8, 2)
        sym = psk_constellation(8)[s]
        np.testing.assert_allclose(H @ zf_direction(H, s, 8), sym, atol=1e-9)
        x = zf_unquantized(H, s, 8)
        assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
        c = (H @ x) / sym
        assert np.allclose(c, c[0].real, atol=1e-9) and c[0].real > 0

    def test_single_user_closed_form(self, rng):
        h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        x = zf_unquantized(h[None], [3], 8)
        np.testing.assert_allclose(x, h.conj() / np.linalg.norm(h) * psk_constellation(8)[3], atol=1e-12)

    def test_output_is_one_bit(self, rng):
        for _ in range(20):
            H, s, _ = random_instance(rng, 4, 16)
            assert set(np.unique(zf_quantized(H, s, 8))) <= {-1.0, 1.0}
            assert stack_complex(zf_unquantized(H, s, 8)).shape == (32,)

    def test_singular(self):
        H = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(np.linalg.LinAlgError):
            zf_quantized(H, [0, 1], 8)

    def test_too_many_users(self):
        with pytest.raises(ValueError):
            zf_quantized(np.ones((3, 2)), [0, 0, 0], 8)
