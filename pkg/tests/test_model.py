import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onebit_ci.model import (
    CiModel,
    boundary_vectors,
    build_model,
    build_vk,
    ci_margin,
    ci_objective,
    decompose,
    psk_point,
    quantize_onebit,
    restore_transmit_signal,
    stack_complex,
    unstack_complex,
)

from conftest import random_instance


def _alphas_direct(h, x_T, s, M):
    """Solve z = aA sA + aB sB as a 2x2 real system (independent of V_k)."""
    z = complex(np.dot(h, x_T))
    sa, sb = s * cmath.exp(-1j * math.pi / M), s * cmath.exp(1j * math.pi / M)
    mat = np.array([[sa.real, sb.real], [sa.imag, sb.imag]])
    return np.linalg.solve(mat, [z.real, z.imag])


class TestPsk:
    def test_points(self):
        assert psk_point(0, 8) == 1 + 0j
        assert abs(psk_point(2, 8) - 1j) < 1e-15
        assert abs(psk_point(1, 8) - (math.sqrt(2) / 2) * (1 + 1j)) < 1e-15

    @pytest.mark.parametrize("m,M", [(-1, 8), (8, 8), (0, 2), (0, 6)])
    def test_bad_arguments(self, m, M):
        with pytest.raises(ValueError):
            psk_point(m, M)

    @pytest.mark.parametrize("M", [4, 8, 16])
    def test_unit_modulus(self, M):
        for m in range(M):
            assert abs(abs(psk_point(m, M)) - 1) < 1e-12


class TestBoundaryVectors:
    def test_fig3_example(self):
        sa, sb = boundary_vectors(cmath.exp(2j * math.pi / 8), 8)
        assert abs(sa - cmath.exp(1j * math.pi / 8)) < 1e-15
        assert abs(sb - cmath.exp(3j * math.pi / 8)) < 1e-15

    def test_qpsk_real_axis(self):
        sa, sb = boundary_vectors(1, 4)
        assert abs(sa - cmath.exp(-1j * math.pi / 4)) < 1e-15
        assert abs(sb - cmath.exp(1j * math.pi / 4)) < 1e-15

    def test_imaginary_unit(self):
        sa, sb = boundary_vectors(1j, 8)
        assert abs(sa - cmath.exp(3j * math.pi / 8)) < 1e-15
        assert abs(sb - cmath.exp(5j * math.pi / 8)) < 1e-15

    @pytest.mark.parametrize("M", [4, 8, 16])
    def test_angles(self, M):
        for m in range(M):
            s = psk_point(m, M)
            sa, sb = boundary_vectors(s, M)
            assert abs(abs(sa) - 1) < 1e-12 and abs(abs(sb) - 1) < 1e-12
            d = (cmath.phase(s) - cmath.phase(sa)) % (2 * math.pi)
            assert abs(d - math.pi / M) < 1e-12
            d = (cmath.phase(sb) - cmath.phase(sa)) % (2 * math.pi)
            assert abs(d - 2 * math.pi / M) < 1e-12

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            boundary_vectors(1 + 1j, 8)


class TestBuildVk:
    def test_single_antenna_example(self):
        s = cmath.exp(2j * math.pi / 8)
        V = build_vk(np.array([1 + 0j]), s, 8)
        got = V @ np.array([1.0, 1.0])
        want = _alphas_direct(np.array([1.0]), np.array([1 + 1j]), s, 8)
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_basis_directions(self, rng):
        h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        s = psk_point(5, 16)
        sa, sb = boundary_vectors(s, 16)
        V = build_vk(h, s, 16)
        # x_T concentrated on antenna 0 such that h^T x_T hits sA, then sB
        for target, expect in ((sa, [1, 0]), (sb, [0, 1])):
            x_T = np.zeros(3, complex)
            x_T[0] = target / h[0]
            np.testing.assert_allclose(V @ stack_complex(x_T), expect, atol=1e-12)


class TestBuildModel:
    def test_shape_and_stacking(self, rng):
        H, s, model = random_instance(rng, 2, 5)
        assert model.A.shape == (4, 10)
        scale = 1 / math.sqrt(10)
        for k in range(2):
            V = build_vk(H[k] * scale, psk_point(s[k], 8), 8)
            np.testing.assert_allclose(model.A[2 * k : 2 * k + 2], -V, atol=1e-15)

    def test_immutable(self, rng):
        _, _, model = random_instance(rng, 1, 2)
        with pytest.raises(ValueError):
            model.A[0, 0] = 1.0

    def test_unnormalized_partition_block(self):
        # h = a + j a, boundaries 1 and j reproduce -[[a, -a], [a, a]]
        a = np.array([2.0, 3.0, 5.0])
        from onebit_ci.model import _vk_from_boundaries

        V = _vk_from_boundaries(a * (1 + 1j), 1 + 0j, 1j)
        np.testing.assert_array_equal(V, np.block([[a, -a], [a, a]]))

    def test_objective_matches_direct_decomposition(self, rng):
        for _ in range(20):
            K, Nt = rng.integers(1, 5), rng.integers(1, 9)
            H, s, model = random_instance(rng, K, Nt)
            x = rng.uniform(-1, 1, model.n)
            x_T = unstack_complex(x) * model.scale
            direct = np.array([_alphas_direct(H[k], x_T, psk_point(s[k], 8), 8) for k in range(K)])
            assert abs(ci_objective(model, x) + direct.min()) < 1e-12
            np.testing.assert_allclose(decompose(model, x), direct, atol=1e-12)

    def test_dimension_mismatch(self, rng):
        H = rng.standard_normal((3, 4))
        with pytest.raises(ValueError):
            build_model(H, [0, 1], 8)
        with pytest.raises(ValueError):
            CiModel(A=np.zeros((2, 3)), K=1, Nt=2, M=8, scale=0.5)


@settings(max_examples=60, deadline=None)
@given(
    K=st.integers(1, 4),
    Nt=st.integers(1, 8),
    M=st.sampled_from([4, 8, 16]),
    seed=st.integers(0, 2**32 - 1),
)
def test_decomposition_consistency(K, Nt, M, seed):
    rng = np.random.default_rng(seed)
    H, s, model = random_instance(rng, K, Nt, M)
    x = rng.uniform(-1, 1, model.n)
    x_T = unstack_complex(x) * model.scale
    alphas = decompose(model, x)
    for k in range(K):
        sa, sb = boundary_vectors(psk_point(s[k], M), M)
        z = H[k] @ x_T
        recon = alphas[k, 0] * sa + alphas[k, 1] * sb
        assert abs(recon - z) <= 1e-9 * max(abs(z), 1e-300) + 1e-14
    assert ci_objective(model, x) == pytest.approx(-alphas.min(), abs=1e-14)
    assert ci_margin(model, x) == pytest.approx(alphas.min(), abs=1e-14)


class TestObjective:
    def test_zero_matrix(self):
        model = CiModel(A=np.zeros((2, 4)), K=1, Nt=2, M=8, scale=0.5)
        assert ci_objective(model, np.array([1, -1, 1, 1.0])) == 0.0

    def test_origin(self, rng):
        _, _, model = random_instance(rng, 2, 3)
        assert ci_objective(model, np.zeros(model.n)) == 0.0

    def test_partition_perfect_split(self):
        from onebit_ci.baselines import partition_instance

        inst = partition_instance([1, 2, 3])
        # Re(x_T) = 1, Im(x_T) = +1 on {3}, -1 on {1, 2}
        x = np.array([1, 1, 1, -1, -1, 1.0])
        assert ci_objective(inst.model, x) == -6.0

    def test_wrong_length(self, rng):
        _, _, model = random_instance(rng, 1, 2)
        with pytest.raises(ValueError):
            ci_objective(model, np.zeros(3))


class TestQuantize:
    def test_examples(self):
        np.testing.assert_array_equal(quantize_onebit([0.3, -0.7]), [1, -1])
        np.testing.assert_array_equal(quantize_onebit([0.0, -0.0]), [1, 1])

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
    def test_idempotent_and_binary(self, vals):
        q = quantize_onebit(vals)
        assert set(np.unique(q)) <= {-1.0, 1.0}
        np.testing.assert_array_equal(quantize_onebit(q), q)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            quantize_onebit([np.nan])


class TestRestore:
    def _model(self, Nt):
        return CiModel(A=np.zeros((2, 2 * Nt)), K=1, Nt=Nt, M=8, scale=1 / math.sqrt(2 * Nt))

    def test_single_antenna(self):
        out = restore_transmit_signal(np.array([1.0, 1.0]), self._model(1))
        assert abs(out[0] - (1 + 1j) / math.sqrt(2)) < 1e-15

    def test_interleaving(self):
        out = restore_transmit_signal(np.array([1.0, -1.0, 1.0, -1.0]), self._model(2))
        np.testing.assert_allclose(out, [(1 + 1j) / 2, (-1 - 1j) / 2], atol=1e-15)

    def test_unit_power(self, rng):
        for Nt in (1, 3, 64):
            x = rng.choice([-1.0, 1.0], size=2 * Nt)
            out = restore_transmit_signal(x, self._model(Nt))
            assert abs(np.linalg.norm(out) ** 2 - 1) < 1e-9
            assert np.allclose(np.abs(out), 1 / math.sqrt(Nt))

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            restore_transmit_signal(np.array([1.0, 0.5]), self._model(1))
