import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestcorona.exceptions import ConditionViolated, ResidualNotMet, WindowError
from nestcorona.fourier_model import (
    TrigPoly,
    corona_epsilon_scalar,
    scalar_corona,
    shift_expectation,
    toeplitz_section,
)

from .strategies import seeds

Z = TrigPoly.analytic([0, 1])
ONE = TrigPoly.constant(1)


def rand_poly(rng, K, analytic=False):
    c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
    if analytic:
        c[:K] = 0
    return TrigPoly(c)


class TestTrigPoly:
    @given(seeds, st.integers(0, 6))
    def test_evaluation_matches_coefficients(self, seed, K):
        rng = np.random.default_rng(seed)
        f = rand_poly(rng, K)
        theta = rng.uniform(0, 2 * np.pi, size=5)
        direct = [sum(f.coef(n) * np.exp(1j * n * t) for n in range(-K, K + 1)) for t in theta]
        assert np.allclose(f(theta), direct, atol=1e-12)

    @given(seeds)
    def test_product_is_pointwise(self, seed):
        rng = np.random.default_rng(seed)
        f, g = rand_poly(rng, 3), rand_poly(rng, 2)
        th = np.linspace(0, 6, 7)
        assert np.allclose((f * g)(th), f(th) * g(th))
        assert np.allclose((f + g)(th), f(th) + g(th))
        assert np.allclose((f - 2)(th), f(th) - 2)

    def test_degree_and_analytic(self):
        f = TrigPoly.from_dict({-1: 0, 2: 3.0})
        assert f.K == 2 and f.degree == 2 and f.is_analytic
        assert not TrigPoly.from_dict({-1: 1}).is_analytic
        assert f.trimmed().K == 2

    def test_even_length_rejected(self):
        with pytest.raises(ValueError):
            TrigPoly(np.zeros(4))


class TestSection:
    def test_constant(self):
        assert np.array_equal(toeplitz_section(ONE, 5).matrix, np.eye(5))

    def test_forward_shift(self):
        S = toeplitz_section(Z, 3)
        assert np.array_equal(S.matrix, np.eye(3, k=-1))
        assert S.analytic

    @given(seeds, st.integers(1, 4), st.integers(12, 30))
    def test_constant_diagonals_and_triangularity(self, seed, K, m):
        rng = np.random.default_rng(seed)
        f = rand_poly(rng, K, analytic=True)
        T = toeplitz_section(f, m).matrix
        assert np.array_equal(T, np.tril(T))
        for q in range(-m + 1, m):
            assert np.all(np.diag(T, -q) == f.coef(q))

    @given(seeds, st.integers(1, 3), st.integers(12, 30))
    def test_product_interior(self, seed, K, m):
        rng = np.random.default_rng(seed)
        f, g = rand_poly(rng, K), rand_poly(rng, K)
        lhs = toeplitz_section(f, m).matrix @ toeplitz_section(g, m).matrix
        rhs = toeplitz_section(f * g, m).matrix
        inner = slice(K, m - K)
        assert np.allclose(lhs[inner, inner], rhs[inner, inner], atol=1e-12)

    def test_bad_size(self):
        with pytest.raises(ValueError):
            toeplitz_section(ONE, 0)


class TestShiftExpectation:
    @given(seeds, st.integers(0, 7))
    def test_section_recovered(self, seed, w):
        rng = np.random.default_rng(seed)
        f = rand_poly(rng, 4)
        se = shift_expectation(toeplitz_section(f, 32).matrix, w)
        assert se.symbol.allclose(f, 1e-13)
        assert se.deviation <= 1e-25

    def test_corner_bump(self, rng):
        m, w = 64, 2
        f = rand_poly(rng, 5)
        T = toeplitz_section(f, m).matrix.copy()
        T[0, 0] += 1.0
        se = shift_expectation(T, w)
        for q in range(-5, 6):
            assert se.symbol.coef(q) == pytest.approx(f.coef(q), abs=1e-14)
        assert se.deviation <= 2 / (m - 2 * w)

    @pytest.mark.parametrize("n", [-3, 0, 1, 2])
    def test_projection_gives_unit_symbol(self, n):
        m, w = 64, 2
        P = np.diag((np.arange(m) >= n).astype(float))
        assert shift_expectation(P, w).symbol.allclose(ONE, 0.0)

    def test_unital(self):
        assert shift_expectation(np.eye(40), 3).symbol.allclose(ONE, 0.0)

    @given(seeds)
    def test_contractive(self, seed):
        rng = np.random.default_rng(seed)
        T = rng.normal(size=(24, 24)) + 1j * rng.normal(size=(24, 24))
        se = shift_expectation(T, 3)
        bound = np.linalg.norm(T, 2)
        assert np.all(np.abs(se.symbol.coeffs) <= bound + 1e-12)

    @given(seeds, st.integers(0, 3))
    def test_module_property(self, seed, deg_b):
        rng = np.random.default_rng(seed)
        m, w = 64, deg_b + 1
        f = rand_poly(rng, 4)
        b = rand_poly(rng, deg_b, analytic=True)
        T = toeplitz_section(f, m).matrix.copy()
        T[:w, :w] += rng.normal(size=(w, w))
        lhs = shift_expectation(toeplitz_section(b, m).matrix @ T, w).symbol
        assert lhs.allclose(b * shift_expectation(T, w).symbol, 1e-12)

    def test_section_commutation_interior(self, rng):
        m, K = 40, 3
        a, b = rand_poly(rng, K, True), rand_poly(rng, K, True)
        Ta, Tb = toeplitz_section(a, m).matrix, toeplitz_section(b, m).matrix
        inner = slice(K, m - K)
        assert np.allclose((Ta @ Tb - Tb @ Ta)[inner, inner], 0, atol=1e-12)

    @pytest.mark.parametrize("w", [16, 20, -1])
    def test_window_too_large(self, w):
        with pytest.raises(WindowError):
            shift_expectation(np.eye(64), w)


class TestScalarEpsilon:
    @pytest.mark.parametrize("m", [1, 5, 33])
    def test_constant(self, m):
        assert corona_epsilon_scalar([ONE], m).eps == pytest.approx(1.0)

    @pytest.mark.parametrize("m", [1, 5, 33])
    def test_shift_alone(self, m):
        assert corona_epsilon_scalar([Z], m).eps == 0.0

    @pytest.mark.parametrize("m", [1, 5, 33])
    def test_shift_and_half(self, m):
        e = corona_epsilon_scalar([Z, TrigPoly.constant(0.5)], m)
        assert e.eps >= 0.5 - 1e-14
        assert e.circle_min >= 0.5

    @given(seeds)
    def test_nonincreasing_in_section_size(self, seed):
        rng = np.random.default_rng(seed)
        fs = [rand_poly(rng, 3, analytic=True) for _ in range(2)]
        eps = [corona_epsilon_scalar(fs, m).eps for m in range(1, 20)]
        assert all(b <= a + 1e-12 for a, b in zip(eps, eps[1:]))

    @given(seeds)
    def test_kernel_vector_at_origin(self, seed):
        rng = np.random.default_rng(seed)
        fs = [rand_poly(rng, 3, analytic=True) for _ in range(2)]
        at_zero = np.sqrt(sum(abs(f.coef(0)) ** 2 for f in fs))
        assert corona_epsilon_scalar(fs, 16).eps <= at_zero + 1e-12

    def test_empty(self):
        with pytest.raises(ValueError):
            corona_epsilon_scalar([], 4)


class TestScalarCorona:
    def test_constant(self):
        r = scalar_corona([ONE])
        assert r.residual == 0.0
        assert r.g_list[0].trimmed().allclose(ONE, 1e-15)

    def test_shift_and_half(self):
        r = scalar_corona([Z, TrigPoly.constant(0.5)])
        assert r.residual <= 1e-12

    def test_bezout_pair(self):
        f1, f2 = Z - 0.5, Z + 0.5
        r = scalar_corona([f1, f2])
        assert r.residual <= 1e-8
        total = f1 * r.g_list[0] + f2 * r.g_list[1]
        assert total.trimmed().allclose(ONE, 1e-10)

    def test_shift_rejected(self):
        with pytest.raises(ConditionViolated) as exc:
            scalar_corona([Z])
        assert exc.value.measured == 0.0

    def test_nonanalytic_rejected(self):
        with pytest.raises(ValueError):
            scalar_corona([TrigPoly.from_dict({-1: 1, 0: 2})])

    def test_cap_reached_curve_monotone(self):
        # common zero outside the disc: only approximate polynomial solutions
        f1, f2 = Z - 1.2, (Z - 1.2) * (Z + 0.3)
        with pytest.raises(ResidualNotMet) as exc:
            scalar_corona([f1, f2], deg_g=2, tol=1e-14, cap=12)
        curve = exc.value.curve
        assert [d for d, _ in curve] == list(range(2, 13))
        res = [r for _, r in curve]
        assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
        assert res[-1] < res[0]

    def test_degree_search_reaches_tolerance(self):
        f1, f2 = Z - 1.5, (Z - 1.5) * (Z + 0.3)
        r = scalar_corona([f1, f2], deg_g=2, tol=1e-6)
        assert r.ok and r.deg_g > 2
        assert all(b <= a + 1e-12 for (_, a), (_, b) in zip(r.curve, r.curve[1:]))

    def test_bound_is_informational(self):
        r = scalar_corona([Z, TrigPoly.constant(0.5)])
        d = r.as_dict()
        assert "bound_informational" in d and d["ok"]
