import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qbmm.errors import DomainError
from qbmm.polykit import (
    GaussianKernel,
    Polynomial,
    companion_matrix_of,
    gaussian_moment,
    gaussian_moment_explicit,
    half_gaussian_moment,
    newton_power_sums,
    real_roots,
    smooth,
)

coeff_lists = st.lists(
    st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=7
)


class TestPolynomial:
    def test_evaluation_horner(self):
        p = Polynomial((1.0, -2.0, 3.0))  # 1 - 2u + 3u^2
        assert p(2.0) == pytest.approx(9.0)
        np.testing.assert_allclose(p(np.array([0.0, 1.0])), [1.0, 2.0])

    def test_degree_and_trim(self):
        assert Polynomial((1.0, 0.0, 0.0)).degree == 0
        assert Polynomial((0.0,)).degree == -1
        assert Polynomial((0.0, 1.0)).degree == 1

    def test_derivative(self):
        p = Polynomial((1.0, 2.0, 3.0))  # 1 + 2u + 3u^2
        assert p.derivative().coeffs == (2.0, 6.0)
        assert p.derivative(2).coeffs == (6.0,)
        assert p.derivative(3).coeffs == (0.0,)

    def test_from_roots(self):
        p = Polynomial.from_roots([1.0, -1.0])
        assert p.coeffs == (-1.0, 0.0, 1.0)

    def test_arithmetic(self):
        p = Polynomial((1.0, 1.0))
        q = Polynomial((-1.0, 1.0))
        assert (p * q).coeffs == (-1.0, 0.0, 1.0)
        assert (p + q).coeffs == (0.0, 2.0)
        assert (p - q).coeffs == (2.0,)
        assert (2.0 * p).coeffs == (2.0, 2.0)

    @given(coeff_lists, st.floats(min_value=-3, max_value=3, allow_nan=False))
    def test_product_rule_evaluation(self, coeffs, x):
        p = Polynomial(coeffs)
        q = Polynomial((1.0, 2.0, 1.0))
        assert (p * q)(x) == pytest.approx(p(x) * q(x), rel=1e-9, abs=1e-9)


class TestGaussianMoments:
    def test_kernel_rejects_negative_variance(self):
        with pytest.raises(DomainError):
            GaussianKernel(0.0, -1.0)

    def test_low_orders(self):
        u, s2 = 0.7, 0.4
        assert gaussian_moment(0, u, s2) == 1.0
        assert gaussian_moment(1, u, s2) == pytest.approx(u)
        assert gaussian_moment(2, u, s2) == pytest.approx(u**2 + s2)
        assert gaussian_moment(3, u, s2) == pytest.approx(u**3 + 3 * u * s2)

    @given(
        st.integers(min_value=0, max_value=10),
        st.floats(min_value=-3, max_value=3, allow_nan=False),
        st.floats(min_value=0, max_value=4, allow_nan=False),
    )
    def test_recursion_matches_explicit_sum(self, j, u, s2):
        assert gaussian_moment(j, u, s2) == pytest.approx(
            gaussian_moment_explicit(j, u, s2), rel=1e-12, abs=1e-12
        )

    def test_quadrature_oracle(self):
        u, s2 = -0.4, 0.9
        for j in range(7):
            val, _ = quad(
                lambda x: x**j * np.exp(-((x - u) ** 2) / (2 * s2)) / np.sqrt(2 * np.pi * s2),
                -20,
                20,
            )
            assert gaussian_moment(j, u, s2) == pytest.approx(val, abs=1e-10)


class TestSmoothing:
    def test_monomial_maps_to_gaussian_moment(self):
        for j in range(6):
            p = smooth(Polynomial.monomial(j), 0.7)
            assert p(1.3) == pytest.approx(gaussian_moment(j, 1.3, 0.7), rel=1e-12)

    @given(coeff_lists)
    def test_composition(self, coeffs):
        p = Polynomial(coeffs)
        a, b = 0.3, 0.5
        lhs = smooth(smooth(p, a), b)
        rhs = smooth(p, a + b)
        for x in (-1.0, 0.0, 2.0):
            assert lhs(x) == pytest.approx(rhs(x), rel=1e-9, abs=1e-9)

    @given(coeff_lists)
    def test_negative_theta_inverts(self, coeffs):
        p = Polynomial(coeffs)
        q = smooth(smooth(p, 0.8), -0.8)
        for c1, c2 in zip(q.coeffs, list(p.coeffs) + [0.0] * 10):
            assert c1 == pytest.approx(c2, rel=1e-9, abs=1e-9)

    @given(coeff_lists)
    def test_product_rule(self, coeffs):
        # D_t(u f) = u D_t f + t D_t f'
        f = Polynomial(coeffs)
        theta = 0.6
        lhs = smooth(Polynomial((0.0, 1.0)) * f, theta)
        rhs = Polynomial((0.0, 1.0)) * smooth(f, theta) + theta * smooth(f.derivative(), theta)
        for x in (-2.0, 0.5, 1.0):
            assert lhs(x) == pytest.approx(rhs(x), rel=1e-9, abs=1e-9)


class TestHalfGaussianMoments:
    def test_additivity(self):
        u, s2, cut = 0.3, 0.8, -0.2
        for j in range(6):
            total = half_gaussian_moment(j, u, s2, cut, "above") + half_gaussian_moment(
                j, u, s2, cut, "below"
            )
            assert total == pytest.approx(gaussian_moment(j, u, s2), rel=1e-12)

    def test_quadrature_oracle(self):
        u, s2, cut = 0.5, 0.6, 0.1
        for j in range(5):
            val, _ = quad(
                lambda x: x**j * np.exp(-((x - u) ** 2) / (2 * s2)) / np.sqrt(2 * np.pi * s2),
                cut,
                25,
            )
            assert half_gaussian_moment(j, u, s2, cut, "above") == pytest.approx(val, abs=1e-10)

    def test_centered_first_moment(self):
        # above-zero first moment of a centered Gaussian is sigma/sqrt(2 pi)
        s2 = 0.49
        expect = math.sqrt(s2) / math.sqrt(2 * math.pi)
        assert half_gaussian_moment(1, 0.0, s2, 0.0, "above") == pytest.approx(expect, rel=1e-12)

    def test_tail_bound(self):
        # cut far below the mean: half moment above equals the full moment
        for j in range(5):
            assert half_gaussian_moment(j, 2.0, 0.1, -10.0, "above") == pytest.approx(
                gaussian_moment(j, 2.0, 0.1), rel=1e-9
            )

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            half_gaussian_moment(-1, 0, 1, 0, "above")
        with pytest.raises(DomainError):
            half_gaussian_moment(1, 0, 0.0, 0, "above")
        with pytest.raises(DomainError):
            half_gaussian_moment(1, 0, 1, 0, "sideways")


class TestNewtonPowerSums:
    def test_known_roots(self):
        p = Polynomial.from_roots([1.0, 1.0, 2.0, 2.0])
        assert newton_power_sums(p, 4) == pytest.approx([4.0, 6.0, 10.0, 18.0, 34.0])

    @given(st.lists(st.floats(min_value=-2, max_value=2, allow_nan=False), min_size=1, max_size=5))
    def test_matches_direct_sums(self, roots):
        p = Polynomial.from_roots(roots)
        sums = newton_power_sums(p, 6)
        for k in range(7):
            assert sums[k] == pytest.approx(sum(r**k for r in roots), rel=1e-6, abs=1e-6)

    def test_requires_monic(self):
        with pytest.raises(DomainError):
            newton_power_sums(Polynomial((1.0, 2.0, 3.0)), 2)


class TestRealRoots:
    def test_simple_roots(self):
        roots = real_roots(Polynomial.from_roots([-1.0, 0.5, 2.0]))
        assert [r for r, _ in roots] == pytest.approx([-1.0, 0.5, 2.0], abs=1e-10)
        assert all(m == 1 for _, m in roots)

    def test_double_roots_cluster(self):
        roots = real_roots(Polynomial.from_roots([1.0, 1.0, -2.0, -2.0]))
        assert roots[0] == (pytest.approx(-2.0, abs=1e-8), 2)
        assert roots[1] == (pytest.approx(1.0, abs=1e-8), 2)

    def test_complex_pair_excluded(self):
        # (u^2 + 1)(u - 1): only the real root is reported
        p = Polynomial((1.0, 0.0, 1.0)) * Polynomial((-1.0, 1.0))
        roots = real_roots(p)
        assert len(roots) == 1
        assert roots[0][0] == pytest.approx(1.0, abs=1e-10)

    def test_companion_matrix(self):
        p = Polynomial((-2.0, 0.0, 1.0))  # u^2 - 2
        eigs = np.sort(np.linalg.eigvals(companion_matrix_of(p)).real)
        np.testing.assert_allclose(eigs, [-np.sqrt(2), np.sqrt(2)], atol=1e-12)

    def test_rejects_zero_polynomial(self):
        with pytest.raises(DomainError):
            real_roots(Polynomial((0.0,)))
