import numpy as np
import pytest

from qbmm.closure import (
    char_poly_eqmom,
    char_poly_qmom,
    closed_moment_eqmom,
    closed_moment_qmom,
    closure_coeffs_eqmom,
    closure_coeffs_qmom,
    companion_matrix,
    g_polynomial,
    u_tilde,
)
from qbmm.inversion import EqmomState, NodeSet, eqmom_forward, eqmom_invert
from qbmm.polykit import Polynomial, gaussian_moment, smooth
from helpers import random_interior_state


class TestUtilde:
    def test_single_node(self):
        assert u_tilde(NodeSet([1.0], [0.4])) == 0.4

    def test_two_nodes_hand_value(self):
        # num = w1 u1 (u2-u1)^2 + w2 u2 (u1-u2)^2, den = (w1+w2)(u2-u1)^2
        ns = NodeSet([0.3, 0.7], [-0.5, 2.0])
        expect = (0.3 * -0.5 + 0.7 * 2.0) / 1.0
        assert u_tilde(ns) == pytest.approx(expect)

    def test_coincident_nodes_collapse_to_center(self):
        assert u_tilde(NodeSet([0.5, 0.5], [0.3, 0.3])) == 0.3


class TestGFactorization:
    def test_equilibrium_collapses(self):
        state = EqmomState(NodeSet([0.5, 0.5], [0.2, 0.2]), 0.7)
        g = g_polynomial(state)
        expect = Polynomial.from_roots([0.2] * 5)
        np.testing.assert_allclose(g.coeffs, expect.coeffs, atol=1e-12)

    def test_g_is_smoothed_char_poly(self):
        rng = np.random.default_rng(2)
        for n in (1, 2, 3):
            st = random_interior_state(rng, n)
            g = g_polynomial(st)
            c = char_poly_eqmom(st)
            back = smooth(c, st.sigma2)
            for a, b in zip(back.coeffs, g.coeffs):
                assert a == pytest.approx(b, rel=1e-9, abs=1e-9)

    def test_g_independent_of_variance(self):
        # same nodes, different shared variance: the smoothed characteristic
        # polynomial is the same object
        ns = NodeSet([0.4, 0.6], [-1.0, 1.5])
        g1 = smooth(char_poly_eqmom(EqmomState(ns, 0.2)), 0.2)
        g2 = smooth(char_poly_eqmom(EqmomState(ns, 1.1)), 1.1)
        for a, b in zip(g1.coeffs, g2.coeffs):
            assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


class TestEqmomClosure:
    def test_single_node_char_poly(self):
        # N=1, u=0, sigma2=1: characteristic polynomial u^3 - 3u
        state = EqmomState(NodeSet([1.0], [0.0]), 1.0)
        c = char_poly_eqmom(state)
        np.testing.assert_allclose(c.coeffs, [0.0, -3.0, 0.0, 1.0], atol=1e-12)
        a = closure_coeffs_eqmom(state).a
        np.testing.assert_allclose(a, [0.0, 3.0, 0.0], atol=1e-12)

    def test_closed_moment_matches_forward(self):
        rng = np.random.default_rng(4)
        for n in (1, 2, 3):
            st = random_interior_state(rng, n)
            expect = eqmom_forward(st, 2 * n + 1)[-1]
            assert closed_moment_eqmom(st) == pytest.approx(expect, rel=1e-12)

    def test_closure_is_linear_in_moments(self):
        # The closed moment equals a . (M_0..M_2N): the coefficients are
        # exactly the gradient of the closure function.
        rng = np.random.default_rng(6)
        for n in (1, 2, 3):
            st = random_interior_state(rng, n)
            m = eqmom_forward(st, 2 * n)
            a = np.asarray(closure_coeffs_eqmom(st).a)
            assert a @ m == pytest.approx(closed_moment_eqmom(st), rel=1e-9)

    def test_closure_gradient_finite_difference(self):
        # perturb each moment, re-invert, and compare the change in the
        # closed moment against the closure coefficient
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        m = eqmom_forward(st, 4)
        a = np.asarray(closure_coeffs_eqmom(st).a)
        h = 1e-7
        for j in range(5):
            hi, lo = m.copy(), m.copy()
            hi[j] += h
            lo[j] -= h
            fd = (closed_moment_eqmom(eqmom_invert(hi)) - closed_moment_eqmom(eqmom_invert(lo))) / (2 * h)
            assert fd == pytest.approx(a[j], rel=1e-5, abs=1e-5)


class TestQmomClosure:
    def test_char_poly_squares_nodes(self):
        ns = NodeSet([0.5, 0.5], [-1.0, 1.0])
        c = char_poly_qmom(ns)
        np.testing.assert_allclose(c.coeffs, [1.0, 0.0, -2.0, 0.0, 1.0], atol=1e-12)

    def test_closed_moment_is_power_sum(self):
        ns = NodeSet([0.4, 0.6], [-1.0, 2.0])
        assert closed_moment_qmom(ns) == pytest.approx(0.4 * 1.0 + 0.6 * 16.0)

    def test_closure_linear_identity(self):
        rng = np.random.default_rng(8)
        for n in (1, 2, 3):
            ns = random_interior_state(rng, n).nodes
            from qbmm.inversion import qmom_forward

            m = qmom_forward(ns, 2 * n - 1)
            a = np.asarray(closure_coeffs_qmom(ns).a)
            assert a @ m == pytest.approx(closed_moment_qmom(ns), rel=1e-9)


class TestCompanionMatrix:
    def test_char_poly_consistency(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        coeffs = closure_coeffs_eqmom(st)
        A = companion_matrix(coeffs)
        c = coeffs.characteristic_polynomial()
        eigs = np.sort(np.linalg.eigvals(A).real)
        for lam in eigs:
            assert abs(c(lam)) < 1e-8 * (1 + abs(lam)) ** c.degree

    def test_moment_system_structure(self):
        A = companion_matrix(closure_coeffs_qmom(NodeSet([0.5, 0.5], [-1.0, 1.0])))
        assert A.shape == (4, 4)
        np.testing.assert_array_equal(A[0, :], [0, 1, 0, 0])
        np.testing.assert_allclose(A[-1, :], [-1.0, 0.0, 2.0, 0.0], atol=1e-12)
