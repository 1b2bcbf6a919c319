import numpy as np
import pytest

from qbmm.closure import closure_coeffs_eqmom, companion_matrix
from qbmm.errors import DomainError, UnsupportedInputError
from qbmm.inversion import EqmomState, NodeSet, eqmom_forward
from qbmm.spectral import analyze_eqmom
from qbmm.stability import (
    MacroState,
    SourceModel,
    bgk_source,
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    diagonalizer,
    equilibrium_state,
    left_eigenmatrix,
    macro_from_moments,
    maxwellian_moments,
    shakhov_source,
    source_jacobian,
    stability_report,
    symmetrizer,
)


class TestMacro:
    def test_round_trip(self):
        mac = MacroState(1.3, -0.4, 0.8, 0.2)
        m = maxwellian_moments(1.3, -0.4, 0.8, 3)
        rec = macro_from_moments(m)
        assert (rec.rho, rec.U, rec.theta) == pytest.approx((1.3, -0.4, 0.8))
        assert rec.q == pytest.approx(0.0, abs=1e-14)

    def test_heat_flux_extraction(self):
        # adding 2q to M_3 shifts q by exactly q
        m = maxwellian_moments(1.0, 0.5, 0.7, 3)
        m[3] += 2 * 0.3
        assert macro_from_moments(m).q == pytest.approx(0.3)

    def test_rejects_invalid(self):
        with pytest.raises(DomainError):
            MacroState(-1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            macro_from_moments([1.0, 0.0, -1.0, 0.0])

    def test_source_model_validation(self):
        with pytest.raises(DomainError):
            SourceModel("esbgk")
        with pytest.raises(DomainError):
            SourceModel("shakhov", pr=0.0)


class TestSources:
    def test_bgk_vanishes_at_equilibrium(self):
        for n in (1, 2, 3, 4):
            st = equilibrium_state(1.3, 0.4, 0.8, n)
            m = eqmom_forward(st, 2 * n)
            assert np.linalg.norm(bgk_source(m)) < 1e-10

    def test_collision_invariants_always_zero(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        s = bgk_source(eqmom_forward(st, 4))
        np.testing.assert_array_equal(s[:3], 0.0)
        assert np.linalg.norm(s) > 0

    def test_shakhov_reduces_to_bgk_at_unit_prandtl(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        m = eqmom_forward(st, 4)
        np.testing.assert_allclose(shakhov_source(m, 1.0), bgk_source(m), atol=1e-14)

    def test_shakhov_heat_flux_correction(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        m = eqmom_forward(st, 4)
        mac = macro_from_moments(m)
        s = shakhov_source(m, 0.7)
        b = bgk_source(m)
        # j=3 correction is (1-Pr) * 2q
        assert s[3] - b[3] == pytest.approx((1 - 0.7) * 2 * mac.q)


class TestSourceJacobian:
    def test_bgk_finite_difference(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        m = eqmom_forward(st, 4)
        J = source_jacobian(m, SourceModel("bgk"))
        for j in range(5):
            h = 1e-6 * max(1.0, abs(m[j]))
            hi, lo = m.copy(), m.copy()
            hi[j] += h
            lo[j] -= h
            fd = (bgk_source(hi) - bgk_source(lo)) / (2 * h)
            np.testing.assert_allclose(J[:, j], fd, atol=1e-6)

    def test_shakhov_finite_difference_at_equilibrium(self):
        n, pr = 3, 2.0 / 3.0
        m = maxwellian_moments(1.3, 0.4, 0.8, 2 * n)
        J = source_jacobian(m, SourceModel("shakhov", pr=pr))
        for j in range(2 * n + 1):
            h = 1e-6 * max(1.0, abs(m[j]))
            hi, lo = m.copy(), m.copy()
            hi[j] += h
            lo[j] -= h
            fd = (shakhov_source(hi, pr) - shakhov_source(lo, pr)) / (2 * h)
            np.testing.assert_allclose(J[:, j], fd, atol=1e-5)

    def test_shakhov_off_equilibrium_unsupported(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        m = eqmom_forward(st, 4)
        with pytest.raises(UnsupportedInputError):
            source_jacobian(m, SourceModel("shakhov", pr=0.7))

    def test_diagonalizer_identity(self):
        for n in (2, 3, 4):
            m = maxwellian_moments(1.3, 0.4, 0.8, 2 * n)
            for model in (SourceModel("bgk"), SourceModel("shakhov", pr=0.3)):
                S = source_jacobian(m, model)
                P, D = diagonalizer(m, model)
                assert np.linalg.norm(P @ S - D @ P) < 1e-10
                diag = np.diag(D)
                np.testing.assert_array_equal(diag[:3], 0.0)
                if model.kind == "shakhov":
                    assert diag[3] == pytest.approx(-model.pr)


class TestLeftEigenmatrix:
    def test_rows_are_left_eigenvectors(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        L = left_eigenmatrix(st)
        A = companion_matrix(closure_coeffs_eqmom(st))
        lams = np.asarray(analyze_eqmom(st).eigenvalues)
        assert np.abs(L @ A - np.diag(lams) @ L).max() < 1e-10
        np.testing.assert_allclose(L[:, -1], 1.0)

    def test_symmetrizer_positive_definite(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        A0 = symmetrizer(st)
        np.testing.assert_allclose(A0, A0.T, atol=1e-12)
        assert np.linalg.eigvalsh(A0).min() > 0

    def test_symmetrizer_rejects_bad_lambda(self):
        st = EqmomState(NodeSet([0.4, 0.6], [-1.0, 1.5]), 0.3)
        with pytest.raises(DomainError):
            symmetrizer(st, [1.0, -1.0, 1.0, 1.0, 1.0])


class TestConditions:
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize(
        "model",
        [SourceModel("bgk"), SourceModel("shakhov", pr=0.3), SourceModel("shakhov", pr=2 / 3)],
    )
    def test_all_conditions_pass_at_equilibrium(self, n, model):
        rep = stability_report(1.2, -0.3, 0.6, n, model)
        assert rep.cond_i.passed
        assert rep.cond_ii.passed
        assert rep.cond_iii.passed
        assert rep.passed
        assert rep.cond_iii.details["epsilon"] is not None

    def test_condition_details(self):
        m = maxwellian_moments(1.0, 0.0, 1.0, 4)
        model = SourceModel("bgk")
        rep_i = check_condition_i(m, model)
        assert rep_i.details["relative_residual"] < 1e-12
        rep_ii = check_condition_ii(equilibrium_state(1.0, 0.0, 1.0, 2))
        assert rep_ii.details["min_eig_A0"] > 0
        rep_iii = check_condition_iii(m, model)
        assert rep_iii.details["off_block_norm"] < 1e-8 * rep_iii.details["k_norm"]

    def test_shakhov_pr1_matches_bgk(self):
        a = stability_report(1.0, 0.2, 0.7, 3, SourceModel("shakhov", pr=1.0))
        b = stability_report(1.0, 0.2, 0.7, 3, SourceModel("bgk"))
        assert a.cond_i.details == b.cond_i.details
        assert a.cond_iii.details == b.cond_iii.details
