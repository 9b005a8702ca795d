import math

import numpy as np
import pytest

from rkctl.dgsem import build_problem
from rkctl.spectra import (NotLinearError, assemble_operator, eigenvalues, flat_rhs,
                           max_embedding_scale, out_of_region, pair_conjugates,
                           stability_region_boundary, verify_eigen_residuals)
from rkctl.tableaux import builtin, stability_boundary_real_axis


class TestAssembleOperator:
    def test_negative_identity(self):
        m = assemble_operator(lambda u: -u, 5)
        assert np.array_equal(m, -np.eye(5))

    def test_upwind_fv_circulant(self):
        # 1D upwind FV advection, 4 cells, h=1, a=1: du_i/dt = (u_{i-1}-u_i)/h;
        # eigenvalues are exp(-2 pi i k/4) - 1
        def rhs(u):
            return np.roll(u, 1) - u

        m = assemble_operator(rhs, 4)
        lams = eigenvalues(m)
        expected = np.exp(-2j * math.pi * np.arange(4) / 4) - 1.0
        for mu in expected:
            assert np.min(np.abs(lams - mu)) < 1e-12

    def test_trace_equals_eigenvalue_sum(self):
        prob = build_problem("advection1d", elements=8, degree=3)
        m = assemble_operator(flat_rhs(prob.rhs, prob.u0.shape), prob.u0.size)
        lams = eigenvalues(m)
        assert np.trace(m) == pytest.approx(lams.sum().real, abs=1e-8)
        assert abs(lams.sum().imag) < 1e-8

    def test_nonlinear_rhs_rejected(self):
        with pytest.raises(NotLinearError):
            assemble_operator(lambda u: u * u, 4)


class TestEigenvalues:
    def test_diagonal(self):
        lams = np.sort(eigenvalues(np.diag([1.0, 2.0, 3.0])).real)
        assert np.allclose(lams, [1, 2, 3], atol=1e-13)

    def test_rotation(self):
        lams = np.sort_complex(eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]])))
        assert np.allclose(lams, [-1j, 1j], atol=1e-14)

    def test_companion_cubic(self):
        # lam^3 - 2 lam^2 - lam + 2 = (lam-1)(lam+1)(lam-2); pad with root 5
        comp = np.array([[2.0, 1.0, -2.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        m = np.zeros((4, 4))
        m[:3, :3] = comp
        m[3, 3] = 5.0
        lams = np.sort(eigenvalues(m).real)
        assert np.allclose(lams, [-1.0, 1.0, 2.0, 5.0], atol=1e-10)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            eigenvalues(np.zeros((5000, 5000)))

    def test_residual_contract_on_dg_operator(self):
        prob = build_problem("advection1d", elements=8, degree=3)
        m = assemble_operator(flat_rhs(prob.rhs, prob.u0.shape), prob.u0.size)
        lams = eigenvalues(m)
        assert verify_eigen_residuals(m, lams, n_checks=10, rng=0) <= 1e-8

    def test_conjugate_pairing_real_operator(self):
        prob = build_problem("blended_advection", elements=12, degree=3, alpha=0.5)
        m = assemble_operator(flat_rhs(prob.rhs, prob.u0.shape), prob.u0.size)
        assert pair_conjugates(eigenvalues(m), tol=1e-8)


class TestMaxEmbeddingScale:
    def test_single_real_eigenvalue(self):
        # spectrum {-1}: sigma* is the real-axis boundary of R
        tab = builtin("BS3_3F")
        sigma = max_embedding_scale(np.array([-1.0 + 0j]), tab)
        assert sigma == pytest.approx(stability_boundary_real_axis(tab), rel=2e-4)

    def test_scaling_halves(self):
        tab = builtin("BS3_3F")
        s1 = max_embedding_scale(np.array([-1.0 + 0j]), tab)
        s2 = max_embedding_scale(np.array([-1.0 + 0j, -2.0 + 0j]), tab)
        assert s2 == pytest.approx(s1 / 2, rel=3e-4)

    def test_monotone_under_spectrum_growth(self):
        tab = builtin("SSP3_4")
        rng = np.random.default_rng(7)
        base = -(0.1 + rng.random(6)) + 1j * rng.standard_normal(6)
        extra = np.concatenate([base, [-3.0 + 2.0j]])
        assert max_embedding_scale(extra, tab) <= max_embedding_scale(base, tab) * (1 + 1e-3)

    def test_positive_real_part_rejected(self):
        tab = builtin("BS3_3F")
        with pytest.raises(ValueError):
            max_embedding_scale(np.array([0.1 + 1j]), tab)

    def test_alpha_zero_run_has_no_outliers_at_reduced_scale(self):
        prob = build_problem("blended_advection", elements=12, degree=3, alpha=0.0)
        m = assemble_operator(flat_rhs(prob.rhs, prob.u0.shape), prob.u0.size)
        lams = eigenvalues(m)
        tab = builtin("BS3_3F")
        sigma = max_embedding_scale(lams, tab)
        assert len(out_of_region(lams, tab, sigma * (1.0 - 1e-4))) == 0


class TestStabilityRegionBoundary:
    def test_boundary_points_on_level_set(self):
        tab = builtin("BS3_3F")
        pts = stability_region_boundary(tab, resolution=200)
        assert len(pts) > 100
        from rkctl.tableaux import stability_function
        vals = [abs(stability_function(tab, complex(re, im))) for re, im in pts[::25]]
        assert max(abs(v - 1.0) for v in vals) < 0.05

    def test_real_axis_crossing_matches_boundary(self):
        tab = builtin("BS3_3F")
        pts = stability_region_boundary(tab, resolution=600)
        near_axis = pts[np.abs(pts[:, 1]) < 0.05]
        left = near_axis[:, 0].min()
        assert left == pytest.approx(-stability_boundary_real_axis(tab), abs=0.05)

    def test_scaling_applied(self):
        tab = builtin("SSP3_4")
        pts1 = stability_region_boundary(tab, scale=1.0, resolution=150)
        pts4 = stability_region_boundary(tab, scale=0.25, resolution=150)
        assert np.allclose(pts4, 0.25 * pts1, atol=1e-12)
