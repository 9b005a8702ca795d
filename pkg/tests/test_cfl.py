import math

import numpy as np
import pytest

from rkctl.cfl import (BracketError, MeshLimitProvider, ZeroWaveSpeedError,
                       bisect_max_cfl, cfl_dt, local_dx_over_lambda, mesh_limit)
from rkctl.dgsem import build_problem
from rkctl.integrator import rk_step
from rkctl.tableaux import builtin, stability_boundary_real_axis


def affine_1d_provider(h=0.25, p=3, n=4):
    return MeshLimitProvider(jacobian=np.full(n, h / 2),
                             contravariant=np.ones((1, n, 1)),
                             degree=p, dim=1)


def cartesian_2d_provider(h=0.25, p=3, n=4):
    contr = np.zeros((2, n, 2))
    contr[0, :, 0] = h / 2
    contr[1, :, 1] = h / 2
    return MeshLimitProvider(jacobian=np.full(n, h * h / 4),
                             contravariant=contr, degree=p, dim=2)


class TestLocalDxOverLambda:
    def test_1d_affine_formula(self):
        # (2/(p+1)) (h/2) / |a| with J dxi/dx = 1: h/4 for p=3, a=1
        h = 0.6
        mlp = affine_1d_provider(h=h)
        assert local_dx_over_lambda(0, np.array([1.0]), mlp) == pytest.approx(h / 4, rel=1e-14)

    def test_doubling_speed_halves_result(self):
        mlp = affine_1d_provider()
        r1 = local_dx_over_lambda(1, np.array([1.0]), mlp)
        r2 = local_dx_over_lambda(1, np.array([2.0]), mlp)
        assert r2 == pytest.approx(r1 / 2, rel=1e-14)

    def test_2d_diagonal_advection(self):
        # square of side h, a = (1,1)/sqrt(2), p = 3: h sqrt(2)/8
        h = 0.25
        mlp = cartesian_2d_provider(h=h)
        a = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert local_dx_over_lambda(0, a, mlp) == pytest.approx(h * math.sqrt(2) / 8,
                                                               rel=1e-13)

    def test_stationary_wave_speed(self):
        mlp = affine_1d_provider()
        with pytest.raises(ZeroWaveSpeedError):
            local_dx_over_lambda(0, np.array([0.0]), mlp)


class TestCflDt:
    def test_frozen_advection_constant(self):
        prob = build_problem("advection1d", elements=16, degree=3)
        dt1 = cfl_dt(0.5, prob.u0, prob.mlp, prob.wavespeed)
        dt2 = cfl_dt(0.5, 10.0 * prob.u0 + 3.0, prob.mlp, prob.wavespeed)
        assert dt1 == dt2

    def test_euler_uniform_closed_form(self):
        # uniform (rho, v, p): lambda = |v| + sqrt(gamma p / rho) everywhere
        prob = build_problem("euler1d", elements=8, degree=3, ic="free_stream")
        gamma = 1.4
        lam = 0.0 + math.sqrt(gamma * 1.0 / 1.0)
        h = 1.0 / 8
        expected = 0.9 * (2.0 / 4) * (h / 2) / lam
        assert cfl_dt(0.9, prob.u0, prob.mlp, prob.wavespeed) == pytest.approx(
            expected, rel=1e-12)

    def test_wave_speed_homogeneity(self):
        prob = build_problem("advection1d", elements=8, degree=3, velocity=1.0)
        base = mesh_limit(prob.u0, prob.mlp, prob.wavespeed)
        scaled = mesh_limit(prob.u0, prob.mlp, lambda u: 4.0 * prob.wavespeed(u))
        assert scaled == pytest.approx(base / 4.0, rel=1e-14)

    def test_refinement_halves_dt(self):
        p1 = build_problem("advection1d", elements=8, degree=3)
        p2 = build_problem("advection1d", elements=16, degree=3)
        dt1 = cfl_dt(1.0, p1.u0, p1.mlp, p1.wavespeed)
        dt2 = cfl_dt(1.0, p2.u0, p2.mlp, p2.wavespeed)
        assert dt2 == pytest.approx(dt1 / 2, rel=1e-13)

    def test_nu_must_be_positive(self):
        prob = build_problem("advection1d", elements=4, degree=2)
        with pytest.raises(ValueError):
            cfl_dt(0.0, prob.u0, prob.mlp, prob.wavespeed)


class TestBisectMaxCfl:
    def test_threshold_function(self):
        runner = lambda nu: nu <= 1.372
        nu = bisect_max_cfl(runner, 0.5, 4.0)
        assert 0.5 <= nu <= 4.0
        assert nu <= 1.372 < nu * 1.005

    def test_bracket_errors(self):
        with pytest.raises(BracketError):
            bisect_max_cfl(lambda nu: False, 0.5, 4.0)
        with pytest.raises(BracketError):
            bisect_max_cfl(lambda nu: True, 0.5, 4.0)
        with pytest.raises(BracketError):
            bisect_max_cfl(lambda nu: nu < 1.0, 2.0, 1.0)

    def test_deterministic(self):
        runner = lambda nu: nu * nu < 2.0
        assert bisect_max_cfl(runner, 1.0, 2.0) == bisect_max_cfl(runner, 1.0, 2.0)

    def test_dahlquist_proxy_recovers_stability_boundary(self):
        # u' = -u stepped at dt = nu: stable iff |R(-nu)| <= 1; the bisected
        # value must match the real-axis boundary 2.5127 to +-0.003
        tab = builtin("BS3_3F")
        exact = stability_boundary_real_axis(tab)

        def runner(nu):
            u = np.array([1.0])
            cache = None
            for _ in range(5000):
                res = rk_step(tab, lambda t, x: -x, 0.0, u, nu, fsal_cache=cache)
                u, cache = res.u_next, res.k_last
                if abs(u[0]) > 1e6:
                    return False
            return True

        nu = bisect_max_cfl(runner, 1.0, 4.0)
        assert nu == pytest.approx(exact, abs=3e-3)


def test_mesh_limit_provider_validation():
    with pytest.raises(ValueError):
        MeshLimitProvider(jacobian=np.array([-1.0]),
                          contravariant=np.ones((1, 1, 1)), degree=3, dim=1)
    with pytest.raises(ValueError):
        MeshLimitProvider(jacobian=np.ones(4), contravariant=np.ones((1, 4, 1)),
                          degree=3, dim=3)
