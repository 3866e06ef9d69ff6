import numpy as np
import pytest

from solwave.asymptotics import seed_alpha, seed_profile
from solwave.strip_harmonics import ModeBasis, SurfaceTrace, dtn_symbol
from solwave.wave_operator import (
    Parameters,
    ReducedState,
    complementing_identity,
    eliminate_w2,
    is_admissible,
    jacobian,
    lopatinskii_constant,
    lopatinskii_interior_samples,
    monitor,
    residual,
)

BASIS = ModeBasis(12.0, 12)


def make_state(coeffs, gamma, alpha, basis=BASIS):
    return ReducedState(SurfaceTrace(coeffs), Parameters(gamma, alpha), basis)


def trivial(gamma, alpha, basis=BASIS):
    return make_state(np.zeros(basis.N + 1), gamma, alpha, basis)


def random_admissible(rng, basis=BASIS):
    gamma = rng.uniform(-2.0, 0.9)
    alpha = rng.uniform(0.1, (1.0 - gamma) - 0.05)
    a = 0.02 * rng.standard_normal(basis.N + 1) / (1.0 + np.arange(basis.N + 1))
    st = make_state(a, gamma, alpha, basis)
    assert is_admissible(st)
    return st


class TestEliminateW2:
    def test_trivial_maps_to_trivial(self):
        out = eliminate_w2(SurfaceTrace(np.zeros(13)), -1.0, BASIS)
        assert np.all(out.coeffs == 0.0)

    def test_irrotational_always_zero(self):
        rng = np.random.default_rng(1)
        t = SurfaceTrace(rng.standard_normal(13) * 0.1)
        out = eliminate_w2(t, 0.0, BASIS)
        assert np.all(out.coeffs == 0.0)

    def test_constant_trace(self):
        # -gamma*c - gamma*c^2/2 with gamma = -1: c + c^2/2
        c = 0.3
        t = SurfaceTrace(np.r_[c, np.zeros(12)])
        out = eliminate_w2(t, -1.0, BASIS)
        assert out.coeffs[0] == pytest.approx(c + 0.5 * c * c, abs=1e-15)
        assert np.max(np.abs(out.coeffs[1:])) < 1e-15


class TestResidual:
    @pytest.mark.parametrize("gamma,alpha", [(-1.0, 0.5), (0.0, 0.7), (0.4, 0.3),
                                             (-2.5, 3.0)])
    def test_laminar_family_is_exact(self, gamma, alpha):
        assert np.max(np.abs(residual(trivial(gamma, alpha)))) == 0.0

    def test_seed_residual_is_second_order(self):
        b = ModeBasis(96.0, 128)
        for eps in (0.01, 0.02):
            st = ReducedState(seed_profile(-1.0, eps, b),
                              Parameters(-1.0, seed_alpha(-1.0, eps)), b)
            sup = np.max(np.abs(residual(st)))
            assert sup < 10.0 * eps ** 2

    def test_single_mode_linearization(self):
        # gamma = 0, one small mode with k = 1: the residual linearizes to
        # -2*delta*(k coth k - alpha - gamma)*cos(x)
        b = ModeBasis(np.pi, 8)
        delta, alpha = 1e-7, 0.5
        a = np.zeros(9)
        a[1] = delta
        st = make_state(a, 0.0, alpha, b)
        r = residual(st)
        expected = -2.0 * delta * (dtn_symbol(1.0) - alpha) * np.cos(b.nodes)
        assert np.max(np.abs(r - expected)) < 1e-12


class TestJacobian:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(42)
        h = 1e-6
        for _ in range(20):
            st = random_admissible(rng)
            J, dr_da = jacobian(st)
            scale = max(1.0, np.max(np.abs(J)))
            for j in range(BASIS.N + 1):
                e = np.zeros(BASIS.N + 1)
                e[j] = h
                fd = (residual(st.with_coeffs(st.w1.coeffs + e))
                      - residual(st.with_coeffs(st.w1.coeffs - e))) / (2 * h)
                assert np.max(np.abs(fd - J[:, j])) <= 1e-6 * scale
            fd_a = (residual(st.with_alpha(st.params.alpha + h))
                    - residual(st.with_alpha(st.params.alpha - h))) / (2 * h)
            assert np.max(np.abs(fd_a - dr_da)) <= 1e-6 * scale

    def test_alpha_derivative_vanishes_at_trivial(self):
        _, dr_da = jacobian(trivial(-0.7, 0.9))
        assert np.all(dr_da == 0.0)

    def test_trivial_state_is_diagonal_with_dispersion_symbol(self):
        gamma, alpha = -0.3, 0.6
        st = trivial(gamma, alpha)
        J, _ = jacobian(st)
        Jm = BASIS.project @ J
        sym = 2.0 * (gamma + alpha - BASIS.symbols)
        assert np.max(np.abs(np.diag(Jm) - sym)) < 1e-13
        off = Jm - np.diag(np.diag(Jm))
        assert np.max(np.abs(off)) < 1e-13

    def test_trivial_invertible_iff_subcritical(self):
        # gamma + alpha < 1: the mode symbols stay away from zero
        gamma = -0.5
        st = trivial(gamma, 0.9)
        J, _ = jacobian(st)
        d = np.abs(np.diag(BASIS.project @ J))
        assert np.min(d) >= 2.0 * (1.0 - (gamma + 0.9)) - 1e-12
        # placing gamma + alpha exactly on a discrete symbol kills that mode
        alpha_res = float(BASIS.symbols[5]) - gamma
        J, _ = jacobian(trivial(gamma, alpha_res))
        d = np.diag(BASIS.project @ J)
        assert abs(d[5]) < 1e-13
        assert np.min(np.abs(np.delete(d, 5))) > 1e-3


class TestLopatinskii:
    def test_trivial_value(self):
        assert lopatinskii_constant(trivial(-1.0, 0.5)) == pytest.approx(4.0, abs=1e-14)

    def test_constant_trace(self):
        c, alpha = 0.2, 0.8
        st = make_state(np.r_[c, np.zeros(12)], -1.0, alpha)
        expect = 4.0 * (1.0 - 2.0 * alpha * c) ** 2 * (1.0 + c) ** 2
        assert lopatinskii_constant(st) == pytest.approx(expect, rel=1e-13)

    def test_near_stagnation(self):
        alpha = 0.5
        c = (1.0 - 1e-3) / (2.0 * alpha)
        st = make_state(np.r_[c, np.zeros(12)], -1.0, alpha)
        expect = 4.0 * 1e-6 * (1.0 + c) ** 2
        assert lopatinskii_constant(st) == pytest.approx(expect, rel=1e-9)

    def test_interior_samples_consistent_at_trivial(self):
        st = trivial(0.0, 0.5)
        assert lopatinskii_interior_samples(st) == pytest.approx(4.0, abs=1e-12)


class TestComplementingIdentity:
    def test_trivial_exact(self):
        assert complementing_identity(trivial(-1.0, 0.5)) == pytest.approx(0.0, abs=1e-15)

    def test_random_nonsolution_is_nonzero(self):
        rng = np.random.default_rng(8)
        a = 0.05 * rng.standard_normal(13) / (1.0 + np.arange(13))
        st = make_state(a, -1.0, 0.5)
        assert np.max(np.abs(residual(st))) > 1e-6  # genuinely not a solution
        assert complementing_identity(st) > 1e-8

    def test_converged_point(self):
        b = ModeBasis(96.0, 128)
        from solwave.continuation import NewtonSettings, newton_solve
        eps = 0.05
        st = ReducedState(seed_profile(-1.0, eps, b),
                          Parameters(-1.0, seed_alpha(-1.0, eps)), b)
        sol, _ = newton_solve(st, NewtonSettings())
        assert complementing_identity(sol) <= 1e-10


class TestMonitor:
    def test_trivial(self):
        m = monitor(trivial(-1.0, 0.25))
        assert (m.m1, m.m2) == (1.0, 1.0)
        assert m.m3 == pytest.approx(0.5)        # 1/F with F = 2
        assert m.m1_kind == "crest"

    def test_near_stagnation_crest(self):
        alpha = 0.7
        c = 1.0 / (2.0 * alpha) - 1e-4
        st = make_state(np.r_[c, np.zeros(12)], -1.0, alpha)
        m = monitor(st)
        assert m.m1 == pytest.approx(2.0 * alpha * 1e-4, rel=1e-8)

    def test_positive_vorticity_reports_gradient(self):
        m = monitor(trivial(0.5, 0.3))
        assert m.m1_kind == "gradient"
        assert m.m1 == pytest.approx(1.0)  # laminar flow has |grad eta| = 1

    def test_monitor_stable_under_refinement(self):
        from solwave.continuation import NewtonSettings, newton_solve
        eps = 0.04
        vals = []
        for L, N in ((96.0, 128), (96.0, 256), (192.0, 256)):
            b = ModeBasis(L, N)
            st = ReducedState(seed_profile(-1.0, eps, b),
                              Parameters(-1.0, seed_alpha(-1.0, eps)), b)
            sol, _ = newton_solve(st, NewtonSettings())
            vals.append(monitor(sol))
        for other in vals[1:]:
            assert abs(other.m1 - vals[0].m1) < 1e-6
            assert abs(other.m2 - vals[0].m2) < 1e-6
            assert abs(other.m3 - vals[0].m3) < 1e-12
