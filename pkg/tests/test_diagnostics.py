import mpmath as mp
import numpy as np
import pytest

from solwave.asymptotics import seed_alpha, seed_profile
from solwave.continuation import NewtonSettings, newton_solve
from solwave.diagnostics import (
    DegenerateConjugateFlowError,
    conjugate_depth,
    d_critical,
    default_stations,
    diagnostics_report,
    flow_force,
    flow_force_spread,
    integral_identity_check,
    integral_identity_terms,
    phi_flux,
    phi_surface_check,
    psi_bound_check,
    psi_surface_derivative,
    qhat,
    reconstruct_surface,
    shat,
    stagnation_scan,
    surface_xi,
    velocity,
)
from solwave.strip_harmonics import ModeBasis, SurfaceTrace, evaluate_gradient_interior
from solwave.wave_operator import Parameters, ReducedState


@pytest.fixture(scope="module")
def converged_wave():
    """Converged gamma = -1 wave at eps = 0.05."""
    b = ModeBasis(96.0, 128)
    eps, gamma = 0.05, -1.0
    st = ReducedState(seed_profile(gamma, eps, b),
                      Parameters(gamma, seed_alpha(gamma, eps)), b)
    sol, _ = newton_solve(st, NewtonSettings())
    return sol


def trivial_state(gamma, alpha, basis=None):
    basis = basis or ModeBasis(48.0, 64)
    return ReducedState(SurfaceTrace(np.zeros(basis.N + 1)),
                        Parameters(gamma, alpha), basis)


class TestFlowForce:
    def test_trivial_closed_form(self):
        st = trivial_state(0.0, 0.5)
        assert flow_force(st, 3.0) == pytest.approx(1.25, abs=1e-12)

    def test_trivial_matches_shat_of_unit_depth(self):
        rng = np.random.default_rng(2)
        for _ in range(8):
            gamma = rng.uniform(-2.0, 0.9)
            alpha = rng.uniform(0.05, 1.0 - gamma)
            st = trivial_state(gamma, alpha)
            s_quad = flow_force(st, rng.uniform(0.0, st.basis.L))
            assert s_quad == pytest.approx(shat(1.0, st.params), abs=1e-12)

    def test_spread_tiny_on_converged_wave(self, converged_wave):
        vals, spread = flow_force_spread(converged_wave)
        assert spread <= 1e-8 * abs(np.mean(vals))

    def test_station_set(self):
        b = ModeBasis(64.0, 16)
        st = default_stations(b)
        assert len(st) == 9
        assert st[0] == 0.0 and st[-1] == b.L


class TestConjugateFlows:
    def test_qhat_normalized_at_unit_depth(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = Parameters(rng.uniform(-3.0, 1.5), rng.uniform(0.05, 3.0))
            assert qhat(1.0, p) == pytest.approx(1.0, abs=1e-14)

    def test_qhat_convex(self):
        p = Parameters(-1.0, 0.5)
        d = np.linspace(0.2, 5.0, 400)
        q = np.array([qhat(x, p) for x in d])
        assert np.all(np.diff(q, 2) >= 0.0)

    def test_shat_derivative_identity(self):
        # shat'(d) = (qhat(1) - qhat(d))/2 at h = 1e-5; the 1/d term makes
        # shat''' ~ 1e4 near d = 0.2, so a fourth-order stencil is needed to
        # hold the 1e-8 tolerance
        h = 1e-5
        for gamma, alpha in ((-1.0, 0.5), (0.0, 0.3), (0.5, 0.2), (-2.0, 1.7)):
            p = Parameters(gamma, alpha)
            for d in np.linspace(0.2, 5.0, 25):
                fd = (shat(d - 2 * h, p) - 8.0 * shat(d - h, p)
                      + 8.0 * shat(d + h, p) - shat(d + 2 * h, p)) / (12.0 * h)
                assert abs(fd - 0.5 * (qhat(1.0, p) - qhat(d, p))) <= 1e-8

    def test_conjugate_depth_irrotational(self):
        # gamma = 0, alpha = 0.3: qhat(d) = qhat(1) reduces to
        # 0.6 d^2 - d - 1 = 0 after factoring out (d - 1)
        p = Parameters(0.0, 0.3)
        dstar = conjugate_depth(p)
        assert dstar == pytest.approx((1.0 + np.sqrt(3.4)) / 1.2, rel=1e-12)
        assert abs(0.6 * dstar ** 2 - dstar - 1.0) < 1e-12

    def test_conjugate_depth_above_critical_region(self):
        # d_* stays beyond d_cr for any subcritical alpha, even close to it
        p = Parameters(0.0, 0.999)
        assert conjugate_depth(p) > d_critical(p)

    def test_flow_force_inequality_subcritical(self):
        p = Parameters(-1.0, 0.5)
        dstar = conjugate_depth(p)
        assert shat(dstar, p) > shat(1.0, p)

    def test_degenerate_at_critical(self):
        with pytest.raises(DegenerateConjugateFlowError):
            conjugate_depth(Parameters(-1.0, 2.0))

    def test_no_simultaneous_conjugate_root(self):
        # bores need qhat(d) = qhat(1) AND shat(d) = shat(1) at some d != 1;
        # scan a depth grid for 20 random subcritical parameter pairs
        rng = np.random.default_rng(77)
        d_grid = np.linspace(0.2, 5.0, 961)
        d_grid = d_grid[np.abs(d_grid - 1.0) > 1e-3]
        for _ in range(20):
            gamma = rng.uniform(-2.0, 0.9)
            alpha = rng.uniform(0.05, (1.0 - gamma) - 0.05)
            p = Parameters(gamma, alpha)
            q1, s1 = qhat(1.0, p), shat(1.0, p)
            for d in d_grid:
                both = (abs(qhat(d, p) - q1) < 1e-8
                        and abs(shat(d, p) - s1) < 1e-8)
                assert not both


class TestPhiIdentity:
    def test_trivial_integrand_cancels(self):
        st = trivial_state(-0.7, 0.4)
        assert phi_flux(st, 5.0, 1.0) == pytest.approx(0.0, abs=1e-14)
        assert phi_surface_check(st) < 1e-13

    def test_vanishes_on_bed_by_construction(self):
        st = trivial_state(-1.0, 0.5)
        assert phi_flux(st, 2.0, 0.0) == 0.0

    def test_converged_wave_residual(self, converged_wave):
        assert phi_surface_check(converged_wave) <= 1e-7


class TestIntegralIdentity:
    def test_trivial(self):
        st = trivial_state(-1.0, 0.5)
        assert integral_identity_check(st) == pytest.approx(0.0, abs=1e-15)

    def test_converged_wave(self, converged_wave):
        assert integral_identity_check(converged_wave) <= 1e-6

    def test_all_integrals_positive_on_elevation_wave(self, converged_wave):
        lhs, rhs, integrals = integral_identity_terms(converged_wave)
        assert all(v > 0.0 for v in integrals)
        assert lhs > 0.0


class TestVelocity:
    def test_trivial_profile(self):
        gamma = -0.8
        st = trivial_state(gamma, 0.5)
        ys = np.linspace(0.0, 1.0, 9)
        u, v = velocity(st, np.full_like(ys, 2.0), ys)
        assert np.allclose(u, (1.0 - gamma) + gamma * ys, atol=1e-13)
        assert np.allclose(v, 0.0, atol=1e-14)

    def test_vertical_velocity_odd_in_x(self, converged_wave):
        ys = np.linspace(0.1, 1.0, 7)
        _, v0 = velocity(converged_wave, np.zeros_like(ys), ys)
        assert np.max(np.abs(v0)) < 1e-10  # v(0, y) = 0 by evenness
        up, vp = velocity(converged_wave, np.full_like(ys, 3.0), ys)
        um, vm = velocity(converged_wave, np.full_like(ys, -3.0), ys)
        assert np.allclose(vp, -vm, atol=1e-12)
        assert np.allclose(up, um, atol=1e-12)

    def test_dynamic_condition_on_surface(self, converged_wave):
        st = converged_wave
        xs = st.basis.nodes
        u, v = velocity(st, xs, np.ones_like(xs))
        eta = 1.0 + st.basis.values(st.w1.coeffs)
        res = u * u + v * v + 2.0 * st.params.alpha * (eta - 1.0) - 1.0
        assert np.max(np.abs(res)) <= 10.0 * 1e-10

    def test_kinematic_condition_on_surface(self, converged_wave):
        st = converged_wave
        xs = st.basis.nodes
        u, v = velocity(st, xs, np.ones_like(xs))
        wx, wy = evaluate_gradient_interior(st.w1, st.basis, xs, np.ones_like(xs))
        res = u * wx - v * (1.0 + wy)
        assert np.max(np.abs(res)) <= 10.0 * 1e-10


class TestStagnationScan:
    def test_no_critical_layer_for_moderate_negative_vorticity(self):
        # u = (1-gamma) + gamma*y vanishes at y = 1 - 1/gamma, outside the
        # strip for gamma = -2
        scan = stagnation_scan(trivial_state(-2.0, 0.5))
        assert scan.critical_layer_crossings == []
        assert scan.stagnation_points == []

    def test_min_speed_on_trivial_flow(self):
        scan = stagnation_scan(trivial_state(-0.5, 0.5))
        # speed falls from 1.5 at the bed to 1 at the surface
        assert scan.min_speed_sq == pytest.approx(1.0, abs=1e-12)

    def test_crest_speed_reported(self):
        alpha = 0.5
        b = ModeBasis(48.0, 64)
        c = (1.0 - 1e-3) / (2.0 * alpha)
        st = ReducedState(SurfaceTrace(np.r_[c, np.zeros(64)]),
                          Parameters(-1.0, alpha), b)
        scan = stagnation_scan(st)
        assert scan.crest_speed_sq == pytest.approx(1e-3, rel=1e-9)


class TestReconstruction:
    def test_trivial_surface_is_flat(self):
        st = trivial_state(-1.0, 0.5)
        surf = reconstruct_surface(st)
        assert np.allclose(surf.Y, 1.0, atol=1e-15)
        assert np.allclose(surf.X, surf.x, atol=1e-15)
        assert not surf.overhang

    def test_small_wave_is_a_graph_with_central_hump(self, converged_wave):
        surf = reconstruct_surface(converged_wave)
        assert not surf.overhang
        assert surf.Y[np.argmin(np.abs(surf.x))] == pytest.approx(np.max(surf.Y))
        assert np.all(np.diff(surf.X) > 0.0)

    def test_cauchy_riemann_against_high_precision_oracle(self, converged_wave):
        # xi is rebuilt in mpmath and differentiated by high-precision
        # central differences; both CR relations must hold against the
        # package's analytic eta gradients
        st = converged_wave
        b = st.basis
        a = st.w1.coeffs
        ks = b.wavenumbers
        with mp.workdps(40):
            h = mp.mpf("1e-8")

            def xi_mp(x, y):
                tot = (1 + mp.mpf(float(a[0]))) * x
                for n in range(1, len(a)):
                    k = mp.mpf(float(ks[n]))
                    tot += (mp.mpf(float(a[n])) * mp.sin(k * x)
                            * mp.cosh(k * y) / mp.sinh(k))
                return tot

            rng = np.random.default_rng(31)
            for _ in range(6):
                x = mp.mpf(float(rng.uniform(-b.L, b.L)))
                y = mp.mpf(float(rng.uniform(0.3, 1.0)))
                xi_x = (xi_mp(x + h, y) - xi_mp(x - h, y)) / (2 * h)
                xi_y = (xi_mp(x, y + h) - xi_mp(x, y - h)) / (2 * h)
                wx, wy = evaluate_gradient_interior(st.w1, b, float(x), float(y))
                res = abs(float(xi_x) - (1.0 + wy)) + abs(float(xi_y) + wx)
                assert res <= 1e-10

    def test_surface_xi_normalization(self, converged_wave):
        assert surface_xi(converged_wave, np.array([0.0]))[0] == 0.0


class TestPsiBound:
    def test_trivial_negative_vorticity(self):
        st = trivial_state(-1.0, 0.5)
        psi_y = psi_surface_derivative(st)
        assert np.allclose(psi_y, 1.0, atol=1e-13)  # below the 1.5 bound
        assert psi_bound_check(st)

    def test_trivial_positive_vorticity(self):
        st = trivial_state(0.5, 0.3)
        psi_y = psi_surface_derivative(st)
        assert np.allclose(psi_y, 1.0, atol=1e-13)  # above min(1.5, 0.5)
        assert psi_bound_check(st)

    def test_converged_wave(self, converged_wave):
        assert psi_bound_check(converged_wave)


class TestReport:
    def test_report_fields_populated(self, converged_wave):
        rep = diagnostics_report(converged_wave)
        assert rep.nodal and not rep.overhang and rep.psi_bound_ok
        assert rep.lopatinskii > 0.0
        assert rep.flow_force_spread >= 0.0
        assert rep.monitor.m1 < 1.0
        doc = rep.to_json_dict()
        assert set(doc) == {
            "flow_force_values", "flow_force_spread", "phi_identity_residual",
            "integral_identity_residual", "lopatinskii", "monitor", "nodal",
            "overhang", "stagnation_points", "psi_bound_ok",
        }
