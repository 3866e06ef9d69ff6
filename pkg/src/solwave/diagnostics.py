"""Analytic identities and bounds evaluated as numerical checks.

Every converged wave carries a set of exact invariants inherited from the
continuous problem; this module turns each into a residual that certifies
solver correctness:

* flow force: the momentum-flux integral S is independent of the station
  x at which it is evaluated, so its spread across stations measures
  discretization error directly;
* conjugate flows: the parameterized Bernoulli constant qhat(d) and flow
  force shat(d) of the laminar family satisfy shat'(d) =
  (qhat(1) - qhat(d))/2, and no depth d != 1 matches the unit-depth flow
  in both quantities simultaneously (hence no bores);
* the flux function Phi (a y-integral of the flow-force integrand) is
  harmonic with an explicit polynomial trace on Gamma, producing an
  integral identity whose positivity forces supercriticality
  alpha < 1 - gamma for waves of elevation;
* the velocity field in strip coordinates obeys pointwise kinematic and
  dynamic conditions on Gamma;
* the conformal-modulus stream function psi = zeta + gamma*eta^2/2 obeys
  one-sided bounds on psi_y depending on the sign of gamma.

Physical-plane reconstruction (via the exact harmonic conjugate of the
elevation field) with overhang and stagnation detection lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .strip_harmonics import (
    ModeBasis,
    SurfaceTrace,
    _cosh_ratio,
    evaluate_gradient_interior,
    evaluate_interior,
)
from .wave_operator import (
    MonitorTriple,
    Parameters,
    ReducedState,
    SurfaceFields,
    complementing_identity,
    eliminate_w2,
    lopatinskii_constant,
    monitor,
    surface_fields,
)

__all__ = [
    "DegenerateConjugateFlowError",
    "DiagnosticsReport",
    "PhysicalSurface",
    "NodalResult",
    "qhat",
    "shat",
    "d_critical",
    "conjugate_depth",
    "flow_force",
    "flow_force_spread",
    "default_stations",
    "phi_flux",
    "phi_surface_check",
    "integral_identity_check",
    "integral_identity_terms",
    "velocity",
    "stagnation_scan",
    "StagnationScan",
    "reconstruct_surface",
    "surface_xi",
    "psi_surface_derivative",
    "psi_bound_check",
    "nodal_check",
    "diagnostics_report",
]

_GAUSS_NODES = 64
_DENOM_FLOOR = 1e-14


class DegenerateConjugateFlowError(ValueError):
    """Raised when alpha = alpha_cr makes the conjugate depth merge with 1."""


# ---------------------------------------------------------------------------
# laminar (conjugate-flow) quantities
# ---------------------------------------------------------------------------

def qhat(d: float, params: Parameters) -> float:
    """Bernoulli constant of the laminar flow with asymptotic depth d.

    qhat(d) = ((2-gamma)/2 + gamma*d^2/2)^2 / d^2 + 2*alpha*(d-1);
    strictly convex in d with qhat(1) = 1.
    """
    g, al = params.gamma, params.alpha
    return ((0.5 * (2.0 - g) + 0.5 * g * d * d) / d) ** 2 + 2.0 * al * (d - 1.0)


def _qhat_prime(d: float, params: Parameters) -> float:
    g, al = params.gamma, params.alpha
    return -0.5 * (2.0 - g) ** 2 / d ** 3 + 0.5 * g * g * d + 2.0 * al


def shat(d: float, params: Parameters) -> float:
    """Flow force of the laminar flow with asymptotic depth d (closed form)."""
    g, al = params.gamma, params.alpha
    return (
        (2.0 - g) ** 2 / (8.0 * d)
        - g * g * d ** 3 / 24.0
        - (2.0 - g) * g * d / 4.0
        + d * al
        - d * d * al / 2.0
        + 0.5 * qhat(1.0, params) * d
    )


def d_critical(params: Parameters) -> float:
    """Depth minimizing qhat (unique by strict convexity)."""
    lo, hi = 1e-6, 1.0
    while _qhat_prime(hi, params) < 0:
        hi *= 2.0
    while _qhat_prime(lo, params) > 0:
        lo *= 0.5
    return float(brentq(lambda d: _qhat_prime(d, params), lo, hi,
                        xtol=1e-15, rtol=8.9e-16))


def conjugate_depth(params: Parameters) -> float:
    """The unique depth d* != 1 with qhat(d*) = qhat(1).

    For alpha < alpha_cr the conjugate depth lies in (d_cr, infinity); for
    alpha > alpha_cr in (0, d_cr).  At alpha = alpha_cr it merges with
    d = 1 and the configuration is degenerate.
    """
    if abs(params.alpha - params.alpha_cr) <= 1e-12 * max(1.0, abs(params.alpha_cr)):
        raise DegenerateConjugateFlowError(
            "alpha = alpha_cr: conjugate depth degenerates to d = 1"
        )
    dcr = d_critical(params)
    q1 = qhat(1.0, params)
    g = lambda d: qhat(d, params) - q1
    if params.alpha < params.alpha_cr:
        hi = max(2.0 * dcr, 2.0)
        while g(hi) < 0:
            hi *= 2.0
        return float(brentq(g, dcr, hi, xtol=1e-15, rtol=8.9e-16))
    lo = min(0.5 * dcr, 0.5)
    while g(lo) < 0:
        lo *= 0.5
    return float(brentq(g, lo, dcr, xtol=1e-15, rtol=8.9e-16))


# ---------------------------------------------------------------------------
# interior field evaluation shared by the integral diagnostics
# ---------------------------------------------------------------------------

def _w2_trace(state: ReducedState) -> SurfaceTrace:
    return eliminate_w2(state.w1, state.params.gamma, state.basis)


def _interior_gradients(state: ReducedState, x, y, w2: SurfaceTrace | None = None):
    """(eta_x, eta_y, zeta_x, zeta_y, eta) at interior points."""
    b = state.basis
    g = state.params.gamma
    w2 = w2 or _w2_trace(state)
    w1x, w1y = evaluate_gradient_interior(state.w1, b, x, y)
    w2x, w2y = evaluate_gradient_interior(w2, b, x, y)
    eta = np.asarray(y, dtype=float) + evaluate_interior(state.w1, b, x, y)
    return w1x, 1.0 + w1y, w2x, (1.0 - g) + w2y, eta


def _gauss01(n: int = _GAUSS_NODES):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def default_stations(basis: ModeBasis, count: int = 9) -> np.ndarray:
    """Evenly spaced flow-force stations {0, L/(count-1), ..., L}."""
    return np.linspace(0.0, basis.L, count)


def flow_force(state: ReducedState, x_station: float,
               n_quad: int = _GAUSS_NODES) -> float:
    """Momentum-flux integral S at a station of constant x.

    S = (1/2) * int_0^1 [eta_y*(zeta_y^2 - zeta_x^2) + 2*eta_x*zeta_x*zeta_y]
        / (eta_x^2 + eta_y^2) dy
        - (gamma^2*eta^3/6 + alpha*eta^2/2 - (2*alpha+1)*eta/2) at y = 1.

    Independent of x for exact solutions; evaluated by Gauss-Legendre
    quadrature in y (the integrand is analytic).
    """
    g, al = state.params.gamma, state.params.alpha
    ys, wts = _gauss01(n_quad)
    xs = np.full_like(ys, float(x_station))
    w2 = _w2_trace(state)
    ex, ey, zx, zy, _ = _interior_gradients(state, xs, ys, w2)
    denom = ex ** 2 + ey ** 2
    if np.min(denom) < _DENOM_FLOOR:
        raise FloatingPointError("conformal-map gradient degenerate at station")
    integrand = (ey * (zy ** 2 - zx ** 2) + 2.0 * ex * zx * zy) / denom
    eta1 = 1.0 + evaluate_interior(state.w1, state.basis, float(x_station), 1.0)
    boundary = g * g * eta1 ** 3 / 6.0 + al * eta1 ** 2 / 2.0 - (2.0 * al + 1.0) * eta1 / 2.0
    return float(0.5 * np.dot(wts, integrand) - boundary)


def flow_force_spread(state: ReducedState, stations=None):
    """(values, max - min) of the flow force over the station set."""
    if stations is None:
        stations = default_stations(state.basis)
    vals = np.array([flow_force(state, x) for x in stations])
    return vals, float(np.max(vals) - np.min(vals))


# ---------------------------------------------------------------------------
# flux-function and integral identities
# ---------------------------------------------------------------------------

def phi_flux(state: ReducedState, x: float, y: float,
             n_quad: int = _GAUSS_NODES) -> float:
    """Flux function Phi(x, y): y-integral of the flow-force integrand
    plus (1 - gamma^2)*eta_y + 2*(gamma - 1), from the bed up to height y.

    Phi vanishes identically on the bed (lower integration limit) and on
    trivial solutions; on Gamma it equals the polynomial trace tested by
    phi_surface_check.
    """
    if y == 0.0:
        return 0.0
    g = state.params.gamma
    ys, wts = _gauss01(n_quad)
    ys = ys * y
    wts = wts * y
    xs = np.full_like(ys, float(x))
    w2 = _w2_trace(state)
    ex, ey, zx, zy, _ = _interior_gradients(state, xs, ys, w2)
    denom = ex ** 2 + ey ** 2
    if np.min(denom) < _DENOM_FLOOR:
        raise FloatingPointError("conformal-map gradient degenerate at station")
    integrand = (ey * (zy ** 2 - zx ** 2) + 2.0 * ex * zx * zy) / denom
    integrand = integrand + (1.0 - g * g) * ey + 2.0 * (g - 1.0)
    return float(np.dot(wts, integrand))


def phi_surface_check(state: ReducedState, stations=None) -> float:
    """Max station residual of the surface identity for Phi, relative.

    On Gamma, Phi = (alpha + gamma^2)*w1^2 + (gamma^2/3)*w1^3 with
    w1 = eta - 1.  Returns max |Phi(x,1) - rhs(x)| / max(1, max |rhs|).
    """
    g, al = state.params.gamma, state.params.alpha
    if stations is None:
        stations = default_stations(state.basis)
    lhs = np.array([phi_flux(state, x, 1.0) for x in stations])
    w1s = np.array([evaluate_interior(state.w1, state.basis, x, 1.0)
                    for x in stations])
    rhs = (al + g * g) * w1s ** 2 + (g * g / 3.0) * w1s ** 3
    scale = max(1.0, float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def _cell_integral(basis: ModeBasis, nodal: np.ndarray) -> float:
    """Trapezoid integral of an even periodic function over [-L, L].

    Spectrally accurate on the collocation grid (it is the periodic
    trapezoid rule applied to one full period of the even extension).
    """
    w = np.ones(basis.num_nodes)
    w[0] = w[-1] = 0.5
    h = basis.L / (basis.num_nodes - 1)
    return float(2.0 * h * np.dot(w, nodal))


def integral_identity_terms(state: ReducedState,
                            fields: SurfaceFields | None = None):
    """(lhs, rhs_terms) of the supercriticality integral identity.

    lhs = (1 - alpha - gamma) * int w1 dx over the surface;
    rhs = alpha * int w1*w1y + (alpha + gamma^2)/2 * int w1^2
          + gamma^2/6 * int w1^3.  The boundary flux vanishes by periodic
    truncation, so the continuous o(1) term is dropped exactly.
    """
    f = fields or surface_fields(state)
    g, al = state.params.gamma, state.params.alpha
    b = state.basis
    i_w1 = _cell_integral(b, f.w1)
    i_w1w1y = _cell_integral(b, f.w1 * f.w1y)
    i_w1sq = _cell_integral(b, f.w1 ** 2)
    i_w1cu = _cell_integral(b, f.w1 ** 3)
    lhs = (1.0 - al - g) * i_w1
    rhs = (al * i_w1w1y, 0.5 * (al + g * g) * i_w1sq, g * g / 6.0 * i_w1cu)
    return lhs, rhs, (i_w1, i_w1w1y, i_w1sq, i_w1cu)


def integral_identity_check(state: ReducedState,
                            fields: SurfaceFields | None = None) -> float:
    """|lhs - rhs| / max(1, |lhs|) for the integral identity."""
    lhs, rhs, _ = integral_identity_terms(state, fields)
    return abs(lhs - sum(rhs)) / max(1.0, abs(lhs))


# ---------------------------------------------------------------------------
# velocity field, stagnation, reconstruction
# ---------------------------------------------------------------------------

def velocity(state: ReducedState, x, y, w2: SurfaceTrace | None = None):
    """Velocity components in strip coordinates.

    u = (eta_x*zeta_x + eta_y*zeta_y)/(eta_x^2 + eta_y^2) + gamma*eta,
    v = (eta_x*zeta_y - eta_y*zeta_x)/(eta_x^2 + eta_y^2).

    On the laminar flow u = (1 - gamma) + gamma*y and v = 0; u is even and
    v odd in x.
    """
    g = state.params.gamma
    ex, ey, zx, zy, eta = _interior_gradients(state, x, y, w2)
    denom = ex ** 2 + ey ** 2
    if np.min(denom) < _DENOM_FLOOR:
        raise FloatingPointError("conformal-map gradient degenerate")
    u = (ex * zx + ey * zy) / denom + g * eta
    v = (ex * zy - ey * zx) / denom
    return u, v


@dataclass(frozen=True)
class StagnationScan:
    """Interior scan for stagnation points and critical layers."""

    stagnation_points: list          # (x, y, speed) with speed^2 below threshold
    critical_layer_crossings: list   # (x, y) where u changes sign along a column
    min_speed_sq: float
    crest_speed_sq: float            # 1 - 2*alpha*w1 at the crest


def stagnation_scan(state: ReducedState, nx: int = 48, ny: int = 24,
                    threshold: float = 1e-4) -> StagnationScan:
    """Scan the half-cell interior for near-stagnation and critical layers.

    Reports grid-local minima of u^2 + v^2 below the threshold (a
    reporting device, not a claim of an exact stagnation point) and sign
    changes of u along grid columns (critical layers).
    """
    b = state.basis
    xs = np.linspace(0.0, b.L, nx)
    # the grid reaches the surface: crest stagnation happens at y = 1
    ys = np.linspace(1.0 / (ny + 1), 1.0, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    u, v = velocity(state, X, Y, _w2_trace(state))
    sp = u * u + v * v
    points = []
    for i in range(nx):
        for j in range(ny):
            if sp[i, j] >= threshold:
                continue
            lo_i, hi_i = max(i - 1, 0), min(i + 2, nx)
            lo_j, hi_j = max(j - 1, 0), min(j + 2, ny)
            if sp[i, j] <= np.min(sp[lo_i:hi_i, lo_j:hi_j]):
                points.append((float(xs[i]), float(ys[j]), float(np.sqrt(sp[i, j]))))
    crossings = []
    for i in range(nx):
        s = np.sign(u[i, :])
        flips = np.nonzero(s[:-1] * s[1:] < 0)[0]
        for j in flips:
            crossings.append((float(xs[i]), float(0.5 * (ys[j] + ys[j + 1]))))
    crest = 1.0 - 2.0 * state.params.alpha * state.crest_value()
    return StagnationScan(points, crossings, float(np.min(sp)), float(crest))


@dataclass(frozen=True)
class PhysicalSurface:
    """Parametric free surface (xi(x,1), eta(x,1)) over one full period."""

    x: np.ndarray          # strip coordinate samples in [-L, L]
    X: np.ndarray          # physical horizontal coordinate xi(x, 1)
    Y: np.ndarray          # physical surface height eta(x, 1)
    overhang: bool         # true iff xi_x < 0 somewhere on Gamma


def surface_xi(state: ReducedState, x) -> np.ndarray:
    """Harmonic conjugate xi on Gamma, normalized by xi(0, 1) = 0.

    xi(x,1) = (1 + a_0)*x + sum_{n>=1} a_n coth(k_n) sin(k_n x); by the
    Cauchy-Riemann equations xi_x = eta_y and xi_y = -eta_x exactly.
    """
    b = state.basis
    a = state.w1.coeffs
    x = np.asarray(x, dtype=float)
    k = b.wavenumbers[1:]
    coth = _cosh_ratio(k, 1.0)  # cosh(k)/sinh(k)
    return (1.0 + a[0]) * x + np.sin(np.outer(x, k)) @ (a[1:] * coth)


def reconstruct_surface(state: ReducedState, n_samples: int = 512) -> PhysicalSurface:
    """Sample the physical free surface over a full period [-L, L].

    The overhang flag is min_Gamma xi_x < 0 with xi_x = eta_y = 1 + w1y
    evaluated spectrally on the sample grid; graph profiles have
    xi_x > 0 everywhere.
    """
    b = state.basis
    xs = np.linspace(-b.L, b.L, 2 * n_samples + 1)
    X = surface_xi(state, xs)
    Y = 1.0 + np.array(evaluate_interior(state.w1, b, xs, np.ones_like(xs)))
    a = state.w1.coeffs
    k = b.wavenumbers
    # xi_x on Gamma = 1 + a0 + sum a_n sigma_n cos(k_n x)
    xi_x = 1.0 + a[0] + np.cos(np.outer(xs, k[1:])) @ (a[1:] * b.symbols[1:])
    return PhysicalSurface(xs, X, Y, bool(np.min(xi_x) < 0.0))


# ---------------------------------------------------------------------------
# stream-function bound and nodal monotonicity
# ---------------------------------------------------------------------------

def psi_surface_derivative(state: ReducedState,
                           fields: SurfaceFields | None = None) -> np.ndarray:
    """psi_y on Gamma for psi = zeta + gamma*eta^2/2, evaluated spectrally."""
    f = fields or surface_fields(state)
    g = state.params.gamma
    return (1.0 - g) + f.w2y + g * (1.0 + f.w1) * (1.0 + f.w1y)


def psi_bound_check(state: ReducedState,
                    fields: SurfaceFields | None = None) -> bool:
    """One-sided bounds on psi_y over Gamma, by sign of gamma.

    gamma <= 0:  psi_y < 1 - gamma/2 everywhere on Gamma;
    gamma >= 0:  psi_y > min(2 - gamma, gamma * inf |grad eta|^2), the
    infimum taken over surface and interior samples.  Both branches are
    checked when gamma = 0.
    """
    f = fields or surface_fields(state)
    g = state.params.gamma
    psi_y = psi_surface_derivative(state, f)
    ok = True
    if g <= 0:
        ok = ok and bool(np.max(psi_y) < 1.0 - 0.5 * g)
    if g >= 0:
        grad_sq = f.w1x ** 2 + (1.0 + f.w1y) ** 2
        b = state.basis
        xs = np.linspace(0.0, b.L, 24)
        ys = np.linspace(0.05, 0.95, 8)
        X, Y = np.meshgrid(xs, ys)
        wx, wy = evaluate_gradient_interior(state.w1, b, X, Y)
        inf_grad = min(float(np.min(grad_sq)), float(np.min(wx ** 2 + (1.0 + wy) ** 2)))
        ok = ok and bool(np.min(psi_y) > min(2.0 - g, g * inf_grad))
    return ok


@dataclass(frozen=True)
class NodalResult:
    """Outcome of the surface/interior monotonicity check eta_x < 0, x > 0."""

    ok: bool
    strict: bool          # monotone with room to spare (not the flat family)
    trivial_flat: bool    # eta_x identically ~0: the laminar solution
    worst_value: float
    worst_x: float
    worst_y: float


def nodal_check(state: ReducedState, tol: float = 1e-12) -> NodalResult:
    """Monotonicity eta_x < 0 on Gamma and in the interior for x > 0.

    Passes iff every sampled value is below tol (zeros at the crest and
    the far tail are allowed).  The laminar solution passes vacuously and
    is flagged trivial_flat.
    """
    b = state.basis
    a = state.w1.coeffs
    xs = b.nodes[1:]
    vals = [b.synth_dx[1:, :] @ a]
    locs = [np.column_stack([xs, np.ones_like(xs)])]
    ys = np.array([0.25, 0.5, 0.75])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    wx, _ = evaluate_gradient_interior(state.w1, b, X, Y)
    vals.append(wx.ravel())
    locs.append(np.column_stack([X.ravel(), Y.ravel()]))
    v = np.concatenate(vals)
    pts = np.vstack(locs)
    ok = bool(np.all(v < tol))
    trivial_flat = bool(np.all(np.abs(v) <= tol))
    worst = int(np.argmax(v))
    return NodalResult(ok, ok and not trivial_flat, trivial_flat,
                       float(v[worst]), float(pts[worst, 0]), float(pts[worst, 1]))


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsReport:
    """Everything the branch writer records per accepted solution."""

    flow_force_values: list
    flow_force_spread: float
    phi_identity_residual: float
    integral_identity_residual: float
    lopatinskii: float
    monitor: MonitorTriple
    nodal: bool
    overhang: bool
    stagnation_points: list
    psi_bound_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "flow_force_values": [float(v) for v in self.flow_force_values],
            "flow_force_spread": self.flow_force_spread,
            "phi_identity_residual": self.phi_identity_residual,
            "integral_identity_residual": self.integral_identity_residual,
            "lopatinskii": self.lopatinskii,
            "monitor": {
                "m1": self.monitor.m1,
                "m2": self.monitor.m2,
                "m3": self.monitor.m3,
                "m1_kind": self.monitor.m1_kind,
            },
            "nodal": self.nodal,
            "overhang": self.overhang,
            "stagnation_points": [list(p) for p in self.stagnation_points],
            "psi_bound_ok": self.psi_bound_ok,
        }


def diagnostics_report(state: ReducedState,
                       fields: SurfaceFields | None = None,
                       scan_stagnation: bool = True) -> DiagnosticsReport:
    """Run the full per-point diagnostic battery."""
    f = fields or surface_fields(state)
    ff_vals, spread = flow_force_spread(state)
    scan = (stagnation_scan(state).stagnation_points if scan_stagnation else [])
    return DiagnosticsReport(
        flow_force_values=list(ff_vals),
        flow_force_spread=spread,
        phi_identity_residual=phi_surface_check(state),
        integral_identity_residual=integral_identity_check(state, f),
        lopatinskii=lopatinskii_constant(state, f),
        monitor=monitor(state, f),
        nodal=nodal_check(state).ok,
        overhang=reconstruct_surface(state, 256).overhang,
        stagnation_points=scan,
        psi_bound_ok=psi_bound_check(state, f),
    )


def complementing_identity_residual(state: ReducedState) -> float:
    """Re-export point for report consumers (see wave_operator)."""
    return complementing_identity(state)
