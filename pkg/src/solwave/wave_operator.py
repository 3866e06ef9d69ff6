"""Reduced nonlinear boundary operator, its Jacobian, and branch monitors.

The steady-wave problem on the strip reduces to two boundary conditions on
Gamma for the harmonic differences (w1, w2) from the laminar flow
(eta = y + w1, zeta = (1-gamma)*y + w2):

    kinematic:  w2 + gamma*w1 + (gamma/2)*w1^2 = 0
    dynamic:    (gamma*(w1 + w1y + w1*w1y) + w2y + 1)^2
                  - (1 - 2*alpha*w1) * (w1x^2 + (w1y + 1)^2) = 0

The kinematic condition is solved exactly for the w2 trace, leaving the
squared dynamic condition as a single nonlinear equation for the w1 trace.
This module assembles that residual at the collocation nodes, its analytic
Jacobian with respect to the trace coefficients and the wave-speed
parameter alpha = 1/F^2, the pointwise ellipticity (Lopatinskii) constant

    lambda = min_Gamma 4*(1 - 2*alpha*w1)^2 * (w1x^2 + (1 + w1y)^2),

whose positivity certifies no surface stagnation and a nondegenerate
conformal map, and the monitor triple whose collapse terminates
continuation runs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .strip_harmonics import (
    ModeBasis,
    SurfaceTrace,
    evaluate_gradient_interior,
    evaluate_interior,
)

__all__ = [
    "Parameters",
    "ReducedState",
    "SurfaceFields",
    "MonitorTriple",
    "eliminate_w2",
    "surface_fields",
    "residual",
    "jacobian",
    "lopatinskii_constant",
    "lopatinskii_interior_samples",
    "complementing_identity",
    "monitor",
    "is_admissible",
]


@dataclass(frozen=True)
class Parameters:
    """Physical parameters: vorticity gamma and wave-speed parameter alpha.

    alpha = 1/F^2 with F the Froude number; alpha_cr = 1 - gamma is the
    critical value.  Waves of elevation exist only for alpha < alpha_cr
    (they are supercritical), which is checked along branches rather than
    enforced at construction so that off-branch residual evaluations stay
    legal.
    """

    gamma: float
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha = 1/F^2 must be positive")

    @property
    def alpha_cr(self) -> float:
        return 1.0 - self.gamma

    @property
    def froude(self) -> float:
        return self.alpha ** -0.5

    def with_alpha(self, alpha: float) -> "Parameters":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class ReducedState:
    """A candidate wave: w1 surface trace plus parameters and basis."""

    w1: SurfaceTrace
    params: Parameters
    basis: ModeBasis

    def __post_init__(self):
        self.w1.check_size(self.basis)

    def with_coeffs(self, coeffs: np.ndarray) -> "ReducedState":
        return ReducedState(SurfaceTrace(coeffs), self.params, self.basis)

    def with_alpha(self, alpha: float) -> "ReducedState":
        return ReducedState(self.w1, self.params.with_alpha(alpha), self.basis)

    def crest_value(self) -> float:
        """w1 at the crest x = 0 (sum of the cosine coefficients)."""
        return float(np.sum(self.w1.coeffs))


def eliminate_w2(w1: SurfaceTrace, gamma: float, basis: ModeBasis) -> SurfaceTrace:
    """Exact elimination of the w2 trace via the kinematic condition.

    Returns the trace -gamma*w1 - (gamma/2)*w1^2, evaluated pointwise on
    the collocation grid and re-projected onto the retained modes.
    """
    w1.check_size(basis)
    v = basis.values(w1.coeffs)
    return SurfaceTrace(basis.coeffs_of(-gamma * v - 0.5 * gamma * v * v))


class SurfaceFields(NamedTuple):
    """Nodal surface data shared by the residual, Jacobian and monitors."""

    w1: np.ndarray    # trace values
    w1x: np.ndarray   # tangential derivative
    w1y: np.ndarray   # normal derivative (DtN of w1)
    w2y: np.ndarray   # normal derivative of the eliminated w2
    dyn: np.ndarray   # gamma*(w1 + w1y + w1*w1y) + w2y + 1  (a22/2)


def surface_fields(state: ReducedState) -> SurfaceFields:
    b = state.basis
    g = state.params.gamma
    a = state.w1.coeffs
    w1 = b.synth @ a
    w1x = b.synth_dx @ a
    w1y = b.synth_dtn @ a
    w2c = b.coeffs_of(-g * w1 - 0.5 * g * w1 * w1)
    w2y = b.synth_dtn @ w2c
    dyn = g * (w1 + w1y + w1 * w1y) + w2y + 1.0
    return SurfaceFields(w1, w1x, w1y, w2y, dyn)


def residual(state: ReducedState, fields: SurfaceFields | None = None) -> np.ndarray:
    """Nodal values of the squared dynamic condition after elimination.

    Evaluates everywhere, admissible or not, so Newton can recover from
    bad iterates.  Identically zero on the laminar family w1 = 0 for any
    (gamma, alpha).
    """
    f = fields or surface_fields(state)
    al = state.params.alpha
    return f.dyn ** 2 - (1.0 - 2.0 * al * f.w1) * (f.w1x ** 2 + (f.w1y + 1.0) ** 2)


def _coefficients(state: ReducedState, f: SurfaceFields):
    """Boundary-linearization coefficients at the collocation nodes.

    a11, a12, a22 multiply (d/dx w1dot, d/dy w1dot, d/dy w2dot); b1
    multiplies w1dot; c1 is the kinematic-linearization factor so that
    w2dot = -c1 * w1dot under the exact elimination.  (a21 = b2 = 0 and
    c2 = 1 throughout.)
    """
    g = state.params.gamma
    al = state.params.alpha
    one_m = 1.0 - 2.0 * al * f.w1
    grad_sq = f.w1x ** 2 + (1.0 + f.w1y) ** 2
    a11 = -2.0 * one_m * f.w1x
    a22 = 2.0 * f.dyn
    a12 = g * (1.0 + f.w1) * a22 - 2.0 * one_m * (1.0 + f.w1y)
    b1 = g * (1.0 + f.w1y) * a22 + 2.0 * al * grad_sq
    c1 = g * (1.0 + f.w1)
    return a11, a12, a22, b1, c1


def jacobian(state: ReducedState, fields: SurfaceFields | None = None):
    """Analytic Jacobian of the nodal residual.

    Returns (J, dr_dalpha): J maps mode coefficients of w1dot to nodal
    residual perturbations, assembled from the linearization coefficients
    chained with the elimination map w2dot = -c1*w1dot (realized as
    pointwise product -> projection -> DtN, matching the residual's own
    discretization exactly); dr_dalpha is the nodal partial derivative
    2*w1*(w1x^2 + (1 + w1y)^2).
    """
    f = fields or surface_fields(state)
    b = state.basis
    a11, a12, a22, b1, c1 = _coefficients(state, f)
    J = (
        a11[:, None] * b.synth_dx
        + a12[:, None] * b.synth_dtn
        + b1[:, None] * b.synth
        - a22[:, None] * (b.synth_dtn @ (b.project @ (c1[:, None] * b.synth)))
    )
    dr_dalpha = 2.0 * f.w1 * (f.w1x ** 2 + (1.0 + f.w1y) ** 2)
    return J, dr_dalpha


def lopatinskii_constant(state: ReducedState, fields: SurfaceFields | None = None) -> float:
    """Minimum over Gamma of 4*(1-2*alpha*w1)^2*(w1x^2+(1+w1y)^2).

    The surface infimum controls the strip infimum for solutions (both
    factors obey maximum principles); lopatinskii_interior_samples offers
    an interior cross-check without asserting equality.
    """
    f = fields or surface_fields(state)
    al = state.params.alpha
    vals = 4.0 * (1.0 - 2.0 * al * f.w1) ** 2 * (f.w1x ** 2 + (1.0 + f.w1y) ** 2)
    return float(np.min(vals))


def lopatinskii_interior_samples(state: ReducedState, nx: int = 24, ny: int = 8) -> float:
    """Same quantity sampled on an interior grid (diagnostic cross-check)."""
    b = state.basis
    xs = np.linspace(0.0, b.L, nx)
    ys = np.linspace(0.05, 1.0, ny)
    X, Y = np.meshgrid(xs, ys)
    w1 = evaluate_interior(state.w1, b, X, Y)
    w1x, w1y = evaluate_gradient_interior(state.w1, b, X, Y)
    al = state.params.alpha
    vals = 4.0 * (1.0 - 2.0 * al * w1) ** 2 * (w1x ** 2 + (1.0 + w1y) ** 2)
    return float(np.min(vals))


def complementing_identity(state: ReducedState, fields: SurfaceFields | None = None) -> float:
    """Discrepancy in the boundary-minor identity, a solution certificate.

    The minor expression (c1*a21 - c2*a11)^2 + (c1*a22 - c2*a12)^2 of the
    linearized boundary operator must equal the Lopatinskii quantity
    4*(1-2*alpha*w1)^2*(w1x^2+(1+w1y)^2) on solutions.  To make this a
    genuine converged-solution check rather than an algebraic tautology,
    a22 on the minor side is replaced by its on-surface value under the
    dynamic condition, 2*sign(dyn)*sqrt((1-2*alpha*w1)*(w1x^2+(1+w1y)^2)),
    which agrees with 2*dyn exactly when the residual vanishes.  Returns
    the max nodal discrepancy relative to the identity's scale.
    """
    f = fields or surface_fields(state)
    al = state.params.alpha
    g = state.params.gamma
    one_m = 1.0 - 2.0 * al * f.w1
    grad_sq = f.w1x ** 2 + (1.0 + f.w1y) ** 2
    a11 = -2.0 * one_m * f.w1x
    a12 = g * (1.0 + f.w1) * (2.0 * f.dyn) - 2.0 * one_m * (1.0 + f.w1y)
    c1 = g * (1.0 + f.w1)
    a22_sub = 2.0 * np.sign(f.dyn) * np.sqrt(np.maximum(one_m * grad_sq, 0.0))
    minor = a11 ** 2 + (c1 * a22_sub - a12) ** 2
    target = 4.0 * one_m ** 2 * grad_sq
    scale = max(1.0, float(np.max(np.abs(target))))
    return float(np.max(np.abs(minor - target))) / scale


class MonitorTriple(NamedTuple):
    """Blow-up monitors; continuation stops when any falls below threshold.

    m1: min_Gamma (1 - 2*alpha*w1) for gamma <= 0 (crest-stagnation
        proxy; the infimum sits at the crest for monotone waves).  For
        gamma > 0 the relevant blow-up quantity is the surface gradient
        instead, so m1 = 1/max_Gamma |grad eta|, which likewise tends to
        zero at blow-up and equals 1 on the laminar flow.
    m2: min_Gamma (w1x^2 + (1 + w1y)^2), degeneracy of the conformal map.
    m3: sqrt(alpha) = 1/F, vanishing iff the Froude number blows up.
    """

    m1: float
    m2: float
    m3: float
    m1_kind: str  # "crest" (gamma <= 0) or "gradient" (gamma > 0)


def monitor(state: ReducedState, fields: SurfaceFields | None = None) -> MonitorTriple:
    f = fields or surface_fields(state)
    p = state.params
    m2 = float(np.min(f.w1x ** 2 + (1.0 + f.w1y) ** 2))
    if p.gamma > 0:
        grad_eta = np.sqrt(f.w1x ** 2 + (1.0 + f.w1y) ** 2)
        m1 = 1.0 / float(np.max(grad_eta))
        kind = "gradient"
    else:
        m1 = float(np.min(1.0 - 2.0 * p.alpha * f.w1))
        kind = "crest"
    return MonitorTriple(m1, m2, float(np.sqrt(p.alpha)), kind)


def is_admissible(state: ReducedState, fields: SurfaceFields | None = None) -> bool:
    """Membership in the open admissible set: alpha < alpha_cr, lambda > 0."""
    p = state.params
    return p.alpha < p.alpha_cr and lopatinskii_constant(state, fields) > 0.0
