"""Small-amplitude machinery: seed profile, dispersion relation, reduced ODE.

Near the critical wave speed alpha_cr = 1 - gamma, writing
alpha = alpha_cr - eps, the surface elevation of the small solitary wave is

    w1(x) = 3*eps/(gamma^2 - 3*gamma + 3) * sech^2(sqrt(3*eps)/2 * x)

to leading order.  The same profile appears as the explicit homoclinic
orbit of the scaled center-manifold ODE

    Q_XX = 3*Q - (3/2)*(gamma^2 - 3*gamma + 3)*Q^2,     x = X/sqrt(eps),

which this module integrates for phase portraits and cross-validation.
The linear theory enters through the dispersion relation
gamma + alpha = k*coth(k): no real wavenumber solves it below the
critical value (k*coth(k) >= 1), which is exactly why the solitary branch
bifurcates from k = 0.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from .strip_harmonics import ModeBasis, SurfaceTrace, dtn_symbol

__all__ = [
    "amplitude_coefficient",
    "seed_profile",
    "seed_alpha",
    "DispersionRoot",
    "dispersion_root",
    "reduced_ode_rhs",
    "reduced_ode_energy",
    "explicit_homoclinic",
    "explicit_homoclinic_slope",
    "homoclinic_peak",
    "integrate_reduced_ode",
]


def amplitude_coefficient(gamma: float) -> float:
    """The quadratic coefficient gamma^2 - 3*gamma + 3 (always positive)."""
    return gamma * gamma - 3.0 * gamma + 3.0


def seed_alpha(gamma: float, eps: float) -> float:
    """Wave-speed parameter alpha_cr - eps of the small-amplitude wave."""
    return (1.0 - gamma) - eps


def seed_profile(gamma: float, eps: float, basis: ModeBasis) -> SurfaceTrace:
    """Leading-order sech^2 surface trace, projected onto the basis.

    Crest height is 3*eps/(gamma^2 - 3*gamma + 3); the projection
    reproduces it to ~1e-10 once L*sqrt(eps) >~ 20 (tail truncation is
    exponentially small).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    amp = 3.0 * eps / amplitude_coefficient(gamma)
    arg = 0.5 * np.sqrt(3.0 * eps) * basis.nodes
    vals = amp / np.cosh(arg) ** 2
    return SurfaceTrace(basis.coeffs_of(vals))


class DispersionRoot(NamedTuple):
    k: Optional[float]
    at_cutoff: bool  # gamma + alpha exactly at the minimum of k*coth(k)


def dispersion_root(gamma: float, alpha: float) -> DispersionRoot:
    """Unique k > 0 with k*coth(k) = gamma + alpha, if one exists.

    Returns (None, False) for gamma + alpha < 1 (no real wavenumber:
    k*coth(k) has minimum 1 at k = 0) and (None, True) at equality, where
    the root degenerates to k = 0.
    """
    target = gamma + alpha
    if target < 1.0:
        return DispersionRoot(None, False)
    if target == 1.0:
        return DispersionRoot(None, True)
    # k*coth(k) ~ 1 + k^2/3 for small k, ~ k for large k
    lo = max(1e-8, np.sqrt(3.0 * (target - 1.0)) * 0.5)
    hi = max(2.0 * target, 1.0)
    while dtn_symbol(lo) > target:
        lo *= 0.5
    while dtn_symbol(hi) < target:
        hi *= 2.0
    k = brentq(lambda k: dtn_symbol(k) - target, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return DispersionRoot(float(k), False)


def reduced_ode_rhs(q: float, p: float, gamma: float):
    """Right-hand side (dQ, dP) of the scaled reduced ODE (leading order)."""
    return p, 3.0 * q - 1.5 * amplitude_coefficient(gamma) * q * q


def reduced_ode_energy(q, p, gamma: float):
    """First integral P^2/2 - (3/2)Q^2 + (1/2)(gamma^2-3gamma+3)Q^3."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return 0.5 * p ** 2 - 1.5 * q ** 2 + 0.5 * amplitude_coefficient(gamma) * q ** 3


def homoclinic_peak(gamma: float) -> float:
    """Q value where the homoclinic loop crosses the Q axis."""
    return 3.0 / amplitude_coefficient(gamma)


def explicit_homoclinic(gamma: float, X):
    """The explicit homoclinic orbit Q(X) = Q0 * sech^2(sqrt(3)*X/2)."""
    X = np.asarray(X, dtype=float)
    out = homoclinic_peak(gamma) / np.cosh(0.5 * np.sqrt(3.0) * X) ** 2
    if out.ndim == 0:
        return float(out)
    return out


def explicit_homoclinic_slope(gamma: float, X):
    """dQ/dX along the explicit homoclinic (for shooting starts)."""
    X = np.asarray(X, dtype=float)
    a = 0.5 * np.sqrt(3.0)
    out = -2.0 * a * homoclinic_peak(gamma) * np.tanh(a * X) / np.cosh(a * X) ** 2
    if out.ndim == 0:
        return float(out)
    return out


def integrate_reduced_ode(q0: float, p0: float, gamma: float,
                          x_span: tuple[float, float], step: float) -> np.ndarray:
    """Fixed-step RK4 trajectory of the reduced ODE.

    Returns an array with columns (X, Q, P) including both endpoints; the
    last step is shortened to land exactly on x_span[1].
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x0, x1 = x_span
    n = max(1, int(np.ceil((x1 - x0) / step - 1e-12)))
    xs = np.linspace(x0, x1, n + 1)
    out = np.empty((n + 1, 3))
    out[0] = (x0, q0, p0)
    q, p = q0, p0
    for i in range(n):
        h = xs[i + 1] - xs[i]
        k1 = reduced_ode_rhs(q, p, gamma)
        k2 = reduced_ode_rhs(q + 0.5 * h * k1[0], p + 0.5 * h * k1[1], gamma)
        k3 = reduced_ode_rhs(q + 0.5 * h * k2[0], p + 0.5 * h * k2[1], gamma)
        k4 = reduced_ode_rhs(q + h * k3[0], p + h * k3[1], gamma)
        q += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        p += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        out[i + 1] = (xs[i + 1], q, p)
    return out
