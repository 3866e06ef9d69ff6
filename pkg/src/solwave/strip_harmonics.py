"""Harmonic fields on the unit strip, represented by their surface trace.

The computational domain is the fixed rectangle 0 < y < 1 with top boundary
Gamma (y = 1, the free-surface preimage) and bottom B (y = 0, the bed).  A
field that is harmonic in the strip, vanishes on B, and is even and
2L-periodic in x is determined by the cosine coefficients of its trace on
Gamma:

    t(x)   = sum_n  a_n cos(k_n x),          k_n = n*pi/L,  n = 0..N
    w(x,y) = a_0*y + sum_{n>=1} a_n cos(k_n x) * sinh(k_n y)/sinh(k_n)

Everything downstream (residual assembly, diagnostics, reconstruction) is
built from this representation.  The normal derivative on Gamma is diagonal
in mode space with symbol k*coth(k), the Dirichlet-to-Neumann symbol of the
strip; the mean mode k = 0 carries the y-linear field with symbol 1.

Collocation uses M = 2N+1 equispaced nodes on [0, L] including both
endpoints (trapezoid/DCT-I grid).  This is 2x oversampled relative to the
N+1 retained modes, so products of two resolved modes project back without
aliasing.  All hyperbolic ratios are evaluated in exp-difference form so
that wavenumbers up to 1e4 and beyond stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModeBasis",
    "SurfaceTrace",
    "dtn_symbol",
    "dtn_apply",
    "trace_x_derivative",
    "evaluate_interior",
    "evaluate_gradient_interior",
]


def dtn_symbol(k):
    """Dirichlet-to-Neumann symbol k*coth(k) of the unit strip.

    Accepts a scalar or array of wavenumbers k >= 0 and returns the symbol
    evaluated in the overflow-free form k*(1 + e^{-2k})/(1 - e^{-2k}).  The
    k = 0 entry returns the continuous limit 1, which is also the symbol's
    minimum; the symbol is strictly increasing and ~k for large k.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("dtn_symbol requires k >= 0")
    out = np.ones_like(k)
    pos = k > 0
    kp = k[pos]
    e = np.exp(-2.0 * kp)
    # 1 - e^{-2k} via expm1 keeps full accuracy for small k
    out[pos] = kp * (1.0 + e) / (-np.expm1(-2.0 * kp))
    if out.ndim == 0:
        return float(out)
    return out


def _sinh_ratio(k, y):
    """sinh(k*y)/sinh(k) for k > 0, 0 <= y <= 1, without overflow.

    Uses sinh(ky)/sinh(k) = e^{k(y-1)} * (1 - e^{-2ky}) / (1 - e^{-2k}).
    Broadcasts k against y.
    """
    k = np.asarray(k, dtype=float)
    y = np.asarray(y, dtype=float)
    num = -np.expm1(-2.0 * k * y)
    den = -np.expm1(-2.0 * k)
    return np.exp(k * (y - 1.0)) * num / den


def _cosh_ratio(k, y):
    """cosh(k*y)/sinh(k) for k > 0, same stable exp-difference form."""
    k = np.asarray(k, dtype=float)
    y = np.asarray(y, dtype=float)
    num = 1.0 + np.exp(-2.0 * k * y)
    den = -np.expm1(-2.0 * k)
    return np.exp(k * (y - 1.0)) * num / den


@dataclass(frozen=True)
class ModeBasis:
    """Cosine mode basis on the half-period [0, L] with collocation grid.

    Parameters
    ----------
    L : float
        Half-period of the periodized cell (> 0).  The solitary wave is
        approximated on x in [-L, L] with even symmetry; L is a convergence
        parameter (profiles decay like sech^2, so the truncation error is
        exponentially small in L*sqrt(eps)).
    N : int
        Highest retained mode (>= 1); the trace carries N+1 coefficients.

    Notes
    -----
    Precomputes the synthesis, differentiation, and DtN matrices mapping mode
    coefficients to nodal values on the 2N+1 point grid, and the exact
    projection back to N+1 modes (trapezoid-weighted DCT-I, for which
    project @ synth == identity to rounding).
    """

    L: float
    N: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)
    symbols: np.ndarray = field(init=False, repr=False, compare=False)
    synth: np.ndarray = field(init=False, repr=False, compare=False)
    synth_dx: np.ndarray = field(init=False, repr=False, compare=False)
    synth_dtn: np.ndarray = field(init=False, repr=False, compare=False)
    project: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("half-period L must be positive")
        if self.N < 1:
            raise ValueError("mode count N must be >= 1")
        n_div = 2 * self.N  # grid divisions; 2x oversampling for dealiasing
        j = np.arange(n_div + 1)
        x = j * (self.L / n_div)
        k = np.arange(self.N + 1) * (np.pi / self.L)
        sig = dtn_symbol(k)
        cos = np.cos(np.outer(x, k))
        dx = -np.sin(np.outer(x, k)) * k
        # trapezoid-weighted DCT-I projection; exact inverse of synth on
        # the retained modes
        w = np.ones(n_div + 1)
        w[0] = w[-1] = 0.5
        scale = np.full(self.N + 1, 2.0 / n_div)
        scale[0] = 1.0 / n_div
        proj = scale[:, None] * cos.T * w[None, :]
        for name, val in (
            ("nodes", x),
            ("wavenumbers", k),
            ("symbols", np.asarray(sig)),
            ("synth", cos),
            ("synth_dx", dx),
            ("synth_dtn", cos * sig),
            ("project", proj),
        ):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def num_nodes(self) -> int:
        return 2 * self.N + 1

    def values(self, coeffs: np.ndarray) -> np.ndarray:
        """Trace values at the collocation nodes."""
        return self.synth @ coeffs

    def coeffs_of(self, values: np.ndarray) -> np.ndarray:
        """Project nodal values onto the retained N+1 cosine modes."""
        return self.project @ values


@dataclass(frozen=True)
class SurfaceTrace:
    """Even cosine-series trace of a strip-harmonic field on Gamma."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def check_size(self, basis: ModeBasis) -> None:
        if self.coeffs.shape != (basis.N + 1,):
            raise ValueError(
                f"trace has {self.coeffs.shape[0]} coefficients, "
                f"basis expects {basis.N + 1}"
            )

    def __add__(self, other: "SurfaceTrace") -> "SurfaceTrace":
        return SurfaceTrace(self.coeffs + other.coeffs)

    def __sub__(self, other: "SurfaceTrace") -> "SurfaceTrace":
        return SurfaceTrace(self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "SurfaceTrace":
        return SurfaceTrace(self.coeffs * s)

    __rmul__ = __mul__


def dtn_apply(t: SurfaceTrace, basis: ModeBasis) -> SurfaceTrace:
    """Dirichlet-to-Neumann map: trace of the normal derivative on Gamma.

    Diagonal in mode space; coefficient n is multiplied by
    dtn_symbol(k_n), with the mean mode (the y-linear field) mapped by 1.
    """
    t.check_size(basis)
    return SurfaceTrace(t.coeffs * basis.symbols)


def trace_x_derivative(t: SurfaceTrace, basis: ModeBasis) -> np.ndarray:
    """Coefficients b_n = -k_n a_n of t'(x) = sum b_n sin(k_n x).

    The derivative lives in the odd sine basis, so the return value is a
    plain coefficient array (b_0 = 0), exact on the retained modes.
    """
    t.check_size(basis)
    return -basis.wavenumbers * t.coeffs


def evaluate_interior(t: SurfaceTrace, basis: ModeBasis, x, y):
    """Value of the represented harmonic field at interior points.

    w(x, y) = a_0*y + sum_{n>=1} a_n cos(k_n x) sinh(k_n y)/sinh(k_n);
    exactly 0 on the bed and exactly t(x) on Gamma.  x, y broadcast.
    """
    t.check_size(basis)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > 1):
        raise ValueError("interior evaluation requires 0 <= y <= 1")
    a = t.coeffs
    xf, yf = np.broadcast_arrays(x, y)
    k = basis.wavenumbers[1:]
    ratio = _sinh_ratio(k[None, :], yf.reshape(-1, 1))
    modes = np.cos(np.outer(xf.ravel(), k)) * ratio
    out = a[0] * yf.ravel() + modes @ a[1:]
    out = out.reshape(xf.shape)
    if out.ndim == 0:
        return float(out)
    return out


def evaluate_gradient_interior(t: SurfaceTrace, basis: ModeBasis, x, y):
    """Gradient (w_x, w_y) of the represented field at interior points."""
    t.check_size(basis)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > 1):
        raise ValueError("interior evaluation requires 0 <= y <= 1")
    a = t.coeffs
    xf, yf = np.broadcast_arrays(x, y)
    k = basis.wavenumbers[1:]
    yy = yf.reshape(-1, 1)
    sr = _sinh_ratio(k[None, :], yy)
    cr = _cosh_ratio(k[None, :], yy)
    ang = np.outer(xf.ravel(), k)
    wx = (-np.sin(ang) * k[None, :] * sr) @ a[1:]
    wy = a[0] + (np.cos(ang) * k[None, :] * cr) @ a[1:]
    wx = wx.reshape(xf.shape)
    wy = wy.reshape(xf.shape)
    if wx.ndim == 0:
        return float(wx), float(wy)
    return wx, wy
