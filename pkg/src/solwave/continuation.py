"""Newton corrector and pseudo-arclength branch tracer.

Branches start from the small-amplitude sech^2 seed at eps0 below the
critical speed, are corrected by damped Newton at fixed alpha, then traced
by a secant predictor / bordered corrector in the weighted space
(coefficients, 10*alpha).  Steps adapt to corrector effort; the run stops
when a blow-up monitor crosses its threshold (the desk-scale proxy for the
analytic alternatives), when the step collapses, on a sign flip of the
dynamic-condition branch, or at the step budget.

The Newton linear solves act on the (N+1)-mode projected system with
dense partial-pivot LU; convergence is measured on the nodal residual
sup-norm, so a converged point certifies the dynamic condition at the 2x
oversampled collocation nodes, not just in the retained modes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
import scipy.linalg

from . import diagnostics as diag
from .asymptotics import seed_alpha, seed_profile
from .strip_harmonics import ModeBasis, SurfaceTrace
from .wave_operator import (
    Parameters,
    ReducedState,
    jacobian,
    residual,
    surface_fields,
)

__all__ = [
    "ALPHA_WEIGHT",
    "NewtonSettings",
    "MonitorThresholds",
    "BranchConfig",
    "ArclengthConstraint",
    "Prediction",
    "BranchPoint",
    "Branch",
    "StepEvent",
    "TerminationReason",
    "NewtonDivergenceError",
    "SingularJacobianError",
    "TrivialBranchError",
    "newton_solve",
    "arclength_step",
    "run_branch",
    "nodal_check",
]

# arclength norm weights: coefficients 1, alpha 10 (balances sensitivities
# near folds where alpha turns around)
ALPHA_WEIGHT = 10.0

_TRIVIAL_NORM = 1e-8
_PIVOT_FLOOR = 1e-14

nodal_check = diag.nodal_check  # runtime branch check lives with diagnostics


class NewtonDivergenceError(RuntimeError):
    """Residual would not decrease under full backtracking."""


class SingularJacobianError(RuntimeError):
    """LU pivot below 1e-14 relative to the largest pivot."""


class TrivialBranchError(RuntimeError):
    """Continuation collapsed onto the laminar family (contains no waves)."""


@dataclass(frozen=True)
class NewtonSettings:
    tol_residual: float = 1e-10   # sup-norm over collocation nodes
    max_iter: int = 25
    damping: float = 0.5          # backtracking shrink factor in (0,1)
    polish_iters: int = 1         # extra full steps after convergence

    def __post_init__(self):
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must lie in (0,1)")
        if self.polish_iters < 0:
            raise ValueError("polish_iters must be >= 0")


@dataclass(frozen=True)
class MonitorThresholds:
    m_min: float = 1e-2        # stop when min(m1, m2) falls below
    alpha_min: float = 1e-3    # stop when alpha falls below (F blows up)
    froude_max: float = 1e3    # equivalent cap on F, kept for config clarity


@dataclass(frozen=True)
class BranchConfig:
    gamma: float
    eps0: float = 0.01
    basis_L: float = 64.0
    basis_N: int = 256
    newton: NewtonSettings = NewtonSettings()
    h0: float = 0.05
    h_min: float = 1e-8
    h_max: float = 1.0
    max_steps: int = 400
    thresholds: MonitorThresholds = MonitorThresholds()
    scan_stagnation: bool = False  # per-point stagnation scans are optional

    def __post_init__(self):
        if not (self.eps0 > 0 and self.eps0 < 1.0 - self.gamma):
            raise ValueError("eps0 must lie in (0, alpha_cr)")
        if not (0 < self.h_min <= self.h0 <= self.h_max):
            raise ValueError("need 0 < h_min <= h0 <= h_max")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")


class TerminationReason(enum.Enum):
    MONITOR_BLOWUP_M1 = "monitor_blowup_m1"
    MONITOR_BLOWUP_M2 = "monitor_blowup_m2"
    MONITOR_BLOWUP_M3 = "monitor_blowup_m3"
    STEP_COLLAPSE = "step_collapse"
    MAX_STEPS = "max_steps"
    NEWTON_DIVERGENCE = "newton_divergence"
    SIGN_FLIP = "sign_flip"

    @property
    def is_clean(self) -> bool:
        """Monitor blow-up and step-budget exits are successful outcomes."""
        return self in (
            TerminationReason.MONITOR_BLOWUP_M1,
            TerminationReason.MONITOR_BLOWUP_M2,
            TerminationReason.MONITOR_BLOWUP_M3,
            TerminationReason.MAX_STEPS,
        )


@dataclass(frozen=True)
class ArclengthConstraint:
    """Pseudo-arclength condition <t, u - u_base>_W = h.

    t is the (weighted-unit) tangent, u = (coeffs, alpha), and the inner
    product weighs alpha by ALPHA_WEIGHT^2.
    """

    tangent_coeffs: np.ndarray
    tangent_alpha: float
    base_coeffs: np.ndarray
    base_alpha: float
    step: float

    def value(self, coeffs: np.ndarray, alpha: float) -> float:
        return (
            float(np.dot(self.tangent_coeffs, coeffs - self.base_coeffs))
            + ALPHA_WEIGHT ** 2 * self.tangent_alpha * (alpha - self.base_alpha)
            - self.step
        )


def weighted_norm(dcoeffs: np.ndarray, dalpha: float) -> float:
    return float(np.sqrt(np.dot(dcoeffs, dcoeffs) + (ALPHA_WEIGHT * dalpha) ** 2))


def _lu_solve_checked(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    d = np.abs(np.diag(lu))
    if d.size == 0 or np.max(d) == 0.0 or np.min(d) < _PIVOT_FLOOR * np.max(d):
        raise SingularJacobianError(
            f"pivot ratio {np.min(d) / max(np.max(d), 1e-300):.2e} below {_PIVOT_FLOOR:g}"
        )
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def newton_solve(initial: ReducedState, settings: NewtonSettings,
                 constraint: Optional[ArclengthConstraint] = None):
    """Damped Newton iteration for the projected residual equations.

    Without a constraint, alpha is held fixed and only the trace
    coefficients move.  With an ArclengthConstraint, the bordered system
    (projected residual; arclength condition) is solved for (coeffs,
    alpha) jointly.  Returns (state, iterations).

    Raises NewtonDivergenceError when backtracking cannot reduce the
    merit (nodal residual sup-norm plus constraint violation), and
    SingularJacobianError on a degenerate linear solve.
    """
    basis = initial.basis
    proj = basis.project
    state = initial

    def merit(st: ReducedState, r: np.ndarray) -> float:
        m = float(np.max(np.abs(r)))
        if constraint is not None:
            m += abs(constraint.value(st.w1.coeffs, st.params.alpha))
        return m

    def converged(st: ReducedState, r: np.ndarray) -> bool:
        if float(np.max(np.abs(r))) > settings.tol_residual:
            return False
        if constraint is not None:
            c = abs(constraint.value(st.w1.coeffs, st.params.alpha))
            return c <= 1e-10 * max(1.0, abs(constraint.step))
        return True

    def newton_step(st: ReducedState):
        f = surface_fields(st)
        J, dr_da = jacobian(st, f)
        Jp = proj @ J
        rp = proj @ residual(st, f)
        if constraint is None:
            return _lu_solve_checked(Jp, -rp), 0.0
        n = basis.N + 1
        A = np.empty((n + 1, n + 1))
        A[:n, :n] = Jp
        A[:n, n] = proj @ dr_da
        A[n, :n] = constraint.tangent_coeffs
        A[n, n] = ALPHA_WEIGHT ** 2 * constraint.tangent_alpha
        rhs = np.empty(n + 1)
        rhs[:n] = -rp
        rhs[n] = -constraint.value(st.w1.coeffs, st.params.alpha)
        delta = _lu_solve_checked(A, rhs)
        return delta[:n], float(delta[n])

    def advanced(st: ReducedState, d_coeffs, d_alpha, lam):
        return ReducedState(
            SurfaceTrace(st.w1.coeffs + lam * d_coeffs),
            st.params.with_alpha(st.params.alpha + lam * d_alpha),
            basis,
        )

    def polish(st: ReducedState, r: np.ndarray):
        # extra full steps drive the residual toward the truncation floor,
        # which keeps tail-sensitive diagnostics (nodal check, identity
        # residuals) out of the noise
        for _ in range(settings.polish_iters):
            try:
                d_coeffs, d_alpha = newton_step(st)
            except SingularJacobianError:
                break
            trial = advanced(st, d_coeffs, d_alpha, 1.0)
            r_t = residual(trial)
            if not np.all(np.isfinite(r_t)):
                break
            if float(np.max(np.abs(r_t))) >= float(np.max(np.abs(r))):
                break
            st, r = trial, r_t
        return st

    r = residual(state)
    if not np.all(np.isfinite(r)):
        raise NewtonDivergenceError("non-finite residual at initial state")
    if converged(state, r):
        return polish(state, r), 0
    m_cur = merit(state, r)
    slow_iters = 0

    for it in range(1, settings.max_iter + 1):
        d_coeffs, d_alpha = newton_step(state)
        lam = 1.0
        accepted = None
        for _ in range(12):
            trial = advanced(state, d_coeffs, d_alpha, lam)
            r_t = residual(trial)
            if np.all(np.isfinite(r_t)):
                m_t = merit(trial, r_t)
                if converged(trial, r_t) or m_t < m_cur:
                    accepted = (trial, r_t, m_t)
                    break
            lam *= settings.damping
        if accepted is None:
            raise NewtonDivergenceError(
                f"no residual decrease under backtracking at iteration {it}"
            )
        # stagnation near the truncation floor masquerades as slow progress;
        # cut it off instead of burning the iteration budget
        slow_iters = slow_iters + 1 if accepted[2] > 0.7 * m_cur else 0
        state, r, m_cur = accepted
        if converged(state, r):
            return polish(state, r), it
        if slow_iters >= 4:
            raise NewtonDivergenceError(
                f"residual stagnated at {m_cur:.3e} (iteration {it})"
            )

    raise NewtonDivergenceError(
        f"residual {m_cur:.3e} above tolerance after {settings.max_iter} iterations"
    )


@dataclass(frozen=True)
class BranchPoint:
    """A converged, accepted solution along the branch."""

    state: ReducedState
    s: float
    newton_iters: int
    residual_norm: float
    diagnostics: diag.DiagnosticsReport

    @property
    def alpha(self) -> float:
        return self.state.params.alpha

    @property
    def coeffs(self) -> np.ndarray:
        return self.state.w1.coeffs


@dataclass(frozen=True)
class Prediction:
    state: ReducedState
    constraint: ArclengthConstraint


def _tangent_from_jacobian(state: ReducedState):
    """Branch-start tangent from the implicit function theorem.

    Solves (proj J) v = -(proj dr/dalpha) for v = d coeffs/d alpha and
    orients the tangent so alpha decreases: along the local curve the
    amplitude grows as alpha drops below alpha_cr.
    """
    f = surface_fields(state)
    J, dr_da = jacobian(state, f)
    proj = state.basis.project
    v = _lu_solve_checked(proj @ J, -(proj @ dr_da))
    n = weighted_norm(v, 1.0)
    return -v / n, -1.0 / n


def arclength_step(current: BranchPoint, previous: Optional[BranchPoint],
                   h: float) -> Prediction:
    """Secant (or branch-start tangent) predictor with arclength constraint.

    The predicted point is current + h * tangent in the weighted space;
    the returned constraint pins the corrector to the hyperplane through
    the prediction orthogonal (in the weighted metric) to the tangent.
    """
    if previous is not None:
        dc = current.coeffs - previous.coeffs
        da = current.alpha - previous.alpha
        n = weighted_norm(dc, da)
        if n == 0.0:
            t_c, t_a = _tangent_from_jacobian(current.state)
        else:
            t_c, t_a = dc / n, da / n
    else:
        t_c, t_a = _tangent_from_jacobian(current.state)
    coeffs = current.coeffs + h * t_c
    alpha = current.alpha + h * t_a
    predicted = ReducedState(
        SurfaceTrace(coeffs), current.state.params.with_alpha(alpha),
        current.state.basis,
    )
    constraint = ArclengthConstraint(t_c, t_a, current.coeffs, current.alpha, h)
    return Prediction(predicted, constraint)


@dataclass(frozen=True)
class StepEvent:
    step: int
    h: float
    outcome: str     # "accepted", "reduced", "terminated"
    detail: str = ""


@dataclass
class Branch:
    """Ordered branch points plus the reason the trace stopped."""

    points: list
    reason: TerminationReason
    events: list = dc_field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _make_point(state: ReducedState, s: float, iters: int,
                scan_stagnation: bool) -> BranchPoint:
    f = surface_fields(state)
    r = residual(state, f)
    report = diag.diagnostics_report(state, f, scan_stagnation=scan_stagnation)
    return BranchPoint(state, s, iters, float(np.max(np.abs(r))), report)


def _threshold_reason(point: BranchPoint, thr: MonitorThresholds):
    m = point.diagnostics.monitor
    if m.m1 < thr.m_min and m.m1 <= m.m2:
        return TerminationReason.MONITOR_BLOWUP_M1
    if m.m2 < thr.m_min:
        return TerminationReason.MONITOR_BLOWUP_M2
    if point.alpha < thr.alpha_min or point.state.params.froude > thr.froude_max:
        return TerminationReason.MONITOR_BLOWUP_M3
    return None


def run_branch(config: BranchConfig) -> Branch:
    """Trace the solution branch from the small-amplitude seed.

    Seeds at eps0 below critical, Newton-corrects at fixed alpha, then
    arclength-continues with adaptive steps.  Each accepted point records
    the full diagnostics battery.  Deterministic: rerunning the same
    config reproduces the branch bitwise.

    Raises TrivialBranchError if the corrector lands on the laminar
    family (the solution curve contains no trivial points), and
    propagates Newton failures for the seed itself.
    """
    basis = ModeBasis(config.basis_L, config.basis_N)
    params = Parameters(config.gamma, seed_alpha(config.gamma, config.eps0))
    seed = ReducedState(seed_profile(config.gamma, config.eps0, basis),
                        params, basis)
    state0, iters0 = newton_solve(seed, config.newton)
    if float(np.max(np.abs(state0.w1.coeffs))) < _TRIVIAL_NORM:
        raise TrivialBranchError("seed correction collapsed to the laminar flow")
    events: list = []
    points = [_make_point(state0, 0.0, iters0, config.scan_stagnation)]
    if config.max_steps == 0:
        return Branch(points, TerminationReason.MAX_STEPS, events)

    h = config.h0
    prev: Optional[BranchPoint] = None
    cur = points[0]
    accepted_steps = 0
    reason = TerminationReason.MAX_STEPS

    step = 0
    while step < config.max_steps:
        prediction = arclength_step(cur, prev, h)
        try:
            new_state, iters = newton_solve(prediction.state, config.newton,
                                            prediction.constraint)
        except (NewtonDivergenceError, SingularJacobianError) as err:
            events.append(StepEvent(step + 1, h, "reduced", str(err)))
            h *= 0.5
            if h < config.h_min:
                reason = (TerminationReason.STEP_COLLAPSE if accepted_steps
                          else TerminationReason.NEWTON_DIVERGENCE)
                events.append(StepEvent(step + 1, h, "terminated", reason.value))
                break
            continue

        step += 1
        accepted_steps += 1
        sup_w1 = float(np.max(np.abs(basis.values(new_state.w1.coeffs))))
        if step > 5 and sup_w1 < _TRIVIAL_NORM:
            raise TrivialBranchError(
                f"branch returned to the laminar family at step {step}"
            )
        point = _make_point(new_state, cur.s + h, iters, config.scan_stagnation)
        points.append(point)
        events.append(StepEvent(step, h, "accepted",
                                f"iters={iters} alpha={point.alpha:.6g}"))

        fields = surface_fields(new_state)
        if float(np.min(fields.dyn)) <= 0.0:
            reason = TerminationReason.SIGN_FLIP
            events.append(StepEvent(step, h, "terminated", reason.value))
            break
        stop = _threshold_reason(point, config.thresholds)
        if stop is not None:
            reason = stop
            events.append(StepEvent(step, h, "terminated", reason.value))
            break

        prev, cur = cur, point
        if iters <= 4:
            h = min(h * 1.5, config.h_max)
        elif iters >= 8:
            h = max(h * 0.5, config.h_min)

    return Branch(points, reason, events)
