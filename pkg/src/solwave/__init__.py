"""Solitary gravity waves with constant vorticity on a conformal strip.

A spectral solver and pseudo-arclength continuation engine for the
fixed-strip elliptic-system formulation of steady solitary water waves,
together with numerical checks of every analytic identity the formulation
carries (flow-force invariance, conjugate flows, supercriticality, the
dispersion relation, the boundary ellipticity constant, nodal
monotonicity, and the small-amplitude sech^2 asymptotics).
"""

from .asymptotics import (
    dispersion_root,
    explicit_homoclinic,
    explicit_homoclinic_slope,
    integrate_reduced_ode,
    reduced_ode_rhs,
    seed_alpha,
    seed_profile,
)
from .continuation import (
    Branch,
    BranchConfig,
    BranchPoint,
    MonitorThresholds,
    NewtonDivergenceError,
    NewtonSettings,
    SingularJacobianError,
    TerminationReason,
    TrivialBranchError,
    arclength_step,
    newton_solve,
    run_branch,
)
from .diagnostics import (
    DiagnosticsReport,
    PhysicalSurface,
    conjugate_depth,
    d_critical,
    diagnostics_report,
    flow_force,
    flow_force_spread,
    integral_identity_check,
    nodal_check,
    phi_surface_check,
    psi_bound_check,
    qhat,
    reconstruct_surface,
    shat,
    stagnation_scan,
    velocity,
)
from .persistence import load_solution, save_solution
from .strip_harmonics import (
    ModeBasis,
    SurfaceTrace,
    dtn_apply,
    dtn_symbol,
    evaluate_gradient_interior,
    evaluate_interior,
    trace_x_derivative,
)
from .wave_operator import (
    Parameters,
    ReducedState,
    complementing_identity,
    eliminate_w2,
    is_admissible,
    jacobian,
    lopatinskii_constant,
    monitor,
    residual,
)

__version__ = "0.1.0"
