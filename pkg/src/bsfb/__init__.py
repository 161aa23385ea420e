"""Feedback-effect nonlinear Black-Scholes model.

Verification-grade implementation of the model's point-symmetry group, its
invariant reduction to branch ODEs, the complete exact-solution catalogue at
q = 4, and the numerical oracles (finite differences, adaptive integration,
manufactured-solution PDE runs) that validate every formula.
"""

from .closed_form import (
    SolutionBranch,
    cubic_lhs,
    cubic_roots_p,
    linear_families,
    u_families,
    v1,
    v2,
    v3,
    v_eval,
    v_plus,
    vz_plus,
    z_star,
)
from .model import ResidualReport, pde_residual, residual_sweep, u0_family, u0_uss
from .params import GroupElement, ModelParams, PointState, ReducedParams
from .pde_solver import Field, GridSpec, convergence_study, solve_validation, step_backward
from .reduction import (
    BranchId,
    BranchSign,
    Sheet,
    Trajectory,
    branch_rhs,
    curve_eval,
    curve_polynomial,
    drift_along,
    exceptional_residual,
    implicit_relation,
    integrate_branch,
    integrate_branch_general,
    p_from_vz,
    reduced_ode_residual,
    uniformize,
)
from .symmetry import (
    VectorField,
    generators,
    group_action,
    invariants,
    lie_bracket,
    transport_surface,
)

__version__ = "0.1.0"

__all__ = [
    "BranchId",
    "BranchSign",
    "Field",
    "GridSpec",
    "GroupElement",
    "ModelParams",
    "PointState",
    "ReducedParams",
    "ResidualReport",
    "Sheet",
    "SolutionBranch",
    "Trajectory",
    "VectorField",
    "branch_rhs",
    "convergence_study",
    "cubic_lhs",
    "cubic_roots_p",
    "curve_eval",
    "curve_polynomial",
    "drift_along",
    "exceptional_residual",
    "generators",
    "group_action",
    "implicit_relation",
    "integrate_branch",
    "integrate_branch_general",
    "invariants",
    "lie_bracket",
    "linear_families",
    "p_from_vz",
    "pde_residual",
    "reduced_ode_residual",
    "residual_sweep",
    "solve_validation",
    "step_backward",
    "transport_surface",
    "u0_family",
    "u0_uss",
    "u_families",
    "uniformize",
    "v1",
    "v2",
    "v3",
    "v_eval",
    "v_plus",
    "vz_plus",
    "z_star",
]
