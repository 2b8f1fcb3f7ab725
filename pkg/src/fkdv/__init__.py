"""Group analysis of fifth-order KdV equations with time-dependent coefficients.

u_t + u u_x + alpha(t) u + beta(t) u_xxxxx = 0

Submodules: exprcalc (coefficient parsing and calculus), equivalence
(coefficient transformations and reducibility), symmetry (Lie classification),
reduction (similarity reductions), elliptic (Jacobi cn / K), exactsol (the
quartic-cn family), pdesolve (pseudospectral solver and residual oracles),
cli (command-line front end).
"""

__version__ = "0.1.0"

from .elliptic import elliptic_K, jacobi_cn, jacobi_sn_cn_dn
from .equivalence import (
    EquationSpec,
    EquivalenceTransform,
    MobiusEquivalence,
    ReducibilityReport,
    TransformChain,
    gauge_to_alpha_zero,
    is_reducible_to_constant,
    map_to_constant,
)
from .exactsol import Cn4Params, cn4_equation, cn4_field
from .exprcalc import SmoothFn, diff, eval_expr, parse, to_text
from .pdesolve import (
    BlowUpError,
    Field,
    Grid1D,
    SolverConfig,
    callable_residual,
    solve,
    spectral_residual,
    step,
)
from .reduction import (
    SubalgebraSpec,
    build_reduction,
    degenerate_solution,
    integrate_reduced,
    optimal_system,
    reconstruct,
)
from .symmetry import (
    ClassificationResult,
    Generator,
    InconclusiveRankError,
    classify,
    classifying_nullspace,
    determining_residuals,
    kernel_algebra,
    ungauged_basis,
    verify_invariance_by_flow,
)

__all__ = [
    "BlowUpError", "ClassificationResult", "Cn4Params", "EquationSpec",
    "EquivalenceTransform", "Field", "Generator", "Grid1D",
    "InconclusiveRankError", "MobiusEquivalence", "ReducibilityReport",
    "SmoothFn", "SolverConfig", "SubalgebraSpec", "TransformChain",
    "build_reduction", "callable_residual", "classify", "classifying_nullspace",
    "cn4_equation", "cn4_field", "degenerate_solution", "determining_residuals",
    "diff", "elliptic_K", "eval_expr", "gauge_to_alpha_zero", "integrate_reduced",
    "is_reducible_to_constant", "jacobi_cn", "jacobi_sn_cn_dn", "kernel_algebra",
    "map_to_constant", "optimal_system", "parse", "reconstruct", "solve",
    "spectral_residual", "step", "to_text", "ungauged_basis",
    "verify_invariance_by_flow",
]
