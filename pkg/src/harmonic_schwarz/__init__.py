"""Sharp growth bounds for harmonic mappings between real unit balls.

The package solves the Lagrange moment system attached to a prescribed
center value, builds the extremal boundary map, evaluates its harmonic
extension, and exposes the resulting sharp directional bounds together
with the convex envelope of the image of a closed ball.  A discretized
convex program and mean-value probes provide independent verification.
"""

from .acceptance import CRITERIA, CriterionResult, run_suite
from .bounds import (
    BoundResult,
    RegionEnvelope,
    axis_bound,
    classical_bound,
    direction_family,
    directional_bound,
    envelope_to_json,
    region_envelope,
)
from .errors import OracleError, QuadratureError, SolverError
from .linalg import (
    BorderedMatrixSpec,
    bordered_dense,
    bordered_det,
    cramer_ratio,
    rotation_to_pole,
    taylor_gap,
)
from .mapping import (
    BoundaryMap,
    MapEvaluation,
    boundary_map,
    constant_map,
    constraint_residuals,
    eval_batch,
    eval_general,
    eval_on_axis,
)
from .oracle import (
    AdmissibleMixture,
    DiscretizedProgram,
    admissible_mixture,
    build_program,
    discretized_max,
    discretized_max_sphere,
    jacobian_fd_check,
    mean_value_residual,
)
from .solver import (
    LagrangeSolution,
    ProblemSpec,
    field_A,
    jacobian_RI,
    kernel_inverse,
    kernel_profile,
    lambda_path_point,
    moments_RI,
    moments_Rcal,
    solve_positive_b,
    solve_zero_b,
)
from .sphere import (
    BiaxialRule,
    QuadratureRule,
    biaxial_integrate,
    biaxial_rule,
    poisson_kernel,
    sample_sphere,
    zonal_integrate,
    zonal_rule,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleMixture",
    "BiaxialRule",
    "BorderedMatrixSpec",
    "BoundResult",
    "BoundaryMap",
    "CRITERIA",
    "CriterionResult",
    "DiscretizedProgram",
    "LagrangeSolution",
    "MapEvaluation",
    "OracleError",
    "ProblemSpec",
    "QuadratureError",
    "QuadratureRule",
    "RegionEnvelope",
    "SolverError",
    "admissible_mixture",
    "axis_bound",
    "biaxial_integrate",
    "biaxial_rule",
    "bordered_dense",
    "bordered_det",
    "boundary_map",
    "build_program",
    "classical_bound",
    "constant_map",
    "constraint_residuals",
    "cramer_ratio",
    "direction_family",
    "directional_bound",
    "discretized_max",
    "discretized_max_sphere",
    "envelope_to_json",
    "eval_batch",
    "eval_general",
    "eval_on_axis",
    "field_A",
    "jacobian_RI",
    "jacobian_fd_check",
    "kernel_inverse",
    "kernel_profile",
    "lambda_path_point",
    "mean_value_residual",
    "moments_RI",
    "moments_Rcal",
    "poisson_kernel",
    "region_envelope",
    "rotation_to_pole",
    "run_suite",
    "sample_sphere",
    "solve_positive_b",
    "solve_zero_b",
    "taylor_gap",
    "zonal_integrate",
    "zonal_rule",
]
