"""Inf-sup constants for divergence-constrained Lagrange spaces and
gamma-robust vertex-star two-grid solvers on structured simplicial meshes."""

from .fem import (
    FunctionSpace,
    assemble_constant_load,
    assemble_divdiv,
    assemble_grad,
    build_space,
    divergence_norm_sq,
    eval_in_cell,
    interpolate,
    prolongation,
)
from .infsup import (
    InfSupConfig,
    InfSupReport,
    PencilOperators,
    PowerState,
    estimate_infsup,
    initialize,
    power_step,
    project_kernel,
)
from .linalg import (
    CholeskyFactor,
    DenseEig,
    IndefiniteOperatorError,
    dense_generalized_eig,
    factorize_spd,
    infsup_oracle,
    kernel_basis,
    a_orthogonal_complement,
    pcg,
)
from .mesh import Mesh, VertexStar, build_mesh, nested_pair
from .multigrid import (
    ElasticityConfig,
    PatchDecomposition,
    SolveReport,
    build_patches,
    schwarz_apply,
    solve_elasticity,
    two_grid_cycle,
)
from .quadrature import QuadratureRule, simplex_rule

__version__ = "0.1.0"

__all__ = [
    "Mesh",
    "VertexStar",
    "build_mesh",
    "nested_pair",
    "QuadratureRule",
    "simplex_rule",
    "FunctionSpace",
    "build_space",
    "assemble_grad",
    "assemble_divdiv",
    "assemble_constant_load",
    "divergence_norm_sq",
    "interpolate",
    "eval_in_cell",
    "prolongation",
    "CholeskyFactor",
    "factorize_spd",
    "pcg",
    "DenseEig",
    "dense_generalized_eig",
    "kernel_basis",
    "a_orthogonal_complement",
    "infsup_oracle",
    "IndefiniteOperatorError",
    "InfSupConfig",
    "InfSupReport",
    "PowerState",
    "PencilOperators",
    "initialize",
    "power_step",
    "project_kernel",
    "estimate_infsup",
    "ElasticityConfig",
    "SolveReport",
    "PatchDecomposition",
    "build_patches",
    "schwarz_apply",
    "two_grid_cycle",
    "solve_elasticity",
]
