"""Two-grid solver with a damped additive vertex-star Schwarz smoother.

Target problem: (grad u, grad v) + gamma (div u, div v) = (1, v) on the unit
square/cube, which becomes nearly singular as gamma grows.  The smoother
solves the operator restricted to every vertex-star patch (all dofs whose
basis function is supported inside the star) and sums the corrections with
damping 1/(d+1); the V-cycle adds a coarse-grid correction through nodal
prolongation and is symmetric, hence admissible as a CG preconditioner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as dla
import scipy.sparse as sp

from .fem import (
    FunctionSpace,
    assemble_constant_load,
    assemble_divdiv,
    assemble_grad,
    build_space,
    prolongation,
)
from .linalg import CholeskyFactor, factorize_spd, pcg
from .mesh import nested_pair


@dataclass
class ElasticityConfig:
    family: str
    coarse_n: int
    refinements: int
    degree: int
    gamma: float
    rtol: float = 1e-8
    max_iterations: int = 2000

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")


@dataclass
class SolveReport:
    cg_iterations: int
    converged: bool
    final_relative_residual: float
    residual_history: np.ndarray
    fine_dofs: int
    coarse_dofs: int
    config: ElasticityConfig | None = None


class PatchDecomposition:
    """Vertex-star patches with factorized local operators.

    ``patches`` holds (interior-dof index array, dense Cholesky factor) pairs;
    empty patches are skipped at construction.
    """

    def __init__(self, patches, damping: float, n: int):
        self.patches = patches
        self.damping = damping
        self.n = n


def build_patches(space: FunctionSpace, operator: sp.spmatrix) -> PatchDecomposition:
    """One patch per mesh vertex; operator must live on the interior dofs.

    A dof belongs to the patch of vertex v iff v is a vertex of the carrier
    simplex of its Lagrange node, which is exactly the support condition
    supp(basis) inside star(v).
    """
    mesh = space.mesh
    d = space.components
    per_vertex: list[list[int]] = [[] for _ in range(mesh.num_vertices)]
    for node, carrier in enumerate(space.node_carriers):
        if space.node_on_boundary[node]:
            continue
        for v in carrier:
            per_vertex[v].append(node)

    op = operator.tocsr()
    patches = []
    for v in range(mesh.num_vertices):
        nodes = per_vertex[v]
        if not nodes:
            continue
        dofs = np.array(
            [space._reduced_pos[n * d + c] for n in nodes for c in range(d)],
            dtype=np.int64,
        )
        local = op[dofs][:, dofs].toarray()
        patches.append((dofs, dla.cho_factor(local)))
    return PatchDecomposition(patches, damping=1.0 / (mesh.dim + 1), n=op.shape[0])


def schwarz_apply(patches: PatchDecomposition, residual: np.ndarray) -> np.ndarray:
    """Damped additive Schwarz correction: (1/M) sum_j R_j^T A_j^{-1} R_j r."""
    corr = np.zeros_like(residual)
    for dofs, factor in patches.patches:
        corr[dofs] += dla.cho_solve(factor, residual[dofs])
    corr *= patches.damping
    return corr


def two_grid_cycle(
    fine_op: sp.spmatrix,
    coarse_factor: CholeskyFactor,
    prolong: sp.spmatrix,
    patches: PatchDecomposition,
    rhs: np.ndarray,
    x: np.ndarray | None = None,
) -> np.ndarray:
    """Symmetric V(1,1) two-grid cycle: smooth, coarse-correct, smooth."""
    x = np.zeros_like(rhs) if x is None else np.array(x, dtype=float)
    x += schwarz_apply(patches, rhs - fine_op @ x)
    r = rhs - fine_op @ x
    x += prolong @ coarse_factor.solve(prolong.T @ r)
    x += schwarz_apply(patches, rhs - fine_op @ x)
    return x


def _operator(space: FunctionSpace, gamma: float) -> sp.csr_matrix:
    a = assemble_grad(space, reduce=True)
    if gamma == 0.0:
        return a
    b = assemble_divdiv(space, reduce=True)
    return (a + gamma * b).tocsr()


def solve_elasticity(config: ElasticityConfig) -> SolveReport:
    """CG on the grad-div problem, preconditioned by the two-grid cycle."""
    coarse_mesh, fine_mesh = nested_pair(config.family, config.coarse_n, config.refinements)
    coarse_space = build_space(coarse_mesh, config.degree)
    fine_space = build_space(fine_mesh, config.degree)

    fine_op = _operator(fine_space, config.gamma)
    coarse_factor = factorize_spd(_operator(coarse_space, config.gamma))
    prolong = prolongation(coarse_space, fine_space)
    patches = build_patches(fine_space, fine_op)
    rhs = assemble_constant_load(fine_space, 1.0, reduce=True)

    def prec(r: np.ndarray) -> np.ndarray:
        return two_grid_cycle(fine_op, coarse_factor, prolong, patches, r)

    x, iters, history = pcg(
        fine_op, prec, rhs, rtol=config.rtol, maxit=config.max_iterations
    )
    rel = history[-1] / history[0] if history[0] > 0 else 0.0
    return SolveReport(
        cg_iterations=iters,
        converged=bool(rel <= config.rtol),
        final_relative_residual=float(rel),
        residual_history=history,
        fine_dofs=fine_space.interior_dofs.size,
        coarse_dofs=coarse_space.interior_dofs.size,
        config=config,
    )
