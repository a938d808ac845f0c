"""Vector-valued continuous Lagrange spaces on simplicial meshes.

Degree-k spaces use the equispaced barycentric lattice as the nodal set; the
nodal basis is expressed in Bernstein polynomials (well-conditioned Vandermonde
at the lattice points).  Vector dofs are blocked per node, node-major and
component-minor.  Homogeneous Dirichlet conditions are imposed by elimination:
operators and right-hand sides can be reduced to the interior dofs.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh, barycentric_coordinates
from .quadrature import simplex_rule

_ASSEMBLY_CHUNK = 512  # cells per assembly batch; fixed order keeps runs bitwise identical


@lru_cache(maxsize=None)
def _lattice(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Barycentric integer multi-indices of the degree-k lattice, lex order."""
    pts = [
        beta + (degree - sum(beta),)
        for beta in itertools.product(range(degree + 1), repeat=dim)
        if sum(beta) <= degree
    ]
    # reorder so the tuple is (beta_0, ..., beta_d)
    pts = [tuple((p[-1],) + p[:-1]) for p in pts]
    return tuple(sorted(pts))


def _bernstein(lattice, lam: np.ndarray, degree: int) -> np.ndarray:
    """Bernstein basis values, shape (npts, len(lattice))."""
    out = np.empty((lam.shape[0], len(lattice)))
    for a, alpha in enumerate(lattice):
        coeff = math.factorial(degree)
        for ai in alpha:
            coeff //= math.factorial(ai)
        vals = float(coeff) * np.ones(lam.shape[0])
        for i, ai in enumerate(alpha):
            if ai:
                vals *= lam[:, i] ** ai
        out[:, a] = vals
    return out


class ReferenceElement:
    """Scalar Lagrange element on the reference simplex."""

    def __init__(self, dim: int, degree: int):
        self.dim = dim
        self.degree = degree
        self.lattice = _lattice(dim, degree)
        nodes = np.array(self.lattice, dtype=float) / degree
        vander = _bernstein(self.lattice, nodes, degree)
        self._coeff = np.linalg.inv(vander)  # Bernstein -> Lagrange transform

    @property
    def num_nodes(self) -> int:
        return len(self.lattice)

    def tabulate(self, lam: np.ndarray) -> np.ndarray:
        """Basis values at barycentric points, shape (npts, nb)."""
        return _bernstein(self.lattice, lam, self.degree) @ self._coeff

    def tabulate_grad(self, lam: np.ndarray) -> np.ndarray:
        """Reference-coordinate gradients, shape (npts, nb, dim).

        Reference coordinates are x_i = lambda_i, i = 1..dim.
        """
        k = self.degree
        if k == 0:
            return np.zeros((lam.shape[0], 1, self.dim))
        sub = _lattice(self.dim, k - 1)
        sub_pos = {alpha: i for i, alpha in enumerate(sub)}
        bsub = _bernstein(sub, lam, k - 1)
        nb = len(self.lattice)
        dbary = np.zeros((lam.shape[0], nb, self.dim + 1))
        for a, alpha in enumerate(self.lattice):
            for j in range(self.dim + 1):
                if alpha[j]:
                    down = list(alpha)
                    down[j] -= 1
                    dbary[:, a, j] = k * bsub[:, sub_pos[tuple(down)]]
        dref = dbary[:, :, 1:] - dbary[:, :, :1]
        return np.einsum("qnj,na->qaj", dref, self._coeff)


@lru_cache(maxsize=None)
def reference_element(dim: int, degree: int) -> ReferenceElement:
    return ReferenceElement(dim, degree)


def _interior_multiindices(nverts: int, degree: int) -> list[tuple[int, ...]]:
    """Multi-indices with all entries >= 1 summing to degree, lex order."""
    out = [
        beta
        for beta in itertools.product(range(1, degree), repeat=nverts)
        if sum(beta) == degree
    ]
    return sorted(out)


class FunctionSpace:
    """Degree-k vector Lagrange space with a global C0 dof enumeration."""

    def __init__(self, mesh: Mesh, degree: int):
        if degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {degree}")
        self.mesh = mesh
        self.degree = degree
        self.components = mesh.dim
        self.element = reference_element(mesh.dim, degree)
        self._enumerate_nodes()
        self._classify_boundary()
        d = self.components
        self.num_dofs = self.num_scalar_nodes * d
        interior_nodes = ~self.node_on_boundary
        self.interior_dofs = np.nonzero(np.repeat(interior_nodes, d))[0]
        self._reduced_pos = np.full(self.num_dofs, -1, dtype=np.int64)
        self._reduced_pos[self.interior_dofs] = np.arange(self.interior_dofs.size)

    # -- dof enumeration -------------------------------------------------

    def _enumerate_nodes(self) -> None:
        mesh, k = self.mesh, self.degree
        dim = mesh.dim
        nv = mesh.num_vertices

        edge_nodes = max(k - 1, 0)
        edges = mesh.edges
        edge_index = {tuple(e): i for i, e in enumerate(edges)}
        offset_edges = nv

        face_list = _interior_multiindices(3, k) if k >= 3 else []
        face_pos = {m: i for i, m in enumerate(face_list)}
        faces = mesh.faces if dim == 3 else np.zeros((0, 3), dtype=np.int64)
        face_index = {tuple(f): i for i, f in enumerate(faces)}
        offset_faces = offset_edges + len(edges) * edge_nodes

        cell_list = _interior_multiindices(dim + 1, k) if k >= dim + 1 else []
        cell_pos = {m: i for i, m in enumerate(cell_list)}
        offset_cells = offset_faces + len(faces) * len(face_list)

        total = offset_cells + mesh.num_cells * len(cell_list)
        coords = np.zeros((total, dim))
        coords[:nv] = mesh.vertices
        carriers: list[tuple[int, ...]] = [(int(v),) for v in range(nv)]
        carriers.extend([()] * (total - nv))

        for ei, (u, v) in enumerate(edges):
            for t in range(1, k):
                nid = offset_edges + ei * edge_nodes + (t - 1)
                coords[nid] = ((k - t) * mesh.vertices[u] + t * mesh.vertices[v]) / k
                carriers[nid] = (int(u), int(v))
        for fi, f in enumerate(faces):
            for mi, m in enumerate(face_list):
                nid = offset_faces + fi * len(face_list) + mi
                coords[nid] = (np.array(m) @ mesh.vertices[list(f)]) / k
                carriers[nid] = tuple(int(x) for x in f)
        for ci, cell in enumerate(mesh.cells):
            srt = np.sort(cell)
            for mi, m in enumerate(cell_list):
                nid = offset_cells + ci * len(cell_list) + mi
                coords[nid] = (np.array(m) @ mesh.vertices[srt]) / k
                carriers[nid] = tuple(int(x) for x in srt)

        # per-cell scalar node map in local lattice order
        lattice = self.element.lattice
        cell_nodes = np.empty((mesh.num_cells, len(lattice)), dtype=np.int64)
        for ci, cell in enumerate(mesh.cells):
            for li, beta in enumerate(lattice):
                nz = [i for i in range(dim + 1) if beta[i]]
                if len(nz) == 1:
                    cell_nodes[ci, li] = cell[nz[0]]
                    continue
                gverts = [int(cell[i]) for i in nz]
                order = np.argsort(gverts)
                key = tuple(sorted(gverts))
                sub = tuple(beta[nz[j]] for j in order)
                if len(nz) == 2:
                    t = sub[1]
                    cell_nodes[ci, li] = (
                        offset_edges + edge_index[key] * edge_nodes + (t - 1)
                    )
                elif len(nz) == 3 and dim == 3:
                    cell_nodes[ci, li] = (
                        offset_faces + face_index[key] * len(face_list) + face_pos[sub]
                    )
                else:
                    cell_nodes[ci, li] = (
                        offset_cells + ci * len(cell_list) + cell_pos[sub]
                    )

        self.num_scalar_nodes = total
        self.node_coords = coords
        self.node_carriers = carriers
        self.cell_nodes = cell_nodes

    def _classify_boundary(self) -> None:
        mesh = self.mesh
        boundary_sub: set[tuple[int, ...]] = set()
        for facet in mesh.boundary_facets:
            for r in range(1, len(facet) + 1):
                boundary_sub.update(itertools.combinations(facet, r))
        flags = np.zeros(self.num_scalar_nodes, dtype=bool)
        for nid, carrier in enumerate(self.node_carriers):
            if len(carrier) <= mesh.dim and carrier in boundary_sub:
                flags[nid] = True
        self.node_on_boundary = flags

    # -- vector dof helpers ----------------------------------------------

    @property
    def cell_dof_map(self) -> np.ndarray:
        """Global vector dofs per cell, shape (ncells, nb*components)."""
        d = self.components
        return (self.cell_nodes[:, :, None] * d + np.arange(d)).reshape(
            self.mesh.num_cells, -1
        )

    def restrict(self, full: np.ndarray) -> np.ndarray:
        """Drop boundary dofs from a full-length vector."""
        return np.asarray(full)[self.interior_dofs]

    def extend(self, interior: np.ndarray) -> np.ndarray:
        """Zero-pad an interior-dof vector back to full length."""
        full = np.zeros(self.num_dofs)
        full[self.interior_dofs] = interior
        return full

    def __repr__(self) -> str:
        return (
            f"FunctionSpace(mesh={self.mesh!r}, degree={self.degree}, "
            f"dofs={self.num_dofs}, interior={self.interior_dofs.size})"
        )


def build_space(mesh: Mesh, degree: int) -> FunctionSpace:
    return FunctionSpace(mesh, degree)


# -- assembly ------------------------------------------------------------


def _geometry(space: FunctionSpace):
    mesh = space.mesh
    x = mesh.vertices[mesh.cells]
    jac = (x[:, 1:, :] - x[:, :1, :]).transpose(0, 2, 1)
    det = np.linalg.det(jac)
    if (det <= 0).any():
        raise ValueError("mesh contains non-positively oriented cells")
    inv = np.linalg.inv(jac)
    return det, inv


def _quad_and_tab(space: FunctionSpace, quad_degree: int | None):
    if quad_degree is None:
        quad_degree = 2 * space.degree  # 2k-2 needed; +2 margin
    rule = simplex_rule(space.mesh.dim, quad_degree)
    vals = space.element.tabulate(rule.points)
    dref = space.element.tabulate_grad(rule.points)
    return rule, vals, dref


def _assemble_bilinear(space: FunctionSpace, kind: str, reduce: bool, quad_degree):
    rule, _, dref = _quad_and_tab(space, quad_degree)
    det, inv = _geometry(space)
    d = space.components
    nb = space.element.num_nodes
    ndof = space.num_dofs
    cdofs = space.cell_dof_map
    eye = np.eye(d)

    total = sp.csr_matrix((ndof, ndof))
    nc = space.mesh.num_cells
    for start in range(0, nc, _ASSEMBLY_CHUNK):
        sl = slice(start, min(start + _ASSEMBLY_CHUNK, nc))
        grad = np.einsum("qnj,cjm->cqnm", dref, inv[sl])
        if kind == "grad":
            kloc = np.einsum("q,c,cqim,cqjm->cij", rule.weights, det[sl], grad, grad)
            loc = np.einsum("cij,mn->cimjn", kloc, eye)
        else:  # div-div
            loc = np.einsum("q,c,cqim,cqjn->cimjn", rule.weights, det[sl], grad, grad)
        loc = loc.reshape(-1, nb * d, nb * d)
        loc = 0.5 * (loc + loc.transpose(0, 2, 1))  # bitwise-symmetric local blocks
        rows = np.repeat(cdofs[sl], nb * d, axis=1).ravel()
        cols = np.tile(cdofs[sl], (1, nb * d)).ravel()
        total = total + sp.coo_matrix(
            (loc.ravel(), (rows, cols)), shape=(ndof, ndof)
        ).tocsr()

    if reduce:
        idx = space.interior_dofs
        total = total[idx][:, idx].tocsr()
    total.sum_duplicates()
    return total


def assemble_grad(space: FunctionSpace, reduce: bool = True, quad_degree: int | None = None):
    """Stiffness matrix of the full-gradient form, SPD on interior dofs."""
    return _assemble_bilinear(space, "grad", reduce, quad_degree)


def assemble_divdiv(space: FunctionSpace, reduce: bool = True, quad_degree: int | None = None):
    """Symmetric positive-semidefinite div-div matrix; v^T B v = ||div v||^2."""
    return _assemble_bilinear(space, "divdiv", reduce, quad_degree)


def assemble_constant_load(space: FunctionSpace, value: float, reduce: bool = True) -> np.ndarray:
    """Load vector of (value, v), the constant applied to every component."""
    rule, vals, _ = _quad_and_tab(space, None)
    det, _ = _geometry(space)
    d = space.components
    cell_int = value * np.einsum("q,c,qi->ci", rule.weights, det, vals)
    load = np.zeros(space.num_dofs)
    for comp in range(d):
        np.add.at(load, space.cell_nodes * d + comp, cell_int)
    return space.restrict(load) if reduce else load


def divergence_norm_sq(space: FunctionSpace, coeffs: np.ndarray) -> float:
    """||div v||^2 over the mesh by direct quadrature of (div v)^2.

    Definitionally equals v^T B v for the assembled div-div matrix, but sums
    pointwise squares, so near-divergence-free fields evaluate without the
    cancellation noise of the assembled quadratic form.
    """
    rule, _, dref = _quad_and_tab(space, None)
    det, inv = _geometry(space)
    d = space.components
    nb = space.element.num_nodes
    total = 0.0
    nc = space.mesh.num_cells
    cdofs = space.cell_dof_map
    for start in range(0, nc, _ASSEMBLY_CHUNK):
        sl = slice(start, min(start + _ASSEMBLY_CHUNK, nc))
        grad = np.einsum("qnj,cjm->cqnm", dref, inv[sl])
        local = coeffs[cdofs[sl]].reshape(-1, nb, d)
        div = np.einsum("cqim,cim->cq", grad, local)
        total += float(np.einsum("q,c,cq->", rule.weights, det[sl], div**2))
    return total


def interpolate(space: FunctionSpace, field) -> np.ndarray:
    """Nodal interpolant of a vector field.

    ``field`` maps an (n, dim) array of points to (n, dim) values.
    """
    vals = np.asarray(field(space.node_coords), dtype=float)
    if vals.shape != (space.num_scalar_nodes, space.components):
        raise ValueError(f"field returned shape {vals.shape}")
    return vals.ravel()


def eval_in_cell(space: FunctionSpace, coeffs: np.ndarray, cell: int, points: np.ndarray) -> np.ndarray:
    """Evaluate a full-dof coefficient vector inside one cell."""
    lam = barycentric_coordinates(space.mesh, cell, points)
    vals = space.element.tabulate(lam)
    local = coeffs[space.cell_dof_map[cell]].reshape(space.element.num_nodes, space.components)
    return vals @ local


# -- prolongation between nested spaces ----------------------------------


def prolongation(coarse: FunctionSpace, fine: FunctionSpace, tol: float = 1e-10) -> sp.csr_matrix:
    """Nodal-interpolation transfer matrix (fine interior x coarse interior).

    Requires equal degree and geometrically nested meshes; non-nested input is
    rejected by a containment test.
    """
    if coarse.degree != fine.degree:
        raise ValueError("prolongation requires equal polynomial degrees")
    cmesh, fmesh = coarse.mesh, fine.mesh

    fverts = fmesh.vertices
    vert_in = np.zeros((cmesh.num_cells, fmesh.num_vertices), dtype=bool)
    for ci in range(cmesh.num_cells):
        lam = barycentric_coordinates(cmesh, ci, fverts)
        vert_in[ci] = (lam >= -1e-9).all(axis=1)
    nested = vert_in[:, fmesh.cells].all(axis=2).any(axis=0)
    if not nested.all():
        raise ValueError("meshes are not nested: fine cells straddle coarse cells")

    npts = fine.num_scalar_nodes
    assigned = np.zeros(npts, dtype=bool)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for ci in range(cmesh.num_cells):
        todo = np.nonzero(~assigned)[0]
        if todo.size == 0:
            break
        lam = barycentric_coordinates(cmesh, ci, fine.node_coords[todo])
        inside = (lam >= -tol).all(axis=1)
        sel = todo[inside]
        if sel.size == 0:
            continue
        basis = coarse.element.tabulate(lam[inside])
        basis[np.abs(basis) < 1e-14] = 0.0
        cnodes = coarse.cell_nodes[ci]
        r = np.repeat(sel, cnodes.size)
        c = np.tile(cnodes, sel.size)
        rows.append(r)
        cols.append(c)
        vals.append(basis.ravel())
        assigned[sel] = True
    if not assigned.all():
        raise ValueError("some fine nodes were not located in the coarse mesh")

    p_scalar = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(npts, coarse.num_scalar_nodes),
    ).tocsr()
    p_scalar.eliminate_zeros()
    p_vec = sp.kron(p_scalar, sp.eye(fine.components), format="csr")
    return p_vec[fine.interior_dofs][:, coarse.interior_dofs].tocsr()
