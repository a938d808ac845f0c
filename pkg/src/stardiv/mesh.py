"""Structured simplicial meshes of the unit square/cube.

Three families are provided:

* ``type1``      -- N x N squares, each split by the SW-NE diagonal (2N^2 triangles),
* ``malkus``     -- N x N squares, each split by both diagonals through an added
                    center vertex (4N^2 triangles),
* ``freudenthal`` -- N x N x N cubes, each split into the 6 Kuhn path simplices
                    (6N^3 tetrahedra), with face diagonals consistent across cubes.

Vertices are numbered lexicographically by (z, y, x) grid index; Malkus center
vertices are appended after the grid vertices.  Meshes are immutable after
construction (the arrays are marked read-only) and safe to share across threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

FAMILIES = ("type1", "malkus", "freudenthal")


@dataclass(frozen=True)
class VertexStar:
    """All cells containing a given vertex."""

    vertex: int
    cells: tuple[int, ...]


class Mesh:
    """Simplicial complex with coordinates, cells and topology queries."""

    def __init__(self, family: str, n: int, vertices: np.ndarray, cells: np.ndarray):
        self.family = family
        self.n = n
        self.vertices = np.asarray(vertices, dtype=float)
        self.cells = np.asarray(cells, dtype=np.int64)
        self.dim = self.vertices.shape[1]
        self.vertices.setflags(write=False)
        self.cells.setflags(write=False)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]

    def cell_volumes(self) -> np.ndarray:
        """Signed volumes; positive for all cells by construction."""
        x = self.vertices[self.cells]
        edges = x[:, 1:, :] - x[:, :1, :]
        det = np.linalg.det(edges)
        fact = 2.0 if self.dim == 2 else 6.0
        return det / fact

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique vertex pairs (sorted within pair, lexicographically ordered)."""
        return self._subentities(2)

    @cached_property
    def faces(self) -> np.ndarray:
        """Unique vertex triples (3D only)."""
        if self.dim != 3:
            raise ValueError("faces are only defined for 3D meshes")
        return self._subentities(3)

    def _subentities(self, nverts: int) -> np.ndarray:
        combos = list(itertools.combinations(range(self.dim + 1), nverts))
        pieces = [np.sort(self.cells[:, c], axis=1) for c in combos]
        ents = np.vstack(pieces)
        return np.unique(ents, axis=0)

    @cached_property
    def facet_cells(self) -> dict[tuple[int, ...], list[int]]:
        """Map facet (sorted vertex tuple) -> cells containing it."""
        out: dict[tuple[int, ...], list[int]] = {}
        for ci, cell in enumerate(self.cells):
            for drop in range(self.dim + 1):
                facet = tuple(sorted(np.delete(cell, drop)))
                out.setdefault(facet, []).append(ci)
        return out

    @cached_property
    def boundary_facets(self) -> frozenset[tuple[int, ...]]:
        return frozenset(f for f, cs in self.facet_cells.items() if len(cs) == 1)

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        verts: set[int] = set()
        for f in self.boundary_facets:
            verts.update(f)
        return frozenset(verts)

    @cached_property
    def _vertex_cells(self) -> list[list[int]]:
        per_vertex: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for ci, cell in enumerate(self.cells):
            for v in cell:
                per_vertex[v].append(ci)
        return per_vertex

    def vertex_star(self, v: int) -> VertexStar:
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex index {v} out of range [0, {self.num_vertices})")
        return VertexStar(vertex=int(v), cells=tuple(self._vertex_cells[v]))

    def to_json(self) -> str:
        """Plain-text export: {family, n, vertices, cells}."""
        doc = {
            "family": self.family,
            "n": self.n,
            "vertices": self.vertices.tolist(),
            "cells": self.cells.tolist(),
        }
        return json.dumps(doc)

    def __repr__(self) -> str:
        return (
            f"Mesh(family={self.family!r}, n={self.n}, "
            f"vertices={self.num_vertices}, cells={self.num_cells})"
        )


def build_mesh(family: str, n: int) -> Mesh:
    """Build one of the structured families on [0,1]^d with n cells per axis."""
    if family not in FAMILIES:
        raise ValueError(f"unknown mesh family {family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValueError(f"subdivision parameter must be >= 1, got {n}")
    if family == "type1":
        return _build_type1(n)
    if family == "malkus":
        return _build_malkus(n)
    return _build_freudenthal(n)


def _grid_vertices_2d(n: int) -> np.ndarray:
    side = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(side, side, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


def _build_type1(n: int) -> Mesh:
    verts = _grid_vertices_2d(n)
    cells = []
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            b = a + 1
            c = a + n + 2
            d = a + n + 1
            # one SW-NE diagonal per square, CCW orientation
            cells.append((a, b, c))
            cells.append((a, c, d))
    return Mesh("type1", n, verts, np.array(cells))


def _build_malkus(n: int) -> Mesh:
    grid = _grid_vertices_2d(n)
    side = (np.arange(n) + 0.5) / n
    cx, cy = np.meshgrid(side, side, indexing="xy")
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    verts = np.vstack([grid, centers])
    nc0 = (n + 1) ** 2
    cells = []
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            b = a + 1
            c = a + n + 2
            d = a + n + 1
            m = nc0 + j * n + i
            cells += [(a, b, m), (b, c, m), (c, d, m), (d, a, m)]
    return Mesh("malkus", n, verts, np.array(cells))


def _build_freudenthal(n: int) -> Mesh:
    side = np.linspace(0.0, 1.0, n + 1)
    zz, yy, xx = np.meshgrid(side, side, side, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])

    def vid(i: int, j: int, k: int) -> int:
        return (k * (n + 1) + j) * (n + 1) + i

    # Kuhn subdivision: one path simplex per permutation of the axes, walking
    # from the low corner to the high corner of each cube.  Translation
    # invariance makes face diagonals agree across shared cube faces.
    perms = list(itertools.permutations(range(3)))
    cells = []
    for k in range(n):
        for j in range(n):
            for i in range(n):
                for perm in perms:
                    corner = np.array([i, j, k])
                    path = [corner.copy()]
                    for axis in perm:
                        corner = corner.copy()
                        corner[axis] += 1
                        path.append(corner)
                    tet = [vid(*p) for p in path]
                    if _perm_sign(perm) < 0:
                        tet[1], tet[2] = tet[2], tet[1]
                    cells.append(tuple(tet))
    return Mesh("freudenthal", n, verts, np.array(cells))


def _perm_sign(perm) -> int:
    inversions = sum(
        1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b]
    )
    return -1 if inversions % 2 else 1


def nested_pair(family: str, n: int, refinements: int) -> tuple[Mesh, Mesh]:
    """Coarse mesh at n and fine mesh at n * 2**refinements.

    Only type1 and freudenthal are self-similar under uniform refinement;
    malkus is rejected.
    """
    if family == "malkus":
        raise ValueError("malkus meshes do not form nested pairs")
    if family not in FAMILIES:
        raise ValueError(f"unknown mesh family {family!r}")
    if refinements < 0:
        raise ValueError("refinements must be >= 0")
    coarse = build_mesh(family, n)
    fine = build_mesh(family, n * 2**refinements)
    return coarse, fine


def barycentric_coordinates(mesh: Mesh, cell: int, points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points (npts, dim) w.r.t. one cell."""
    pts = np.atleast_2d(points)
    verts = mesh.vertices[mesh.cells[cell]]
    T = (verts[1:] - verts[0]).T
    lam_rest = np.linalg.solve(T, (pts - verts[0]).T).T
    lam0 = 1.0 - lam_rest.sum(axis=1, keepdims=True)
    return np.hstack([lam0, lam_rest])


def locate_cells(mesh: Mesh, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Index of a cell containing each point (first match wins)."""
    pts = np.atleast_2d(points)
    found = np.full(pts.shape[0], -1, dtype=np.int64)
    pending = np.arange(pts.shape[0])
    for ci in range(mesh.num_cells):
        if pending.size == 0:
            break
        lam = barycentric_coordinates(mesh, ci, pts[pending])
        inside = (lam >= -tol).all(axis=1)
        found[pending[inside]] = ci
        pending = pending[~inside]
    if (found < 0).any():
        raise ValueError("some points lie outside the mesh")
    return found
