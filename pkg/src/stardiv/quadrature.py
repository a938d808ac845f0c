"""Quadrature rules on the reference triangle/tetrahedron.

Collapsed (Duffy-type) Gauss-Jacobi product rules: arbitrary exactness degree,
positive weights.  Points are stored in barycentric coordinates; weights sum to
the reference simplex volume (1/2 in 2D, 1/6 in 3D).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # (nq, dim+1) barycentric
    weights: np.ndarray  # (nq,)
    exactness_degree: int

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1


def _jacobi01(npts: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes/weights for weight (1-t)^alpha on [0, 1]."""
    x, w = roots_jacobi(npts, alpha, 0.0)
    return (x + 1.0) / 2.0, w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=None)
def simplex_rule(dim: int, degree: int) -> QuadratureRule:
    """Rule integrating all polynomials of total degree <= degree exactly."""
    if dim not in (2, 3):
        raise ValueError("only triangles (dim=2) and tetrahedra (dim=3) supported")
    degree = max(degree, 0)
    npts = (degree + 2) // 2  # 2*npts - 1 >= degree
    if dim == 2:
        tx, wx = _jacobi01(npts, 1)
        ty, wy = _jacobi01(npts, 0)
        xi, eta = np.meshgrid(tx, ty, indexing="ij")
        w = np.outer(wx, wy)
        x = xi.ravel()
        y = (eta * (1.0 - xi)).ravel()
        lam = np.column_stack([1.0 - x - y, x, y])
        weights = w.ravel()
    else:
        tx, wx = _jacobi01(npts, 2)
        ty, wy = _jacobi01(npts, 1)
        tz, wz = _jacobi01(npts, 0)
        xi, eta, zeta = np.meshgrid(tx, ty, tz, indexing="ij")
        w = np.einsum("i,j,k->ijk", wx, wy, wz)
        x = xi.ravel()
        y = (eta * (1.0 - xi)).ravel()
        z = (zeta * (1.0 - xi) * (1.0 - eta)).ravel()
        lam = np.column_stack([1.0 - x - y - z, x, y, z])
        weights = w.ravel()
    lam.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=lam, weights=weights, exactness_degree=degree)


def reference_monomial_integral(powers: tuple[int, ...]) -> float:
    """Exact integral of prod(x_i^p_i) over the unit reference simplex."""
    from math import factorial

    d = len(powers)
    num = 1
    for p in powers:
        num *= factorial(p)
    return num / factorial(sum(powers) + d)
