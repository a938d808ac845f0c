"""Sparse symmetric solvers and a dense generalized-eigenvalue oracle.

The SPD factorization is a SuperLU decomposition run in symmetric mode with a
fill-reducing ordering and no partial pivoting, i.e. an LDL^T-style factorization
whose pivot sequence certifies positive definiteness.  Factors are immutable
and reusable across arbitrarily many right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as dla
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class IndefiniteOperatorError(Exception):
    """Raised when a pivot <= 0 shows the operator is not positive definite."""


class PcgDivergenceError(Exception):
    """Raised when conjugate gradients hits NaN/Inf or a diverging residual."""


class SubspaceRankError(Exception):
    """Raised when a subspace basis is rank deficient in the A inner product."""


class CholeskyFactor:
    """Reusable factorization of a sparse SPD matrix."""

    def __init__(self, matrix: sp.spmatrix):
        matrix = matrix.tocsc()
        self.matrix = matrix.tocsr()
        self.shape = matrix.shape
        try:
            self._lu = spla.splu(
                matrix,
                diag_pivot_thresh=0.0,
                permc_spec="MMD_AT_PLUS_A",
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # exactly singular
            raise IndefiniteOperatorError(f"factorization failed: {exc}") from exc
        pivots = self._lu.U.diagonal()
        worst = pivots.min()
        if worst <= 0.0:
            raise IndefiniteOperatorError(
                f"matrix is not positive definite (pivot {worst:.3e} <= 0); "
                "check boundary elimination and assembly"
            )

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self._lu.solve(np.asarray(rhs, dtype=float))


def factorize_spd(matrix: sp.spmatrix) -> CholeskyFactor:
    return CholeskyFactor(matrix)


def _as_apply(op):
    if callable(op) and not sp.issparse(op) and not isinstance(op, np.ndarray):
        return op
    return lambda v, _m=op: _m @ v


def pcg(apply_op, apply_prec, rhs, rtol: float = 1e-8, maxit: int = 1000, x0=None):
    """Preconditioned conjugate gradients with an unpreconditioned stopping rule.

    Stops when ||rhs - Op x||_2 <= rtol * ||rhs||_2 or maxit is reached.
    Returns (x, iterations, residual_history); history[0] is the initial
    residual norm.
    """
    op = _as_apply(apply_op)
    prec = _as_apply(apply_prec)
    rhs = np.asarray(rhs, dtype=float)
    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=float)
    r = rhs - op(x) if x0 is not None else rhs.copy()
    rhs_norm = float(np.linalg.norm(rhs))
    history = [float(np.linalg.norm(r))]
    if rhs_norm == 0.0:
        return x, 0, np.array(history)
    z = prec(r)
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, maxit + 1):
        ap = op(p)
        pap = float(p @ ap)
        if not np.isfinite(pap) or pap <= 0.0:
            raise PcgDivergenceError(
                f"breakdown at iteration {it}: p^T A p = {pap!r} (operator not SPD?)"
            )
        alpha = rz / pap
        x = x + alpha * p
        r = r - alpha * ap
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)
        if not np.isfinite(rnorm) or rnorm > 1e8 * history[0]:
            raise PcgDivergenceError(f"residual diverged at iteration {it}: {rnorm:.3e}")
        if rnorm <= rtol * rhs_norm:
            return x, it, np.array(history)
        z = prec(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, maxit, np.array(history)


@dataclass(frozen=True)
class DenseEig:
    """Eigenpairs of a symmetric pencil, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, in the original coordinates


def _dense(m) -> np.ndarray:
    return m.toarray() if sp.issparse(m) else np.asarray(m, dtype=float)


def dense_generalized_eig(b, a, subspace: np.ndarray | None = None) -> DenseEig:
    """Eigenvalues of B v = lambda A v restricted to a subspace (dense oracle).

    ``subspace`` holds basis columns; None means the full space.  The basis
    must be A-orthonormalizable (rank deficiency is reported).
    """
    bd, ad = _dense(b), _dense(a)
    if subspace is None:
        bs, as_ = bd, ad
    else:
        s = np.atleast_2d(np.asarray(subspace, dtype=float))
        bs = s.T @ bd @ s
        as_ = s.T @ ad @ s
    as_eigs = dla.eigvalsh(as_)
    if as_eigs.min() <= 1e-12 * max(as_eigs.max(), 1.0):
        raise SubspaceRankError(
            f"subspace basis is A-rank deficient (extreme eigenvalues "
            f"{as_eigs.min():.3e}, {as_eigs.max():.3e})"
        )
    w, y = dla.eigh(bs, as_)
    vecs = y if subspace is None else subspace @ y
    return DenseEig(eigenvalues=w, eigenvectors=vecs)


def kernel_basis(b, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the nullspace of a symmetric PSD matrix."""
    bd = _dense(b)
    w, v = dla.eigh(bd)
    scale = max(abs(w).max(), 1.0)
    return v[:, np.abs(w) <= tol * scale]


def a_orthogonal_complement(kernel: np.ndarray, a) -> np.ndarray:
    """Basis (columns) of the A-orthogonal complement of span(kernel)."""
    ad = _dense(a)
    if kernel.shape[1] == 0:
        return np.eye(ad.shape[0])
    return dla.null_space(kernel.T @ ad)


def infsup_oracle(a, b, tol: float = 1e-10) -> tuple[float, float, int, DenseEig]:
    """Smallest/largest pencil eigenvalues over the complement of ker B.

    Brute-force verification path: the kernel of B is built explicitly, the
    pencil is restricted to its A-orthogonal complement and solved densely.
    Returns (lambda_min, lambda_max, kernel_dim, eigensystem).
    """
    kern = kernel_basis(b, tol=tol)
    comp = a_orthogonal_complement(kern, a)
    eig = dense_generalized_eig(b, a, comp)
    return float(eig.eigenvalues[0]), float(eig.eigenvalues[-1]), kern.shape[1], eig
