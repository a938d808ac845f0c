"""Smallest generalized eigenvalue of the div-div/gradient pencil.

Shifted power iteration over the orthogonal complement of the discretely
divergence-free subspace, with iterated-penalty kernel projections guarding
against round-off drift into the kernel.  The converged eigenvalue bounds the
inf-sup constant of the velocity/divergence pair from both sides:
sqrt(lambda1) <= beta <= 2 sqrt(lambda1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fem import FunctionSpace, assemble_divdiv, assemble_grad, build_space, interpolate
from .linalg import CholeskyFactor, factorize_spd
from .mesh import build_mesh


class InitializationError(Exception):
    """The starting field has (discretely) vanishing divergence."""


class KernelProjectionError(Exception):
    """Iterated penalty failed to reach the divergence tolerance."""

    def __init__(self, iterations: int, achieved: float, tau: float):
        self.iterations = iterations
        self.achieved = achieved
        self.tau = tau
        super().__init__(
            f"penalty projection stalled after {iterations} iterations: "
            f"||div z|| = {achieved:.3e} > tau = {tau:.3e}"
        )


@dataclass
class InfSupConfig:
    family: str
    n: int
    degree: int
    sigma: float = 0.6
    omega: int = 10
    rho: float = 1e4
    tau: float = 1e-14
    zeta: float = 1e-12
    eps: float = 1e-8
    max_iterations: int = 200_000
    penalty_max_iterations: int = 10_000

    def __post_init__(self):
        # sigma = 0 is the largest-eigenvalue mode; shifts >= 1 are useless
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError(f"shift must lie in [0, 1), got {self.sigma}")
        for name in ("rho", "tau", "zeta", "eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class PowerState:
    u: np.ndarray
    u_hat: np.ndarray
    lam: float
    iteration: int
    restarts: int


@dataclass
class TraceRecord:
    iteration: int
    lam: float
    restarted: bool


@dataclass
class InfSupReport:
    lambda1: float
    iterations: int
    restarts: int
    converged: bool
    beta_lower: float
    beta_upper: float
    trace: list[TraceRecord] = field(default_factory=list)
    config: InfSupConfig | None = None


class PencilOperators:
    """Assembled interior-dof operators for one (family, n, degree) problem."""

    def __init__(self, space: FunctionSpace, rho: float):
        self.space = space
        self.b_full = assemble_divdiv(space, reduce=False)
        idx = space.interior_dofs
        self.b = self.b_full[idx][:, idx].tocsr()
        self.a = assemble_grad(space, reduce=True)
        self.a_factor = factorize_spd(self.a)
        self.penalty_factor = factorize_spd((self.a + rho * self.b).tocsr())
        self.rho = rho

    @classmethod
    def from_config(cls, config: InfSupConfig) -> "PencilOperators":
        mesh = build_mesh(config.family, config.n)
        return cls(build_space(mesh, config.degree), config.rho)


def _anorm(a: sp.spmatrix, v: np.ndarray) -> float:
    return float(np.sqrt(max(v @ (a @ v), 0.0)))


def starting_field(dim: int, omega: int):
    """Oscillatory field with nonvanishing divergence (for omega != 0)."""
    if dim == 2:
        return lambda x: np.column_stack(
            [np.sin(omega * x[:, 0]), np.cos(omega * x[:, 1])]
        )
    return lambda x: np.column_stack(
        [np.sin(omega * x[:, 0]), np.cos(omega * x[:, 1]), np.sin(omega * x[:, 2])]
    )


def initialize(
    space: FunctionSpace, a_factor: CholeskyFactor, b_full: sp.spmatrix, omega: int
) -> PowerState:
    """Solve a(u0, v) = (div w, div v) for the starting iterate.

    ``b_full`` is the div-div matrix over all dofs: the interpolated starting
    field carries boundary values, so the right-hand side needs the full rows.
    By construction u0 is A-orthogonal to the divergence-free subspace.
    """
    w = interpolate(space, starting_field(space.mesh.dim, omega))
    rhs = (b_full @ w)[space.interior_dofs]
    u0 = a_factor.solve(rhs)
    a = a_factor.matrix
    norm = _anorm(a, u0)
    if norm <= 1e-13:
        raise InitializationError(
            f"starting field with omega={omega} is discretely divergence-free; "
            "choose a different omega"
        )
    b_int = b_full[space.interior_dofs][:, space.interior_dofs]
    lam = float((u0 @ (b_int @ u0)) / (u0 @ (a @ u0)))
    return PowerState(u=u0, u_hat=u0 / norm, lam=lam, iteration=0, restarts=0)


def power_step(
    state: PowerState, a_factor: CholeskyFactor, b: sp.spmatrix, sigma: float
) -> PowerState:
    """One shifted power-method update u <- A^{-1}(B - sigma A) u_hat."""
    a = a_factor.matrix
    u = a_factor.solve(b @ state.u_hat - sigma * (a @ state.u_hat))
    norm = _anorm(a, u)
    if norm <= 1e-300:
        raise InitializationError("power iterate vanished; degenerate configuration")
    lam = float((u @ (b @ u)) / (u @ (a @ u)))
    return PowerState(
        u=u,
        u_hat=u / norm,
        lam=lam,
        iteration=state.iteration + 1,
        restarts=state.restarts,
    )


def project_kernel(
    u: np.ndarray,
    penalty_factor: CholeskyFactor,
    a: sp.spmatrix,
    b: sp.spmatrix,
    rho: float,
    tau: float,
    max_iterations: int = 10_000,
) -> tuple[np.ndarray, int]:
    """A-orthogonal projection of u onto ker(B) by the iterated penalty method.

    Solves a(z, v) + rho (div z, div v) = a(u, v) - (div w_l, div v) with the
    multiplier update w_{l+1} = w_l + rho z_l, starting from w_0 = 0, until
    ||div z_l|| <= tau.  Returns (z, penalty iterations).
    """
    au = a @ u
    w = np.zeros_like(u)
    divnorm = np.inf
    for it in range(1, max_iterations + 1):
        z = penalty_factor.solve(au - b @ w)
        divnorm = float(np.sqrt(max(z @ (b @ z), 0.0)))
        if divnorm <= tau:
            return z, it
        w = w + rho * z
    raise KernelProjectionError(max_iterations, divnorm, tau)


def _restart(
    state: PowerState, ops: PencilOperators, config: InfSupConfig
) -> tuple[PowerState, bool]:
    """Monitor the kernel component; subtract it when it grows past zeta."""
    z, _ = project_kernel(
        state.u,
        ops.penalty_factor,
        ops.a,
        ops.b,
        config.rho,
        config.tau,
        config.penalty_max_iterations,
    )
    if _anorm(ops.a, z) < config.zeta * _anorm(ops.a, state.u):
        return state, False
    u = state.u - z
    norm = _anorm(ops.a, u)
    if norm <= 1e-300:
        raise InitializationError("iterate lies entirely in the divergence-free subspace")
    lam = float((u @ (ops.b @ u)) / (u @ (ops.a @ u)))
    return (
        PowerState(
            u=u,
            u_hat=u / norm,
            lam=lam,
            iteration=state.iteration,
            restarts=state.restarts + 1,
        ),
        True,
    )


def estimate_infsup(
    config: InfSupConfig,
    operators: PencilOperators | None = None,
    collect_trace: bool = True,
) -> InfSupReport:
    """Run the full shifted power iteration with kernel-projection restarts."""
    ops = operators if operators is not None else PencilOperators.from_config(config)
    state = initialize(ops.space, ops.a_factor, ops.b_full, config.omega)
    state, restarted = _restart(state, ops, config)  # round-off guard at n = 0
    trace: list[TraceRecord] = []
    if collect_trace:
        trace.append(TraceRecord(0, state.lam, restarted))

    converged = False
    lam_prev = state.lam
    while state.iteration < config.max_iterations:
        state = power_step(state, ops.a_factor, ops.b, config.sigma)
        state, restarted = _restart(state, ops, config)
        if collect_trace:
            trace.append(TraceRecord(state.iteration, state.lam, restarted))
        if abs(state.lam - lam_prev) <= config.eps:
            converged = True
            break
        lam_prev = state.lam

    lam = state.lam
    return InfSupReport(
        lambda1=lam,
        iterations=state.iteration,
        restarts=state.restarts,
        converged=converged,
        beta_lower=float(np.sqrt(max(lam, 0.0))),
        beta_upper=2.0 * float(np.sqrt(max(lam, 0.0))),
        trace=trace,
        config=config,
    )
