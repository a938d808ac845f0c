"""Command-line front end: experiment grids and table/JSON reports.

Subcommands
-----------
infsup      power-method eigenvalue runs over a (family, N, degree, omega) grid
elasticity  two-grid-preconditioned CG iteration counts over a (degree, gamma) grid
oracle      dense generalized-eigenvalue cross-check on small problems

Exit codes: 0 all runs converged, 2 some run did not converge, 1 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .infsup import InfSupConfig, PencilOperators, estimate_infsup
from .linalg import infsup_oracle, kernel_basis
from .multigrid import ElasticityConfig, solve_elasticity

_DENSE_LIMIT = 2000


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _add_common(p: _Parser) -> None:
    p.add_argument("--mesh", required=True, choices=("type1", "malkus", "freudenthal"))
    p.add_argument("--degree", type=_int_list, required=True, help="comma list of k")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--seed", type=int, default=0, help="seed for random-vector checks")


def build_parser() -> _Parser:
    parser = _Parser(prog="stardiv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infsup", help="inf-sup eigenvalue runs")
    _add_common(p)
    p.add_argument("--n", type=_int_list, required=True, help="comma list of N")
    p.add_argument("--omega", type=_int_list, default=[10])
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--rho", type=float, default=1e4)
    p.add_argument("--tau", type=float, default=1e-14)
    p.add_argument("--zeta", type=float, default=1e-12)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=200_000)

    p = sub.add_parser("elasticity", help="two-grid CG iteration counts")
    _add_common(p)
    p.add_argument("--coarse-n", type=int, required=True)
    p.add_argument("--refinements", type=int, default=1)
    p.add_argument("--gamma", type=_float_list, required=True, help="comma list")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=2000)

    p = sub.add_parser("oracle", help="dense eigenvalue cross-check")
    _add_common(p)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--omega", type=_int_list, default=[10])
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--rho", type=float, default=1e4)
    p.add_argument("--tau", type=float, default=1e-14)
    p.add_argument("--zeta", type=float, default=1e-12)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument(
        "--degenerate",
        action="store_true",
        help="sanity mode: replace B by A so every eigenvalue is 1",
    )
    return parser


def _infsup_config(args, n: int, k: int, omega: int) -> InfSupConfig:
    return InfSupConfig(
        family=args.mesh,
        n=n,
        degree=k,
        omega=omega,
        sigma=args.sigma,
        rho=args.rho,
        tau=args.tau,
        zeta=args.zeta,
        eps=args.eps,
        max_iterations=args.max_iters,
    )


def _config_dict(cfg) -> dict:
    return {key: getattr(cfg, key) for key in cfg.__dataclass_fields__}


def _emit(record: dict, args) -> None:
    if args.format == "json":
        print(json.dumps(record))


def cmd_infsup(args) -> int:
    ok = True
    if args.format == "table":
        print(f"{'k':>3} {'N':>4} {'omega':>6} {'iterations':>11} "
              f"{'lambda1':>12} {'restarts':>9}")
    for k in args.degree:
        for n in args.n:
            for omega in args.omega:
                cfg = _infsup_config(args, n, k, omega)
                rep = estimate_infsup(cfg)
                ok &= rep.converged
                if args.format == "table":
                    print(
                        f"{k:>3} {n:>4} {omega:>6} {rep.iterations:>11} "
                        f"{rep.lambda1:>12.3e} {rep.restarts:>9}"
                    )
                _emit(
                    {
                        "experiment": "infsup",
                        "config": _config_dict(cfg),
                        "result": {
                            "lambda1": rep.lambda1,
                            "iterations": rep.iterations,
                            "restarts": rep.restarts,
                            "converged": rep.converged,
                            "beta_lower": rep.beta_lower,
                            "beta_upper": rep.beta_upper,
                        },
                        "trace": [[t.iteration, t.lam, t.restarted] for t in rep.trace],
                    },
                    args,
                )
    return 0 if ok else 2


def cmd_elasticity(args) -> int:
    ok = True
    rows = {}
    for k in args.degree:
        counts = []
        for gamma in args.gamma:
            cfg = ElasticityConfig(
                family=args.mesh,
                coarse_n=args.coarse_n,
                refinements=args.refinements,
                degree=k,
                gamma=gamma,
                rtol=args.rtol,
                max_iterations=args.max_iters,
            )
            rep = solve_elasticity(cfg)
            ok &= rep.converged
            counts.append(rep.cg_iterations)
            _emit(
                {
                    "experiment": "elasticity",
                    "config": _config_dict(cfg),
                    "result": {
                        "iterations": rep.cg_iterations,
                        "converged": rep.converged,
                        "final_relative_residual": rep.final_relative_residual,
                        "fine_dofs": rep.fine_dofs,
                        "coarse_dofs": rep.coarse_dofs,
                    },
                    "trace": list(map(float, rep.residual_history)),
                },
                args,
            )
        rows[k] = counts
    if args.format == "table":
        header = "k\\gamma " + " ".join(f"{g:>8.0e}" for g in args.gamma)
        print(header)
        for k, counts in rows.items():
            print(f"{k:>7} " + " ".join(f"{c:>8}" for c in counts))
    return 0 if ok else 2


def cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    ok = True
    for k in args.degree:
        for n in args.n:
            cfg = _infsup_config(args, n, k, args.omega[0])
            ops = PencilOperators.from_config(cfg)
            ndof = ops.a.shape[0]
            if ndof > _DENSE_LIMIT:
                print(
                    f"refusing dense oracle at {ndof} dofs (limit {_DENSE_LIMIT}); "
                    "pick a smaller mesh",
                    file=sys.stderr,
                )
                return 1
            if args.degenerate:
                lam_min, lam_max, kdim, _ = infsup_oracle(ops.a, ops.a)
                print(f"degenerate check B=A: eigenvalues in [{lam_min:.6f}, {lam_max:.6f}]")
                continue
            lam_dense, lam_max, kdim, eig = infsup_oracle(ops.a, ops.b)
            rep = estimate_infsup(cfg, operators=ops)
            ok &= rep.converged
            diff = abs(rep.lambda1 - lam_dense)
            # seeded random-vector check: kernel combinations are divergence-free
            kernel_div = 0.0
            if kdim:
                kern = kernel_basis(ops.b)
                probe = kern @ rng.standard_normal(kern.shape[1])
                kernel_div = float((probe @ (ops.b @ probe)) / (probe @ (ops.a @ probe)))
            record = {
                "experiment": "oracle",
                "config": _config_dict(cfg),
                "result": {
                    "lambda1_dense": lam_dense,
                    "lambda1_power": rep.lambda1,
                    "difference": diff,
                    "kernel_dim": kdim,
                    "lambda_max_dense": lam_max,
                    "kernel_divergence_ratio": kernel_div,
                    "converged": rep.converged,
                },
            }
            if args.format == "table":
                print(
                    f"k={k} N={n}: dense={lam_dense:.8e} power={rep.lambda1:.8e} "
                    f"|diff|={diff:.2e} ker_dim={kdim}"
                )
            else:
                print(json.dumps(record))
    return 0 if ok else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"infsup": cmd_infsup, "elasticity": cmd_elasticity, "oracle": cmd_oracle}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
