"""Cross-checking the matrix-free power method against dense algebra.

On meshes small enough for dense eigensolvers, the kernel of the div-div
operator is built explicitly, the pencil is restricted to its A-orthogonal
complement, and the smallest eigenvalue is compared with the power-method
result.  Also demonstrates the sigma = 0 mode, which finds the top of the
spectrum (= 1 with homogeneous Dirichlet conditions on these meshes).
"""

from stardiv import InfSupConfig, PencilOperators, estimate_infsup, infsup_oracle

for family, n, k, eps in [
    ("malkus", 2, 1, 1e-8),
    ("malkus", 3, 1, 1e-8),
    ("malkus", 5, 1, 1e-8),
    ("type1", 2, 2, 1e-10),
]:
    cfg = InfSupConfig(family=family, n=n, degree=k, eps=eps)
    ops = PencilOperators.from_config(cfg)
    lam_min, lam_max, kdim, _ = infsup_oracle(ops.a, ops.b)
    rep = estimate_infsup(cfg, operators=ops)
    rel = abs(rep.lambda1 - lam_min) / lam_min
    print(f"{family} k={k} N={n} ({ops.a.shape[0]} dofs, ker dim {kdim}):")
    print(f"   dense lambda1 = {lam_min:.10e}")
    print(f"   power lambda1 = {rep.lambda1:.10e}   rel diff {rel:.1e}")
    print(f"   dense lambda_max = {lam_max:.10f}")

cfg = InfSupConfig(family="malkus", n=5, degree=1, sigma=0.0, eps=1e-10)
rep = estimate_infsup(cfg)
print(f"\nsigma=0 run on malkus k=1 N=5: lambda_N = {rep.lambda1:.10f} "
      f"({rep.iterations} iterations)")
