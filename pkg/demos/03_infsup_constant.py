"""Inf-sup constants via the shifted power method.

Reproduces a handful of desk-scale rows: the crossed-mesh spaces have a
bounded inf-sup constant for k = 2 but an O(h) degeneration for k = 1, and
the diagonal (type1) meshes are stable for k = 4 but degenerate for k = 2.
The eigenvalue lambda1 bounds the inf-sup constant beta by
sqrt(lambda1) <= beta <= 2 sqrt(lambda1).
"""

import time

from stardiv import InfSupConfig, estimate_infsup

print(f"{'family':12s} {'k':>2} {'N':>3} {'omega':>5} {'lambda1':>11} "
      f"{'beta in':>23} {'iters':>6} {'restarts':>8}")

for family, n, k, omega, eps in [
    ("malkus", 5, 1, 5, 1e-7),
    ("malkus", 5, 1, 10, 1e-7),
    ("malkus", 10, 1, 10, 1e-7),
    ("malkus", 10, 2, 10, 1e-7),
    ("type1", 5, 4, 10, 1e-7),
    ("type1", 8, 2, 10, 1e-10),
]:
    t0 = time.time()
    rep = estimate_infsup(
        InfSupConfig(family=family, n=n, degree=k, omega=omega, eps=eps)
    )
    beta = f"[{rep.beta_lower:.4f}, {rep.beta_upper:.4f}]"
    print(f"{family:12s} {k:>2} {n:>3} {omega:>5} {rep.lambda1:>11.4e} "
          f"{beta:>23} {rep.iterations:>6} {rep.restarts:>8}  "
          f"({time.time()-t0:.1f}s)")

print("\nmalkus k=1: lambda1 drops ~4x when N doubles (O(h^2), i.e. beta ~ h);")
print("malkus k=2 and type1 k=4 stay bounded; type1 k=2 degenerates.")
