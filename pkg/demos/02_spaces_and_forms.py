"""Lagrange spaces and the two bilinear forms.

Shows the dof bookkeeping of the vector Lagrange spaces, the gradient and
div-div matrices, interpolation, and the identities that anchor the
eigenvalue computation: div-free fields sit in the kernel of B, and
v^T B v <= v^T A v with homogeneous Dirichlet conditions.
"""

import numpy as np

from stardiv import (
    assemble_constant_load,
    assemble_divdiv,
    assemble_grad,
    build_mesh,
    build_space,
    dense_generalized_eig,
    interpolate,
)

mesh = build_mesh("malkus", 3)
for k in (1, 2, 3):
    space = build_space(mesh, k)
    print(f"k={k}: {space.num_scalar_nodes} scalar nodes, {space.num_dofs} dofs, "
          f"{space.interior_dofs.size} interior")

space = build_space(mesh, 2)
a = assemble_grad(space, reduce=False)
b = assemble_divdiv(space, reduce=False)

# constants have zero gradient and zero divergence
const = interpolate(space, lambda x: np.broadcast_to([1.0, -2.0], x.shape))
print(f"\n|A const|_max = {np.abs(a @ const).max():.2e}")
print(f"|B const|_max = {np.abs(b @ const).max():.2e}")

# w = (x, -y) is divergence-free and lies in the space; w = (x, y) has div = 2
w = interpolate(space, lambda x: np.column_stack([x[:, 0], -x[:, 1]]))
print(f"(x,-y): w^T B w = {w @ (b @ w):.2e} (exactly divergence-free)")
w = interpolate(space, lambda x: x.copy())
print(f"(x, y): w^T B w = {w @ (b @ w):.15f} (= 4 |Omega|)")

# the pencil spectrum lives in [0, 1] on interior dofs
ai = assemble_grad(space, reduce=True)
bi = assemble_divdiv(space, reduce=True)
eig = dense_generalized_eig(bi, ai)
print(f"\npencil eigenvalue range: [{eig.eigenvalues.min():.2e}, "
      f"{eig.eigenvalues.max():.8f}]")

load = assemble_constant_load(space, 1.0, reduce=False).reshape(-1, 2)
print(f"load vector column sums (= |Omega| per component): {load.sum(axis=0)}")
