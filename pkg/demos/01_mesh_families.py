"""Tour of the three structured mesh families.

Builds the diagonal (type1), crossed (malkus) and 6-tetrahedra-per-cube
(freudenthal) meshes, checks their entity counts and tiling, looks at vertex
stars, and exports one mesh as JSON.
"""

import json

import numpy as np

from stardiv import build_mesh, nested_pair

for family, n in [("type1", 4), ("malkus", 4), ("freudenthal", 2)]:
    mesh = build_mesh(family, n)
    vols = mesh.cell_volumes()
    print(f"{family:12s} n={n}: {mesh.num_vertices:4d} vertices, "
          f"{mesh.num_cells:4d} cells, volume sum {vols.sum():.15f}")

# vertex stars: the local neighborhoods driving the Schwarz smoother
mesh = build_mesh("type1", 4)
interior = sorted(set(range(mesh.num_vertices)) - set(mesh.boundary_vertices))
star = mesh.vertex_star(interior[0])
print(f"\ntype1 interior vertex {star.vertex}: star of {len(star.cells)} triangles")

mesh3 = build_mesh("freudenthal", 2)
center = int(np.nonzero((np.abs(mesh3.vertices - 0.5) < 1e-12).all(axis=1))[0][0])
print(f"freudenthal center vertex: star of {len(mesh3.vertex_star(center).cells)} tets")

# nested pairs for the two-grid solver
coarse, fine = nested_pair("freudenthal", 2, 1)
print(f"\nnested pair: coarse {coarse.num_cells} tets -> fine {fine.num_cells} tets")

doc = json.loads(build_mesh("malkus", 2).to_json())
print(f"\nJSON export keys: {sorted(doc)}; first cell: {doc['cells'][0]}")
