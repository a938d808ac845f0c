import numpy as np
import pytest

from stardiv import (
    assemble_constant_load,
    assemble_divdiv,
    assemble_grad,
    build_mesh,
    build_space,
    dense_generalized_eig,
    eval_in_cell,
    interpolate,
    nested_pair,
    prolongation,
)
from stardiv.mesh import Mesh


def unit_right_triangle():
    return Mesh(
        "type1", 1, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 1, 2]])
    )


def scalar_entity_count(mesh, k):
    from math import comb

    edges = len(mesh.edges)
    if mesh.dim == 2:
        return mesh.num_vertices + (k - 1) * edges + comb(k - 1, 2) * mesh.num_cells
    faces = len(mesh.faces)
    return (
        mesh.num_vertices
        + (k - 1) * edges
        + comb(k - 1, 2) * faces
        + comb(k - 1, 3) * mesh.num_cells
    )


@pytest.mark.parametrize(
    "family,n,k",
    [
        ("type1", 1, 1),
        ("type1", 4, 4),
        ("type1", 3, 2),
        ("malkus", 2, 3),
        ("freudenthal", 1, 2),
        ("freudenthal", 2, 3),
        ("freudenthal", 1, 5),
    ],
)
def test_scalar_node_count_formula(family, n, k):
    mesh = build_mesh(family, n)
    space = build_space(mesh, k)
    assert space.num_scalar_nodes == scalar_entity_count(mesh, k)
    assert space.num_dofs == mesh.dim * space.num_scalar_nodes


def test_spec_dof_examples():
    assert build_space(build_mesh("type1", 1), 1).num_scalar_nodes == 4
    space = build_space(build_mesh("freudenthal", 1), 2)
    assert space.num_scalar_nodes == 27  # 8 vertices + 19 edges
    mesh = build_mesh("type1", 4)
    assert len(mesh.edges) == 56
    assert build_space(mesh, 4).num_dofs == 2 * (25 + 3 * 56 + 3 * 32)


def test_interior_boundary_partition():
    space = build_space(build_mesh("malkus", 2), 2)
    interior = set(space.interior_dofs.tolist())
    boundary = {
        n * 2 + c
        for n in range(space.num_scalar_nodes)
        if space.node_on_boundary[n]
        for c in range(2)
    }
    assert interior.isdisjoint(boundary)
    assert len(interior) + len(boundary) == space.num_dofs


def test_p1_element_stiffness_golden():
    # scalar component block of the vector grad form on the unit right triangle
    space = build_space(unit_right_triangle(), 1)
    a = assemble_grad(space, reduce=False).toarray()
    scalar = a[0::2, 0::2]
    golden = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
    assert np.abs(scalar - golden).max() < 1e-14
    assert np.abs(a[1::2, 1::2] - golden).max() < 1e-14
    assert np.abs(a[0::2, 1::2]).max() == 0.0  # components decouple


def test_grad_kills_constants_and_symmetry():
    space = build_space(build_mesh("type1", 3), 2)
    a = assemble_grad(space, reduce=False)
    const = interpolate(space, lambda x: np.broadcast_to([2.0, -3.0], x.shape))
    assert np.abs(a @ const).max() < 1e-13
    diff = (a - a.T).tocoo()
    assert np.abs(diff.data).max() == 0.0 if diff.nnz else True


def test_divdiv_constants_and_divfree_field():
    space = build_space(build_mesh("type1", 2), 1)
    b = assemble_divdiv(space, reduce=False)
    const = interpolate(space, lambda x: np.broadcast_to([1.0, 1.0], x.shape))
    assert np.abs(b @ const).max() < 1e-13
    w = interpolate(space, lambda x: np.column_stack([x[:, 0], -x[:, 1]]))
    assert abs(w @ (b @ w)) < 1e-13
    w = interpolate(space, lambda x: x.copy())
    assert abs(w @ (b @ w) - 4.0) < 1e-12  # div (x, y) = 2 on the unit square


def test_divdiv_psd():
    space = build_space(build_mesh("malkus", 2), 2)
    b = assemble_divdiv(space, reduce=True)
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.standard_normal(b.shape[0])
        assert v @ (b @ v) >= -1e-12


def test_interpolate_nodal_exactness():
    space = build_space(build_mesh("type1", 2), 2)
    vals = interpolate(space, lambda x: np.broadcast_to([1.0, 1.0], x.shape))
    assert np.abs(vals - 1.0).max() == 0.0
    vals = interpolate(space, lambda x: x.copy()).reshape(-1, 2)
    node = np.nonzero(
        (np.abs(space.node_coords - [0.5, 0.25]) < 1e-12).all(axis=1)
    )[0]
    assert node.size == 1
    assert np.allclose(vals[node[0]], [0.5, 0.25], atol=1e-14)


def test_oscillatory_interpolant_has_divergence():
    space = build_space(build_mesh("type1", 4), 2)
    b = assemble_divdiv(space, reduce=False)
    w = interpolate(
        space,
        lambda x: np.column_stack([np.sin(10 * x[:, 0]), np.cos(10 * x[:, 1])]),
    )
    assert w @ (b @ w) > 1e-2


def test_interpolation_exact_for_degree_k_polynomials():
    space = build_space(build_mesh("malkus", 2), 3)
    coeffs = interpolate(
        space,
        lambda x: np.column_stack(
            [x[:, 0] ** 3 - 2 * x[:, 1] ** 2, x[:, 0] * x[:, 1] ** 2]
        ),
    )
    rng = np.random.default_rng(0)
    for cell in rng.integers(0, space.mesh.num_cells, 5):
        lam = rng.dirichlet(np.ones(3), size=4)
        pts = lam @ space.mesh.vertices[space.mesh.cells[cell]]
        vals = eval_in_cell(space, coeffs, int(cell), pts)
        exact = np.column_stack(
            [pts[:, 0] ** 3 - 2 * pts[:, 1] ** 2, pts[:, 0] * pts[:, 1] ** 2]
        )
        assert np.abs(vals - exact).max() < 1e-12


def test_constant_load_partition_of_unity():
    space = build_space(build_mesh("malkus", 3), 2)
    load = assemble_constant_load(space, 2.5, reduce=False)
    per_component = load.reshape(-1, 2).sum(axis=0)
    assert np.allclose(per_component, 2.5, atol=1e-13)
    assert np.abs(assemble_constant_load(space, 0.0, reduce=False)).max() == 0.0


def test_constant_load_p1_star_areas():
    mesh = build_mesh("type1", 1)
    space = build_space(mesh, 1)
    load = assemble_constant_load(space, 3.0, reduce=False).reshape(-1, 2)
    vols = mesh.cell_volumes()
    for v in range(mesh.num_vertices):
        star_area = vols[list(mesh.vertex_star(v).cells)].sum()
        assert np.allclose(load[v], 3.0 * star_area / 3.0, atol=1e-14)


@pytest.mark.parametrize("family,n,k", [("type1", 2, 3), ("freudenthal", 1, 2)])
def test_quadrature_refinement_witness(family, n, k):
    space = build_space(build_mesh(family, n), k)
    for assemble in (assemble_grad, assemble_divdiv):
        base = assemble(space, reduce=False, quad_degree=2 * k)
        fine = assemble(space, reduce=False, quad_degree=2 * k + 2)
        assert np.abs((base - fine).toarray()).max() < 1e-12


@pytest.mark.parametrize("family,n,k", [("type1", 4, 2), ("malkus", 3, 3), ("freudenthal", 2, 3)])
def test_continuity_across_facets(family, n, k):
    space = build_space(build_mesh(family, n), k)
    mesh = space.mesh
    rng = np.random.default_rng(42)
    coeffs = rng.standard_normal(space.num_dofs)
    shared = [(f, cs) for f, cs in mesh.facet_cells.items() if len(cs) == 2]
    rng.shuffle(shared)
    checked = 0
    for facet, (c1, c2) in shared:
        for _ in range(3):
            lam = rng.dirichlet(np.ones(len(facet)))
            pt = (lam @ mesh.vertices[list(facet)])[None, :]
            v1 = eval_in_cell(space, coeffs, c1, pt)
            v2 = eval_in_cell(space, coeffs, c2, pt)
            assert np.abs(v1 - v2).max() < 1e-12
            checked += 1
        if checked >= 50:
            break
    assert checked >= 50


def test_divdiv_bounded_by_dim_times_grad():
    space = build_space(build_mesh("malkus", 3), 2)
    a = assemble_grad(space, reduce=False)
    b = assemble_divdiv(space, reduce=False)
    d = space.mesh.dim
    rng = np.random.default_rng(7)
    for _ in range(100):
        v = rng.standard_normal(space.num_dofs)
        assert v @ (b @ v) <= d * (v @ (a @ v)) + 1e-10


@pytest.mark.parametrize("family,n,k", [("malkus", 2, 1), ("type1", 2, 2), ("freudenthal", 1, 2)])
def test_generalized_eigenvalues_in_unit_interval(family, n, k):
    space = build_space(build_mesh(family, n), k)
    a = assemble_grad(space, reduce=True)
    b = assemble_divdiv(space, reduce=True)
    eig = dense_generalized_eig(b, a)
    assert eig.eigenvalues.min() >= -1e-10
    assert eig.eigenvalues.max() <= 1.0 + 1e-8


def test_prolongation_is_fine_interpolant_of_coarse_function():
    # P c must equal the fine nodal interpolant of the coarse function c,
    # checked against direct point evaluation on every fine interior node
    from stardiv.mesh import locate_cells

    coarse_mesh, fine_mesh = nested_pair("type1", 2, 1)
    coarse = build_space(coarse_mesh, 2)
    fine = build_space(fine_mesh, 2)
    p = prolongation(coarse, fine)
    rng = np.random.default_rng(1)
    c_int = rng.standard_normal(coarse.interior_dofs.size)
    c_full = coarse.extend(c_int)
    cells = locate_cells(coarse_mesh, fine.node_coords)
    expected_full = np.zeros(fine.num_dofs)
    for node in range(fine.num_scalar_nodes):
        val = eval_in_cell(
            coarse, c_full, int(cells[node]), fine.node_coords[node][None, :]
        )
        expected_full[node * 2 : node * 2 + 2] = val[0]
    got = p @ c_int
    assert np.abs(got - expected_full[fine.interior_dofs]).max() < 1e-13


def test_prolongation_maps_interpolants_away_from_boundary():
    # for the interpolant of a smooth field, P reproduces the fine interpolant
    # at fine nodes whose coarse cell does not touch the boundary (elsewhere
    # the zeroed coarse boundary dofs intervene by construction)
    coarse_mesh, fine_mesh = nested_pair("type1", 4, 1)
    coarse = build_space(coarse_mesh, 2)
    fine = build_space(fine_mesh, 2)
    p = prolongation(coarse, fine)
    poly = lambda x: x.copy()  # the identity field (x, y)
    image = p @ coarse.restrict(interpolate(coarse, poly))
    expected = fine.restrict(interpolate(fine, poly))
    deep = []
    for i, dof in enumerate(fine.interior_dofs):
        x = fine.node_coords[dof // fine.components]
        if (x > 0.26).all() and (x < 0.74).all():
            deep.append(i)
    assert deep
    diff = np.abs(image - expected)
    assert diff[deep].max() < 1e-12


def test_prolongation_partition_of_unity_and_energy():
    coarse_mesh, fine_mesh = nested_pair("type1", 4, 1)
    for k in (1, 2):
        coarse = build_space(coarse_mesh, k)
        fine = build_space(fine_mesh, k)
        p = prolongation(coarse, fine)
        rows = np.asarray(p.sum(axis=1)).ravel()
        deep = []
        for i, dof in enumerate(fine.interior_dofs):
            x = fine.node_coords[dof // fine.components]
            if (x > 0.26).all() and (x < 0.74).all():
                deep.append(i)
        assert deep
        assert np.abs(rows[deep] - 1.0).max() < 1e-11
        a_coarse = assemble_grad(coarse, reduce=True)
        a_fine = assemble_grad(fine, reduce=True)
        rng = np.random.default_rng(k)
        c = rng.standard_normal(a_coarse.shape[0])
        lhs = (p @ c) @ (a_fine @ (p @ c))
        rhs = c @ (a_coarse @ c)
        assert abs(lhs - rhs) < 1e-10 * max(abs(rhs), 1.0)


def test_prolongation_rejects_non_nested():
    # n -> 3n/2 grids genuinely straddle; malkus 2N-in-N happens to nest
    # geometrically, so the rejection cases use non-multiples
    coarse = build_space(build_mesh("type1", 2), 2)
    fine = build_space(build_mesh("type1", 3), 2)
    with pytest.raises(ValueError):
        prolongation(coarse, fine)
    coarse = build_space(build_mesh("malkus", 2), 1)
    fine = build_space(build_mesh("malkus", 3), 1)
    with pytest.raises(ValueError):
        prolongation(coarse, fine)
    c2 = build_space(build_mesh("type1", 2), 2)
    f2 = build_space(build_mesh("type1", 4), 3)
    with pytest.raises(ValueError):
        prolongation(c2, f2)


def test_assembly_deterministic():
    space = build_space(build_mesh("freudenthal", 2), 2)
    a1 = assemble_grad(space, reduce=True)
    a2 = assemble_grad(space, reduce=True)
    assert (a1 != a2).nnz == 0
    assert np.array_equal(a1.data, a2.data)


def test_build_space_rejects_degree_zero():
    with pytest.raises(ValueError):
        build_space(build_mesh("type1", 1), 0)
