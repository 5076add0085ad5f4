import math

import numpy as np
import pytest

from nnem.envelope import HierarchicalFamily, LagrangeFamily
from nnem.errors import (
    InvalidArgumentError,
    MeshFormatError,
    MeshValidationError,
    NonConformingMeshError,
    OrientationError,
)
from nnem.mesh import (
    DIAGONAL,
    Mesh,
    barycentric,
    barycentric_gradients,
    build_patches,
    dump_mesh,
    generate_l_shape,
    generate_unit_square,
    load_mesh,
    locate,
    min_angle,
    overlap_bound,
    shape_regularity,
    validate_mesh,
)
from nnem.quadrature import triangle_rule_36

REFERENCE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]


@pytest.mark.parametrize(
    "n, vertices, triangles, h",
    [(1, 4, 2, math.sqrt(2)), (2, 9, 8, math.sqrt(2) / 2), (8, 81, 128, math.sqrt(2) / 8)],
)
def test_unit_square_counts(n, vertices, triangles, h):
    mesh = generate_unit_square(n)
    assert mesh.n_vertices == vertices
    assert mesh.n_triangles == triangles
    assert mesh.h == pytest.approx(h, rel=1e-15)
    assert mesh.metadata["diagonal"] == DIAGONAL


@pytest.mark.parametrize("n", [0, -1, 1.5])
def test_generators_reject_bad_n(n):
    with pytest.raises(InvalidArgumentError):
        generate_unit_square(n)
    with pytest.raises(InvalidArgumentError):
        generate_l_shape(n)


def test_refinement_halves_h():
    for n in (1, 2, 4, 8):
        assert generate_unit_square(2 * n).h == generate_unit_square(n).h / 2


def test_l_shape_topology():
    mesh = generate_l_shape(1)
    assert mesh.n_triangles == 6
    assert mesh.n_vertices == 8
    assert int((~mesh.boundary_edge).sum()) == 5
    assert int((~mesh.boundary_vertex).sum()) == 0
    assert generate_l_shape(2).n_triangles == 24


@pytest.mark.parametrize("mesh", [generate_unit_square(3), generate_l_shape(2)])
def test_generated_meshes_are_valid(mesh):
    validate_mesh(mesh)
    assert np.all(mesh.signed_areas > 0)
    assert mesh.h == mesh.edge_lengths.max()
    counts = (mesh.edge_triangles >= 0).sum(axis=1)
    assert np.array_equal(counts == 1, mesh.boundary_edge)


def test_dump_load_round_trip():
    mesh = generate_unit_square(2)
    assert load_mesh(dump_mesh(mesh)) == mesh


def test_load_rejects_clockwise_triangle():
    text = "nnem-mesh v1\nvertices 3\n0 0 1\n0 1 1\n1 0 1\ntriangles 1\n0 1 2\n"
    with pytest.raises(OrientationError) as err:
        load_mesh(text)
    assert err.value.triangle == 0


def test_load_rejects_wrong_boundary_flags():
    text = dump_mesh(generate_unit_square(2)).replace("0.5 0.5 0", "0.5 0.5 1")
    with pytest.raises(MeshValidationError):
        load_mesh(text)


def test_load_reports_line_number():
    with pytest.raises(MeshFormatError) as err:
        load_mesh("nnem-mesh v1\nvertices x\n")
    assert err.value.line == 2


def test_hanging_node_is_rejected():
    vertices = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
    triangles = [(0, 1, 2), (1, 3, 4), (4, 3, 2)]
    mesh = Mesh.from_arrays(vertices, triangles)
    with pytest.raises(NonConformingMeshError):
        validate_mesh(mesh)


def test_barycentric_examples():
    assert barycentric(REFERENCE, (0.0, 0.0)) == pytest.approx([1.0, 0.0, 0.0], abs=1e-15)
    assert barycentric(REFERENCE, (1 / 3, 1 / 3)) == pytest.approx([1 / 3] * 3, abs=1e-15)
    assert barycentric(REFERENCE, (0.5, 0.5)) == pytest.approx([0.0, 0.5, 0.5], abs=1e-15)


def test_barycentric_gradients_examples():
    g = barycentric_gradients(REFERENCE)
    assert g == pytest.approx(np.array([[-1, -1], [1, 0], [0, 1]]))
    tri = np.array([(0.2, 0.1), (1.3, 0.4), (0.5, 1.7)])
    g = barycentric_gradients(tri)
    assert g.sum(axis=0) == pytest.approx([0.0, 0.0], abs=1e-14)
    assert barycentric_gradients(2 * tri) == pytest.approx(g / 2)


def test_degenerate_triangle_rejected():
    with pytest.raises(InvalidArgumentError):
        barycentric([(0, 0), (1, 0), (2, 0)], (0.5, 0.0))
    with pytest.raises(InvalidArgumentError):
        barycentric_gradients([(0, 0), (1, 1), (2, 2)])


def test_barycentric_is_affine():
    rng = np.random.default_rng(0)
    tri = np.array([(0.2, 0.1), (1.3, 0.4), (0.5, 1.7)])
    grads = barycentric_gradients(tri)
    for _ in range(20):
        p = rng.random(2)
        e = rng.normal(size=2)
        t = 0.3
        diff = barycentric(tri, p + t * e) - barycentric(tri, p)
        assert diff == pytest.approx(t * grads @ e, rel=1e-12, abs=1e-13)


def test_patches():
    mesh = generate_unit_square(2)
    patches = build_patches(mesh)
    assert len(patches.vertex[4].member_triangles) == 6
    for e in range(mesh.n_edges):
        expected = 1 if mesh.boundary_edge[e] else 2
        assert len(patches.edge[e].member_triangles) == expected
    for z, patch in enumerate(patches.vertex):
        members = set(np.flatnonzero((mesh.triangles == z).any(axis=1)).tolist())
        assert set(patch.member_triangles) == members
        for t, local in zip(patch.member_triangles, patch.local_vertices):
            assert mesh.triangles[t][local[0]] == z
    assert patches.vertex[4].diameter == pytest.approx(math.sqrt(2))


def test_overlap_bound():
    single = Mesh.from_arrays(REFERENCE, [(0, 1, 2)])
    assert overlap_bound(single, HierarchicalFamily()) == 7
    assert overlap_bound(generate_unit_square(3), LagrangeFamily(1)) == 3


@pytest.mark.parametrize("bc, expected", [("homogeneous", 5), ("none", 7)])
def test_overlap_bound_counts_active_supports(bc, expected):
    mesh = generate_unit_square(2)
    family = HierarchicalFamily()
    rule = triangle_rule_36()
    table = family.dof_table(mesh, family.enumerate_dofs(mesh, bc))
    values, _ = family.tabulate(mesh, rule.points)
    active = (np.abs(values) > 0) & (table[:, :, None] >= 0)
    assert overlap_bound(mesh, family, bc) == int(active.sum(axis=1).max()) == expected


def test_locate():
    mesh = generate_unit_square(1)
    found = locate(mesh, [(0.75, 0.1), (0.1, 0.75), (2.0, 2.0)])
    assert found.tolist() == [0, 1, -1]


def test_locate_in_blocks(monkeypatch):
    mesh = generate_l_shape(2)
    points = np.random.default_rng(3).uniform(-0.1, 2.1, size=(400, 2))
    expected = np.full(len(points), -1)
    for i, p in enumerate(points):
        for t in range(mesh.n_triangles):
            if np.all(barycentric(mesh.corners[t], p) >= -1e-12):
                expected[i] = t
                break
    monkeypatch.setattr("nnem.mesh.core.LOCATE_BLOCK_PAIRS", 7 * mesh.n_triangles)
    assert locate(mesh, points).tolist() == expected.tolist()
    assert (expected == -1).any() and (expected >= 0).any()


def test_quality_metrics():
    mesh = generate_unit_square(4)
    assert min_angle(mesh) == pytest.approx(45.0)
    # right isosceles triangles: hypotenuse over inradius
    legs = 0.25
    inradius = legs * (2 - math.sqrt(2)) / 2
    assert shape_regularity(mesh) == pytest.approx(legs * math.sqrt(2) / inradius)
