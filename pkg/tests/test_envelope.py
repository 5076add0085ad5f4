import numpy as np
import pytest

from nnem.envelope import (
    HierarchicalFamily,
    LagrangeFamily,
    PartitionOfUnity,
    create_family,
    enumerate_dofs,
    envelope_eval,
    envelope_grad,
    pou_constants,
    split_dofs,
)
from nnem.errors import InvalidArgumentError
from nnem.mesh import Mesh, barycentric, generate_l_shape, generate_unit_square
from nnem.quadrature import gauss_legendre_1d, triangle_rule_36

FAMILIES = [HierarchicalFamily(), HierarchicalFamily(False), LagrangeFamily(1), LagrangeFamily(2), LagrangeFamily(3)]


@pytest.fixture(scope="module")
def rule():
    return triangle_rule_36()


def test_create_family():
    assert isinstance(create_family("hierarchical"), HierarchicalFamily)
    assert create_family("lagrange", order=3).order == 3
    assert not create_family("hierarchical", bubbles=False).include_element_bubbles
    assert create_family("hierarchical", bubbles=False).order == 2
    with pytest.raises(InvalidArgumentError):
        create_family("serendipity")
    with pytest.raises(InvalidArgumentError):
        LagrangeFamily(4)


@pytest.mark.parametrize(
    "mesh, family, bc, count",
    [
        (generate_l_shape(1), HierarchicalFamily(), "homogeneous", 11),
        (generate_unit_square(2), LagrangeFamily(1), "homogeneous", 1),
        (generate_unit_square(2), LagrangeFamily(2), "homogeneous", 9),
        (generate_unit_square(2), LagrangeFamily(2), "none", 25),
        (generate_unit_square(2), LagrangeFamily(3), "none", 49),
        (generate_unit_square(1), HierarchicalFamily(), "none", 4 + 5 + 2),
    ],
)
def test_dof_counts(mesh, family, bc, count):
    assert len(enumerate_dofs(mesh, family, bc)) == count


def test_hierarchical_l_shape_carriers():
    dofs = enumerate_dofs(generate_l_shape(1), HierarchicalFamily(), "homogeneous")
    kinds = [d.carrier for d in dofs]
    assert kinds.count("vertex") == 0
    assert kinds.count("edge") == 5
    assert kinds.count("element") == 6


def test_unknown_boundary_condition():
    with pytest.raises(InvalidArgumentError):
        enumerate_dofs(generate_unit_square(1), LagrangeFamily(1), "robin")


def test_nonhomogeneous_lists_interior_first():
    mesh = generate_unit_square(3)
    dofs = enumerate_dofs(mesh, LagrangeFamily(2), "nonhomogeneous")
    flags = [d.on_dirichlet_boundary for d in dofs]
    first_boundary = flags.index(True)
    assert not any(flags[:first_boundary])
    assert all(flags[first_boundary:])
    interior, boundary = split_dofs(dofs)
    homogeneous = enumerate_dofs(mesh, LagrangeFamily(2), "homogeneous")
    assert [(d.carrier, d.carrier_index, d.node) for d in interior] == [
        (d.carrier, d.carrier_index, d.node) for d in homogeneous
    ]
    assert len(interior) + len(boundary) == len(dofs)
    assert [d.index for d in dofs] == list(range(len(dofs)))


def test_hierarchical_node_values():
    mesh = generate_unit_square(2)
    family = HierarchicalFamily()
    for dof in enumerate_dofs(mesh, family, "none"):
        t = dof.patch.member_triangles[0]
        node = np.array(family.local_functions[dof.local_index[0]].node)
        value = envelope_eval(family, dof, mesh, t, node[None])[0]
        expected = {"vertex": 1.0, "edge": 0.25, "element": 1 / 27}[dof.carrier]
        assert value == pytest.approx(expected)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_lagrange_nodal_property(order):
    family = LagrangeFamily(order)
    nodes = np.array([fn.node for fn in family.local_functions])
    assert family.local_values(nodes) == pytest.approx(np.eye(family.n_local), abs=1e-13)
    assert family.n_local == (order + 1) * (order + 2) // 2


def test_dof_positions_match_nodes():
    mesh = generate_unit_square(2)
    family = LagrangeFamily(3)
    for dof in enumerate_dofs(mesh, family, "none"):
        for t, f in zip(dof.patch.member_triangles, dof.local_index):
            node = np.array(family.local_functions[f].node) @ mesh.corners[t]
            assert node == pytest.approx(dof.position, abs=1e-14)


def test_vertex_gradient_and_support():
    mesh = generate_unit_square(2)
    family = HierarchicalFamily()
    dof = next(d for d in enumerate_dofs(mesh, family, "none") if d.carrier == "vertex" and d.carrier_index == 4)
    grads = mesh.barycentric_gradients()
    point = np.array([[0.2, 0.3, 0.5]])
    for t, local in zip(dof.patch.member_triangles, dof.patch.local_vertices):
        assert envelope_grad(family, dof, mesh, t, point)[0] == pytest.approx(grads[t, local[0]])
    outside = [t for t in range(mesh.n_triangles) if t not in dof.patch]
    assert outside
    for t in outside:
        assert envelope_eval(family, dof, mesh, t, point)[0] == 0.0
        assert np.all(envelope_grad(family, dof, mesh, t, point) == 0.0)


@pytest.mark.parametrize("family", [HierarchicalFamily(), LagrangeFamily(3)])
def test_gradient_matches_finite_differences(family):
    mesh = generate_unit_square(2)
    t = 5
    corners = mesh.corners[t]
    x = np.array([0.2, 0.5, 0.3]) @ corners
    step = 1e-6
    for dof in enumerate_dofs(mesh, family, "none"):
        if t not in dof.patch:
            continue
        grad = envelope_grad(family, dof, mesh, t, barycentric(corners, x)[None])[0]
        for d in range(2):
            e = np.zeros(2)
            e[d] = step
            plus = envelope_eval(family, dof, mesh, t, barycentric(corners, x + e)[None])[0]
            minus = envelope_eval(family, dof, mesh, t, barycentric(corners, x - e)[None])[0]
            assert (plus - minus) / (2 * step) == pytest.approx(grad[d], abs=1e-7)


@pytest.mark.parametrize("family", FAMILIES, ids=repr)
def test_homogeneous_trace_vanishes(family):
    mesh = generate_unit_square(3)
    dofs = enumerate_dofs(mesh, family, "homogeneous")
    table = family.dof_table(mesh, dofs)
    s, _ = gauss_legendre_1d(5)
    for e in np.flatnonzero(mesh.boundary_edge):
        t = int(mesh.edge_triangles[e, 0])
        k = int(np.flatnonzero(mesh.triangle_edges[t] == e)[0])
        bary = np.zeros((len(s), 3))
        bary[:, (k + 1) % 3] = 1.0 - s
        bary[:, (k + 2) % 3] = s
        values, _ = family.tabulate(mesh, bary, [t])
        active = table[t] >= 0
        assert np.abs(values[0][active]).max(initial=0.0) <= 1e-14


@pytest.mark.parametrize("family", FAMILIES, ids=repr)
@pytest.mark.parametrize("mesh", [generate_unit_square(3), generate_l_shape(2)], ids=["square", "l_shape"])
def test_partition_of_unity(family, mesh, rule):
    psi, dpsi, degenerate = PartitionOfUnity(mesh, family).at_quadrature(rule)
    assert not degenerate.any()
    assert psi.sum(axis=1) == pytest.approx(np.ones((mesh.n_triangles, rule.size)), abs=1e-12)
    assert dpsi.sum(axis=1) == pytest.approx(np.zeros((mesh.n_triangles, rule.size, 2)), abs=1e-10)


def test_hierarchical_partition_is_bounded(rule):
    psi, _, _ = PartitionOfUnity(generate_l_shape(2), HierarchicalFamily()).at_quadrature(rule)
    assert psi.min() >= 0.0
    assert psi.max() <= 1.0


def test_single_triangle_bubble_weight():
    mesh = Mesh.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    sample = PartitionOfUnity(mesh, HierarchicalFamily()).evaluate(0, [1 / 3, 1 / 3, 1 / 3])
    assert sample.values[6, 0] == pytest.approx((1 / 27) / (1 + 1 / 3 + 1 / 27))
    assert sorted(sample.dofs.tolist()) == list(range(7))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_pou_overlap_is_independent_of_mesh_size(n, rule):
    constants = pou_constants(generate_unit_square(n), HierarchicalFamily(), rule)
    assert constants.overlap == 7
    assert 0.0 < constants.c_inf <= 1.0
    assert pou_constants(generate_l_shape(n), HierarchicalFamily(), rule).overlap == 7


def test_pou_constants(rule):
    coarse = pou_constants(generate_unit_square(2), HierarchicalFamily(), rule)
    fine = pou_constants(generate_unit_square(4), HierarchicalFamily(), rule)
    assert coarse.overlap == fine.overlap == 7
    assert 0.5 <= fine.c_grad / coarse.c_grad <= 2.0
    assert pou_constants(generate_unit_square(3), LagrangeFamily(1), rule).overlap == 3


def test_lagrange_reproduces_quadratics(rule):
    mesh = generate_unit_square(3)
    family = LagrangeFamily(2)
    dofs = enumerate_dofs(mesh, family, "none")
    table = family.dof_table(mesh, dofs)

    def poly(p):
        return p[..., 0] ** 2 + p[..., 0] * p[..., 1] - 0.5 * p[..., 1]

    coeffs = np.array([poly(np.array(d.position)) for d in dofs])
    values, _ = family.tabulate(mesh, rule.points)
    field = np.einsum("tf,tfq->tq", coeffs[table], values)
    exact = poly(mesh.to_physical(rule.points))
    assert field == pytest.approx(exact, abs=1e-13)
