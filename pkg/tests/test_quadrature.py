import math

import numpy as np
import pytest

from nnem.errors import InvalidArgumentError
from nnem.mesh import barycentric, generate_l_shape, generate_unit_square
from nnem.quadrature import (
    element_integrals,
    gauss_legendre_1d,
    integrate_on_element,
    integrate_on_mesh,
    is_exact,
    monomial_reference_integral,
    quadrature_weights,
    triangle_rule,
    triangle_rule_36,
)

REFERENCE = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


@pytest.fixture(scope="module")
def rule():
    return triangle_rule_36()


def test_gauss_single_point():
    x, w = gauss_legendre_1d(1)
    assert x == pytest.approx([0.5])
    assert w == pytest.approx([1.0])


def test_gauss_two_points():
    x, w = gauss_legendre_1d(2)
    r = 1 / (2 * math.sqrt(3))
    assert x == pytest.approx([0.5 - r, 0.5 + r], abs=1e-15)
    assert w == pytest.approx([0.5, 0.5], abs=1e-15)


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_gauss_exact_degree(n):
    x, w = gauss_legendre_1d(n)
    p = 2 * n - 1
    assert float(np.dot(w, x**p)) == pytest.approx(1 / (p + 1), rel=1e-14)


@pytest.mark.parametrize("n", [0, 65, -3])
def test_gauss_rejects_bad_counts(n):
    with pytest.raises(InvalidArgumentError):
        gauss_legendre_1d(n)


def test_rule_36_shape(rule):
    assert rule.size == 36
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-14)
    assert np.all(rule.weights > 0)
    assert np.all(rule.points >= 0) and np.all(rule.points <= 1)
    assert rule.points.sum(axis=1) == pytest.approx(np.ones(36), abs=1e-15)
    assert rule.declared_exact_degree == 5
    assert is_exact(rule, 5)


def test_rule_36_monomials(rule):
    x, y = rule.points[:, 1], rule.points[:, 2]
    assert float(np.dot(rule.weights, x**2 * y)) == pytest.approx(1 / 60, rel=1e-14)
    lam = rule.points
    product = lam[:, 0] * lam[:, 1] * lam[:, 2]
    assert float(np.dot(rule.weights, product)) == pytest.approx(1 / 120, rel=1e-13)
    assert monomial_reference_integral(2, 1) == pytest.approx(1 / 60)


def test_triangle_rule_sizes():
    assert triangle_rule(1).size == 1
    assert triangle_rule(1).declared_exact_degree == 0
    assert triangle_rule(16).declared_exact_degree == 5
    with pytest.raises(InvalidArgumentError):
        triangle_rule(10)


def test_integrate_on_element(rule):
    tri = np.array([(0.2, 0.1), (1.3, 0.4), (0.5, 1.7)])
    d1, d2 = tri[1] - tri[0], tri[2] - tri[0]
    area = 0.5 * abs(d1[0] * d2[1] - d1[1] * d2[0])
    assert integrate_on_element(lambda p: np.ones(len(p)), tri, rule) == pytest.approx(area)
    first = integrate_on_element(lambda p: barycentric(tri, p)[:, 0], tri, rule)
    assert first == pytest.approx(area / 3, rel=1e-13)
    bubble = integrate_on_element(lambda p: np.prod(barycentric(tri, p), axis=1), tri, rule)
    assert bubble == pytest.approx(area / 60, rel=1e-13)


def test_affine_invariance(rule):
    jac = np.array([[1.3, 0.4], [-0.2, 0.9]])
    shift = np.array([0.5, -1.0])
    image = REFERENCE @ jac.T + shift
    inverse = np.linalg.inv(jac)

    def f(p):
        return p[:, 0] ** 2 * p[:, 1] + 1.0

    def pulled(p):
        return f((p - shift) @ inverse.T)

    on_image = integrate_on_element(pulled, image, rule)
    on_reference = integrate_on_element(f, REFERENCE, rule)
    assert on_image == pytest.approx(abs(np.linalg.det(jac)) * on_reference, rel=1e-13)


def test_integrate_on_mesh(rule):
    square = generate_unit_square(4)
    assert integrate_on_mesh(lambda p: np.ones(len(p)), square, rule) == pytest.approx(1.0, abs=1e-14)
    assert integrate_on_mesh(lambda p: p[:, 0], square, rule) == pytest.approx(0.5, abs=1e-14)
    assert integrate_on_mesh(lambda p: np.ones(len(p)), generate_l_shape(2), rule) == pytest.approx(3.0)


def test_smooth_integrand(rule):
    mesh = generate_unit_square(8)
    value = integrate_on_mesh(lambda p: np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1]), mesh, rule)
    assert value == pytest.approx(4 / math.pi**2, abs=1e-10)


def test_quadrature_error_shrinks_with_refinement():
    # the 9-point rule is exact to degree 4, so the error is at least O(h^5)
    coarse = triangle_rule(9)

    def f(p):
        return np.exp(p[:, 0]) * np.sin(np.pi * p[:, 1])

    exact = (math.e - 1) * 2 / math.pi
    errors = [abs(integrate_on_mesh(f, generate_unit_square(n), coarse) - exact) for n in (2, 4, 8)]
    assert errors[0] > errors[1] > errors[2] > 0
    assert math.log2(errors[1] / errors[2]) >= 4.0


def test_deterministic_reduction_matches(rule):
    mesh = generate_unit_square(4)

    def f(p):
        return np.exp(p[:, 0] - p[:, 1])

    assert integrate_on_mesh(f, mesh, rule) == pytest.approx(
        integrate_on_mesh(f, mesh, rule, deterministic=False), rel=1e-14
    )
    assert element_integrals(f, mesh, rule).shape == (mesh.n_triangles,)


def test_quadrature_weights(rule):
    mesh = generate_unit_square(2)
    w = quadrature_weights(mesh, rule)
    assert w.shape == (8, 36)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
