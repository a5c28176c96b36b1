import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut.calculus import (
    ScalarField,
    differential,
    distance_field,
    gradient,
    hessian,
    hessian_via_gradient,
    level_set_shape_from_hessian,
)
from finslercut.errors import SingularPoint

pt = st.tuples(st.floats(-2, 2), st.floats(-2, 2)).map(np.array)


def test_linear_function(E2):
    f = lambda x: x[..., 0]
    assert np.allclose(differential(f, [0.3, 0.7]), [1, 0])
    assert np.allclose(gradient(E2, f, [0.3, 0.7]).components, [1, 0])
    assert np.allclose(hessian(E2, f, [0.3, 0.7]).matrix, 0, atol=1e-6)


@given(p=pt)
def test_euclidean_distance_gradient(p):
    E2 = fm.euclidean()
    q0 = np.array([0.2, -0.1])
    if np.linalg.norm(p - q0) < 0.1:
        return
    g = gradient(E2, distance_field(E2, q0), p).components
    assert np.allclose(g, (p - q0) / np.linalg.norm(p - q0), atol=1e-6)


def test_quadratic_hessian(E2):
    f = ScalarField(lambda x: 0.5 * np.sum(x**2, axis=-1), df=lambda x: np.asarray(x, float))
    assert np.allclose(hessian(E2, f, [1.0, -2.0]).matrix, np.eye(2), atol=1e-8)


def test_singular_point(E2):
    with pytest.raises(SingularPoint):
        gradient(E2, lambda x: np.sum(x**2, axis=-1), [0.0, 0.0])


@pytest.mark.parametrize("name", ["RD", "HY", "SP"])
def test_hessian_routes_agree(name, request):
    m = request.getfixturevalue(name)
    f = distance_field(m, [0.05, -0.1])
    p = np.array([0.4, 0.3])
    H = hessian(m, f, p).matrix
    G = hessian_via_gradient(m, f, p)
    assert np.allclose(H, G, atol=1e-4 * max(1, np.abs(H).max()))


def test_level_set_of_euclidean_distance(E2):
    # outward normal of the circle of radius 2
    A, _ = level_set_shape_from_hessian(E2, distance_field(E2, [0, 0]), [2.0, 0.0])
    assert A[0, 0] == pytest.approx(-0.5, abs=1e-6)
