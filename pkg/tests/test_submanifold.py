import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut import submanifold as sm
from finslercut.errors import NotC2, NotNormal, NotSelfAdjoint
from finslercut.metric import TangentVector

param = st.floats(0, 2 * np.pi)


def test_circle_inward_normal(E2):
    n = sm.unit_normal_sample(E2, sm.circle(), [0.0], [1.0])
    assert np.allclose(n.components, [-1, 0], atol=1e-12)
    assert n.co_orientation == 1.0


def test_normal_from_full_covector(E2):
    n = sm.unit_normal_sample(E2, sm.circle(), [0.0], [-3.0, 0.0])
    assert np.allclose(n.components, [-1, 0], atol=1e-12)
    with pytest.raises(NotNormal):
        sm.unit_normal_sample(E2, sm.circle(), [0.0], [1.0, 1.0])


@pytest.mark.parametrize("name", ["RD", "SP", "HY"])
@given(u=param, co=st.sampled_from([1.0, -1.0]))
def test_normals_are_unit_and_orthogonal(name, u, co, request):
    m = request.getfixturevalue(name)
    N = sm.circle(0.5, (0.1, 0.0))
    n = sm.unit_normal_sample(m, N, [u], [co])
    assert m.F(n.point, n.components) == pytest.approx(1.0, abs=1e-12)
    assert sm.normal_residual(m, N, [u], n.components[None])[0] < 1e-10


def test_second_fundamental_form_circle(E2):
    N = sm.circle()
    n = sm.unit_normal_sample(E2, N, [0.7], [1.0])
    h = sm.second_fundamental_form(E2, N, n, [1.0], [1.0])
    assert np.allclose(h, n.components, atol=1e-10)
    L = sm.line()
    n = sm.unit_normal_sample(E2, L, [0.3], [1.0])
    assert np.allclose(sm.second_fundamental_form(E2, L, n, [1.0], [1.0]), 0)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_shape_operator_of_circles(E2, R):
    N = sm.circle(R)
    n = sm.unit_normal_sample(E2, N, [1.1], [1.0])
    assert sm.shape_operator(E2, N, n)[0, 0] == pytest.approx(1 / R, rel=1e-10)
    assert sm.principal_curvatures(E2, N, n).values == pytest.approx([1 / R])


def test_ellipse_vertex_curvature(E2):
    N = sm.ellipse(2, 1)
    n = sm.unit_normal_sample(E2, N, [0.0], [1.0])
    assert sm.principal_curvatures(E2, N, n).values[0] == pytest.approx(2.0, abs=1e-4)
    n = sm.unit_normal_sample(E2, N, [np.pi / 2], [1.0])
    assert sm.principal_curvatures(E2, N, n).values[0] == pytest.approx(0.25, abs=1e-4)


@given(u=param)
def test_ellipse_curvature_formula(u):
    # planar curvature a b / (a^2 sin^2 + b^2 cos^2)^(3/2)
    a, b = 2.0, 1.0
    E2 = fm.euclidean()
    N = sm.ellipse(a, b)
    n = sm.unit_normal_sample(E2, N, [u], [1.0])
    expect = a * b / (a**2 * np.sin(u) ** 2 + b**2 * np.cos(u) ** 2) ** 1.5
    assert sm.principal_curvatures(E2, N, n).values[0] == pytest.approx(expect, rel=1e-9)


@pytest.mark.parametrize("co", [1.0, -1.0])
def test_equator_totally_geodesic(SP, co):
    N = sm.equator_sphere()
    for u in (0.3, 2.0, 4.5):
        n = sm.unit_normal_sample(SP, N, [u], [co])
        assert sm.shape_operator(SP, N, n)[0, 0] == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize("name", ["E2", "RD", "SP", "HY"])
@given(u=param, co=st.sampled_from([1.0, -1.0]))
def test_two_shape_operator_routes_agree(name, u, co, request):
    m = request.getfixturevalue(name)
    N = sm.ellipse(0.6, 0.4)
    n = sm.unit_normal_sample(m, N, [u], [co])
    A = sm.shape_operator(m, N, n)
    B = sm.shape_operator_from_normal_field(m, N, n)
    assert np.allclose(A, B, atol=1e-6 * max(1, np.abs(A).max()))


@given(u=param)
def test_reverse_shape_law(u):
    m = fm.randers(b=(0.5, 0.0))
    rev = fm.reverse_metric(m)
    N = sm.ellipse(0.7, 0.4)
    n = sm.unit_normal_sample(m, N, [u], [1.0])
    flipped = sm.NormalVector(n.u, TangentVector(n.point, -n.components), -1.0, -n.direction)
    assert sm.shape_operator(rev, N, flipped)[0, 0] == pytest.approx(-sm.shape_operator(m, N, n)[0, 0], abs=1e-9)


def test_shape_operator_rejects_c1_point(E2):
    N = sm.x32_curve()
    n = sm.unit_normal_sample(E2, N, [0.0], [1.0])
    with pytest.raises(NotC2):
        sm.shape_operator(E2, N, n)
    n = sm.unit_normal_sample(E2, N, [0.5], [1.0])
    assert sm.shape_operator(E2, N, n)[0, 0] > 0


def test_shape_operator_rejects_non_normal(E2):
    N = sm.circle()
    bad = sm.NormalVector(np.array([0.0]), TangentVector(np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    with pytest.raises(NotNormal):
        sm.shape_operator(E2, N, bad)


def test_x32_curve_is_simple_closed():
    N = sm.x32_curve()
    assert sm.curve_is_simple(N)
    assert np.allclose(N.x(np.array([[0.5]])), [[0.5, 0.5**1.5]])


def test_param_table_circle(E2):
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    N = sm.param_table(np.stack([np.cos(th), np.sin(th)], axis=1))
    n = sm.unit_normal_sample(E2, N, [0.4], [1.0])
    assert sm.principal_curvatures(E2, N, n).values[0] == pytest.approx(1.0, abs=1e-3)


def test_dominance_examples():
    I = np.eye(2)
    r = sm.eigen_dominance_check(2 * I, I, I)
    assert r.dominates and r.difference_positive_definite
    r = sm.eigen_dominance_check(np.diag([3.0, 1.0]), 2 * I, I)
    assert not r.dominates and r.min_eig_A == 1.0
    with pytest.raises(NotSelfAdjoint):
        sm.eigen_dominance_check(np.array([[1.0, 1.0], [0.0, 1.0]]), I, I)


def test_dominance_gap_implies_positive_difference():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        eb = rng.uniform(-2, 2, 3)
        ea = eb.max() + 0.1 + np.append(0.0, rng.uniform(0, 2, 2))
        A = Q @ np.diag(ea) @ Q.T
        B = R @ np.diag(eb) @ R.T
        r = sm.eigen_dominance_check(A, B, np.eye(3))
        assert r.dominates and r.difference_positive_definite and r.min_eig_difference > 0
