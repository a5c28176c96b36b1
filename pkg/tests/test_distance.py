import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut import submanifold as sm
from finslercut.distance import (
    distance_point,
    distance_to_submanifold,
    distances_to_submanifold,
    grid_oracle_distance,
    shoot,
)
from finslercut.errors import OutOfBox

pt = st.tuples(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6)).map(np.array)


def test_closed_form_values(E2, RD, SP):
    assert distance_point(E2, [0, 0], [3, 4]).value == pytest.approx(5)
    assert distance_point(RD, [0, 0], [1, 0]).value == pytest.approx(1.5)
    assert distance_point(RD, [1, 0], [0, 0]).value == pytest.approx(0.5)
    # chart point at spherical distance 1 from the chart origin
    assert distance_point(SP, [0, 0], [np.tan(0.5), 0]).value == pytest.approx(1.0, abs=1e-4)


def test_same_point(E2):
    r = distance_point(E2, [1, 2], [1, 2])
    assert r.value == 0 and r.minimizer is None


def test_minimizer_ends_at_target(HY):
    p, q = np.array([0.1, 0.2]), np.array([-0.3, 0.4])
    r = distance_point(HY, p, q)
    rec = r.minimizer
    assert np.allclose(rec.points[-1], q, atol=1e-6)
    assert np.allclose(rec.speeds(HY), 1, atol=1e-8)


@pytest.mark.parametrize("name", ["RD", "HY"])
def test_shooting_matches_closed_form(name, request):
    m = request.getfixturevalue(name)
    rng = np.random.default_rng(1)
    for _ in range(3):
        p, q = rng.uniform(-0.5, 0.5, (2, 2))
        val, _, _ = shoot(m, p, q)
        assert val == pytest.approx(float(m.distance(p, q)), rel=1e-6)


@given(p=pt, q=pt, r=pt)
def test_triangle_inequality_randers(p, q, r):
    m = fm.randers(b=(0.5, 0.0))
    d = lambda a, b: float(m.distance(a, b))
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-12


def test_grid_oracle_examples(E2, RD):
    assert grid_oracle_distance(E2, [0, 0], [1, 1]) == pytest.approx(np.sqrt(2), rel=0.03)
    assert grid_oracle_distance(RD, [0, 0], [1, 0]) == pytest.approx(1.5, rel=0.03)
    assert grid_oracle_distance(RD, [1, 0], [0, 0]) == pytest.approx(0.5, rel=0.03)


def test_grid_oracle_box(E2):
    with pytest.raises(OutOfBox):
        grid_oracle_distance(E2, [0, 0], [5, 0], box=[[-1, -1], [1, 1]])


def test_distance_to_circle(E2):
    N = sm.circle()
    r = distance_to_submanifold(E2, N, [0.5, 0])
    assert r.value == pytest.approx(0.5) and r.multiplicity == 1
    assert np.allclose(N.x(r.foot_params[None]), [[1, 0]], atol=1e-6)
    r = distance_to_submanifold(E2, N, [0, 0])
    assert r.value == pytest.approx(1) and r.degenerate


@given(q=pt)
def test_distance_to_circle_formula(q):
    E2 = fm.euclidean()
    r = distances_to_submanifold(E2, sm.circle(), q[None])
    assert r.values[0] == pytest.approx(abs(1 - np.linalg.norm(q)), abs=1e-9)


def test_x32_two_feet(E2):
    r = distance_to_submanifold(E2, sm.x32_curve(), [0, 0.1])
    assert r.multiplicity == 2
    feet = sm.x32_curve().x(np.asarray(distances_to_submanifold(E2, sm.x32_curve(), np.array([[0, 0.1]])).all_feet[0]))
    assert feet[:, 0].sum() == pytest.approx(0, abs=1e-6)
    assert feet[0, 1] == pytest.approx(feet[1, 1], abs=1e-8)


def test_distance_to_equator_by_shooting(SP):
    # the unit sphere's equator lies at spherical distance |latitude|
    N = sm.equator_sphere()
    r = distance_to_submanifold(SP, N, [0.0, 0.0])
    assert r.value == pytest.approx(np.pi / 4, abs=1e-6)
