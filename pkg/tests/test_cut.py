import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut import submanifold as sm
from finslercut.cut import (
    cut_locus_sample,
    cut_time,
    cut_times,
    first_focal_times,
    front_cone_sample,
    inj_radius_submanifold,
    interior_radius_study,
    separating_points,
    singleton_intersection_check,
    sphere_condition,
    tubular_verify,
    uniform_sphere_condition,
)
from finslercut.errors import NotPlanar, RadiusBeyondInjectivity


def test_circle_inward_and_outward(E2):
    N = sm.circle()
    s = cut_time(E2, N, sm.unit_normal_sample(E2, N, [0.4], [1.0]))
    assert s.rho == pytest.approx(1, abs=1e-6)
    assert s.limiting_reason == "focal"
    assert np.allclose(s.cut_point, 0, atol=1e-6)
    s = cut_time(E2, N, sm.unit_normal_sample(E2, N, [0.4], [-1.0]))
    # horizon-limited times are reported at the horizon, not as infinity
    assert s.limiting_reason == "horizon" and s.rho == pytest.approx(20.0)


@pytest.mark.parametrize("co", [1.0, -1.0])
def test_equator_cut_at_poles(SP, co):
    N = sm.equator_sphere()
    t = cut_times(SP, N, np.array([[0.3], [2.5]]), np.array([[co], [co]]))
    assert np.allclose(t.rho, np.pi / 2, atol=1e-3)
    # both normals end at the same pole
    assert np.linalg.norm(t.cut_points[0] - t.cut_points[1]) < 1e-3


@settings(max_examples=10)
@given(u=st.floats(0, 2 * np.pi))
def test_ellipse_cut_time_hits_major_axis(u):
    # inward normals of an ellipse are cut where they cross the major axis
    a, b = 2.0, 1.0
    E2 = fm.euclidean()
    t = cut_times(E2, sm.ellipse(a, b), np.array([[u]]), np.array([[1.0]]))
    expect = b / a * np.hypot(b * np.cos(u), a * np.sin(u))
    # at the vertices the predicate gap grows quadratically, so sqrt(tol_d) resolution
    assert t.rho[0] == pytest.approx(expect, abs=1e-4)
    assert t.cut_points[0, 1] == pytest.approx(0, abs=1e-5)


def test_focal_times(E2, SP):
    U = np.array([[0.2], [1.9]])
    W = np.ones((2, 1))
    assert np.allclose(first_focal_times(E2, sm.circle(2.0), U, W, 5.0), 2.0, atol=1e-7)
    assert np.all(np.isinf(first_focal_times(E2, sm.line(), U, W, 5.0)))
    assert np.allclose(first_focal_times(SP, sm.equator_sphere(), U, W, 3.0), np.pi / 2, atol=1e-6)


def test_cut_time_not_after_focal_time(E2):
    N = sm.ellipse(2, 1)
    U = N.sample_params(24)
    W = np.ones((24, 1))
    t = cut_times(E2, N, U, W)
    assert np.all(t.rho <= t.focal + 1e-4)
    assert np.all(t.rho > 0)


def test_inj_radius_circle(E2):
    r = inj_radius_submanifold(E2, sm.circle(), sample_count=64)
    assert r.value == pytest.approx(1, abs=1e-3)
    assert r.positive and r.local_uniform


def test_separating_points(E2):
    rep = separating_points(E2, sm.circle(), np.array([[0, 0], [0.5, 0]]))
    assert np.allclose(rep.points, [[0, 0]]) and rep.degenerate[0]
    rep = separating_points(E2, sm.x32_curve(), np.array([[0, 0.1]]))
    assert rep.multiplicity[0] == 2


def test_circle_cut_locus_is_center(E2):
    cloud = cut_locus_sample(E2, sm.circle(), normal_sample_count=64)
    assert np.abs(cloud.points).max() < 1e-5
    assert cloud.d_to_cut_locus == pytest.approx(1, abs=1e-6)
    assert cloud.disjoint


def test_tubular_circle(E2):
    N = sm.circle()
    ok = tubular_verify(E2, N, 0.5, probe_count=50, n_u=64, n_t=8, inj_plus=1.0)
    assert ok.collision_count == 0 and ok.probe_max_error <= 1e-4
    bad = tubular_verify(E2, N, 1.2, probe_count=20, n_u=64, n_t=8, inj_plus=1.0)
    assert bad.collision_count > 0
    assert min(np.linalg.norm(c[2]) for c in bad.collisions) < 0.5


def test_singleton_checks(E2):
    r = singleton_intersection_check(E2, sm.circle(), [0.9, 0])
    assert r.verdict == "unique" and np.allclose(r.witnesses, [[1, 0]], atol=1e-6)
    assert singleton_intersection_check(E2, sm.x32_curve(), [0, 0.05]).verdict == "multiple"
    assert singleton_intersection_check(E2, sm.ellipse(2, 1), [0, 0.7]).verdict == "unique"


def test_sphere_conditions(E2, SP):
    assert uniform_sphere_condition(E2, sm.circle(), 0.5, samples=32).interior
    N = sm.ellipse(2, 1)
    assert sphere_condition(E2, N, 0.0, 0.4).interior
    assert not sphere_condition(E2, N, 0.0, 0.6).interior
    with pytest.raises(NotPlanar):
        sphere_condition(SP, sm.equator_sphere(), 0.0, 0.1)


def test_interior_radius_shrinks_at_c1_point(E2):
    st_ = interior_radius_study(E2, sm.x32_curve(), u0=0.0, levels=3)
    assert st_.monotone and st_.radii[-1] < st_.radii[0]


def test_front_cones(E2, RD, SP):
    f = front_cone_sample(E2, sm.circle(), [0.0], 0.3)
    assert sorted(f.points[:, 0]) == pytest.approx([0.7, 1.3])
    f = front_cone_sample(RD, sm.point([0.0, 0.0]), None, 0.5, count=32)
    assert np.allclose(RD.F(np.zeros((32, 2)), f.points), 0.5, atol=1e-8)
    f = front_cone_sample(SP, sm.equator_sphere(), [0.0], 0.4)
    assert f.distinct and f.level_error < 1e-6
    with pytest.raises(RadiusBeyondInjectivity):
        front_cone_sample(E2, sm.circle(), [0.0], 1.5)
