import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut.errors import DegenerateFlag, OutsideDomain, ZeroVector
from finslercut.geodesic import (
    covariant_derivative,
    exp_map,
    flag_curvature,
    integrate_geodesic,
)
from finslercut.jacobi import jacobi_field, n_jacobi_field
from finslercut.metric import TangentVector
from finslercut.ode import integrate_batch
from finslercut.submanifold import circle, line


def tv(p, v):
    return TangentVector(np.asarray(p, float), np.asarray(v, float))


def test_integrator_harmonic_oscillator():
    sol = integrate_batch(lambda Y: np.stack([Y[:, 1], -Y[:, 0]], axis=1), [[1.0, 0.0], [0.0, 2.0]], 6.0, 1e-11, 1e-11)
    t = np.linspace(0, 6, 13)
    Y = np.stack([sol(s) for s in t])
    assert np.allclose(Y[:, 0, 0], np.cos(t), atol=1e-8)
    assert np.allclose(Y[:, 1, 0], 2 * np.sin(t), atol=1e-8)


def test_integrator_freezes_rows_leaving_domain():
    sol = integrate_batch(lambda Y: np.ones_like(Y), [[0.0], [5.0]], 3.0, inside=lambda Y: Y[:, 0] < 2.0)
    assert np.isfinite(sol.exit_time[0]) and sol.exit_time[0] <= 2.0 + 1e-9
    assert sol.exit_time[1] == 0.0


def test_flat_geodesics_are_straight(E2, RD):
    rec = integrate_geodesic(E2, tv([0, 0], [1, 0]), 2.0)
    assert np.allclose(rec.points[-1], [2, 0], atol=1e-10)
    rec = integrate_geodesic(RD, tv([0, 0], [0, 1]), 2.0)
    assert np.allclose(rec.points[:, 0], 0, atol=1e-10)
    assert rec.points[-1, 1] == pytest.approx(2.0)


def test_sphere_great_circle_and_speed(SP):
    # unit speed from the chart origin along e1: x(t) = tan(t/2)
    rec = integrate_geodesic(SP, tv([0, 0], [0.5, 0]), 2.5)
    x, _ = rec.at(np.array([0.5, 1.5, 2.5]))
    assert np.allclose(x[:, 0], np.tan(np.array([0.5, 1.5, 2.5]) / 2), rtol=1e-8)
    assert np.abs(rec.speeds(SP) - 1).max() <= 1e-8


def test_exp_values(E2, SP):
    assert np.allclose(exp_map(E2, tv([1, 1], [2, 0])), [3, 1])
    assert np.allclose(exp_map(SP, tv([0, 0], [np.pi / 4, 0])), [1, 0], atol=1e-9)
    assert np.allclose(exp_map(E2, tv([1, 1], [0, 0])), [1, 1])


def test_exp_leaving_chart(HY):
    with pytest.raises(OutsideDomain):
        exp_map(HY, tv([0, 0], [10, 0]))


def test_zero_initial_velocity_rejected(E2):
    with pytest.raises(ZeroVector):
        integrate_geodesic(E2, tv([0, 0], [0, 0]), 1.0)


@pytest.mark.parametrize("name", ["SP", "RD"])
def test_geodesic_velocity_is_parallel(name, request):
    m = request.getfixturevalue(name)
    rec = integrate_geodesic(m, tv([0.1, -0.2], [0.3, 0.4]), 1.0)
    vel = lambda t: rec.at(t)[1]
    assert np.abs(covariant_derivative(m, rec, vel, vel, 0.5)).max() < 1e-6


def test_constant_field_in_plane(E2):
    c = lambda t: np.array([np.cos(t), t**2])
    W = lambda t: np.array([-np.sin(t), 2 * t])
    assert np.allclose(covariant_derivative(E2, c, W, lambda t: np.array([1.0, 2.0]), 0.3), 0, atol=1e-8)


angle = st.floats(0, 2 * np.pi)
pt = st.floats(-0.6, 0.6)


@pytest.mark.parametrize("name,K,tol", [("E2", 0, 1e-6), ("RD", 0, 1e-6), ("SP", 1, 1e-3), ("HY", -1, 1e-3)])
@given(x=pt, y=pt, a=angle, b=st.floats(0.3, 2.8))
def test_flag_curvature_constant(name, K, tol, x, y, a, b, request):
    m = request.getfixturevalue(name)
    v = tv([x, y], [np.cos(a), np.sin(a)])
    w = np.array([np.cos(a + b), np.sin(a + b)])
    assert flag_curvature(m, v, w) == pytest.approx(K, abs=tol)


def test_degenerate_flag(SP):
    with pytest.raises(DegenerateFlag):
        flag_curvature(SP, tv([0, 0], [1, 0]), [2, 0])


def _g_norm(m, x, y, J):
    return float(np.sqrt(J @ m.g(x, y) @ J))


def test_flat_jacobi(E2):
    rec = jacobi_field(E2, tv([0, 0], [1, 0]), [0, 0], [0, 1], t_end=2.0)
    J, DJ = rec.at(E2, 1.5)
    assert np.allclose(J, [0, 1.5]) and np.allclose(DJ, [0, 1])


@pytest.mark.parametrize("name,profile", [("SP", np.sin), ("HY", np.sinh)])
def test_constant_curvature_jacobi(name, profile, request):
    m = request.getfixturevalue(name)
    p = np.array([0.1, 0.05])
    y = np.array([1.0, 0.0]) / m.F(p, np.array([1.0, 0.0]))
    e = np.array([0.0, 1.0])
    e = e / _g_norm(m, p, y, e)
    t_end = 2.5 if name == "SP" else 1.0
    rec = jacobi_field(m, tv(p, y), [0, 0], e, t_end=t_end)
    for t in np.linspace(0.2, t_end, 5):
        x, yy = rec.along.at(t)
        J, _ = rec.at(m, t)
        assert _g_norm(m, x, yy, J) == pytest.approx(profile(t), abs=1e-3 * max(1, profile(t)))


def test_circle_n_jacobi_vanishes_at_center(E2):
    N = circle()
    rec = n_jacobi_field(E2, N, [0.0], [1.0], [1.0], 1.5)
    for t in (0.0, 0.5, 1.0, 1.4):
        J, _ = rec.at(E2, t)
        assert np.linalg.norm(J) == pytest.approx(abs(1 - t), abs=1e-7)


def test_line_n_jacobi_never_vanishes(E2):
    rec = n_jacobi_field(E2, line(), [0.0], [1.0], [1.0], 5.0)
    J, _ = rec.at(E2, np.linspace(0, 5, 11))
    assert np.linalg.norm(J, axis=1).min() > 0.99
