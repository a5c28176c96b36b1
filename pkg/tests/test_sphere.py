import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut.errors import PoleCrossing, RadiusTooLarge
from finslercut.sphere import backward_sphere, backward_sphere_curvature_check, ct_lambda, estimate_lambda


def test_ct_values():
    assert ct_lambda(0, 0.25) == pytest.approx(4)
    assert ct_lambda(1, np.pi / 4) == pytest.approx(1)
    assert ct_lambda(-1, 1) == pytest.approx(1.3130352855)


def test_ct_domain():
    with pytest.raises(PoleCrossing):
        ct_lambda(1, np.pi)
    with pytest.raises(ValueError):
        ct_lambda(0, 0)


@given(r=st.floats(0.05, 2.0), eps=st.floats(1e-9, 1e-6))
def test_ct_continuous_in_lambda(r, eps):
    assert ct_lambda(eps, r) == pytest.approx(1 / r, rel=1e-5)
    assert ct_lambda(-eps, r) == pytest.approx(1 / r, rel=1e-5)


@given(lam=st.floats(-4, 1), r=st.floats(0.05, 1.5), dr=st.floats(1e-3, 0.5))
def test_ct_decreasing_in_r(lam, r, dr):
    assert ct_lambda(lam, r + dr) < ct_lambda(lam, r)


@given(lam=st.floats(-4, 1), dl=st.floats(1e-3, 1), r=st.floats(0.05, 1.5))
def test_ct_decreasing_in_lambda(lam, dl, r):
    assert ct_lambda(lam + dl, r) < ct_lambda(lam, r)


def test_backward_sphere_lies_at_distance(RD):
    q = np.array([0.1, -0.2])
    S = backward_sphere(RD, q, 0.3)
    th = np.linspace(0, 2 * np.pi, 17)[:, None]
    X = S.immersion(th)
    assert np.allclose(RD.distance(X, np.broadcast_to(q, X.shape)), 0.3, atol=1e-9)


def test_backward_sphere_tangent_matches_difference(SP):
    S = backward_sphere(SP, [0.2, 0.1], 0.4)
    th = np.array([[1.0]])
    h = 1e-5
    fd = (S.immersion(th + h) - S.immersion(th - h)) / (2 * h)
    assert np.allclose(S.jacobian(th)[:, :, 0], fd, atol=1e-7)


def test_euclidean_equality_case(E2):
    r = backward_sphere_curvature_check(E2, [0.3, -0.4], 0.5, sample_count=16)
    assert np.allclose(r.kappas, 2.0, atol=1e-6)
    assert r.lambda_est == pytest.approx(0, abs=1e-6) and r.passed


def test_round_sphere_caps(SP):
    r = backward_sphere_curvature_check(SP, [0.1, 0.0], 0.4, sample_count=16)
    assert r.min_kappa >= 1 / np.tan(0.4) - 1e-3
    assert r.lambda_est == pytest.approx(1, abs=1e-3) and r.passed
    assert r.jacobi_error < 1e-5 and r.reverse_law_error < 1e-6


def test_randers_backward_sphere(RD):
    r = backward_sphere_curvature_check(RD, [0.0, 0.0], 0.3, sample_count=16)
    assert r.min_kappa >= 1 / 0.3 - 1e-3 and r.passed


def test_radius_beyond_injectivity(SP):
    with pytest.raises(RadiusTooLarge):
        backward_sphere_curvature_check(SP, [0.0, 0.0], 3.3, sample_count=8)


def test_lambda_estimate_hyperbolic(HY):
    lam, pts, flags = estimate_lambda(HY, [0.0, 0.1], 0.3)
    assert lam == pytest.approx(-1, abs=1e-3)
    assert pts == 25 and flags == 8
