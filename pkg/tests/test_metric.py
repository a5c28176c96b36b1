import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslercut import metric as fm
from finslercut.errors import OutsideChart, ZeroVector
from finslercut.metric import TangentVector

coord = st.floats(-0.65, 0.65)
comp = st.floats(-3, 3)


def vec(x, y, a, b):
    return TangentVector(np.array([x, y]), np.array([a, b]))


def nonzero(a, b):
    return abs(a) + abs(b) > 1e-2


ALL = {
    "E2": fm.euclidean(),
    "RD": fm.randers(b=(0.5, 0.0)),
    "SP": fm.sphere(),
    "HY": fm.hyperbolic(),
    "MQ": fm.minkowski_quartic(),
    "ZM": fm.zermelo(),
}


def test_norm_values(E2, RD):
    assert fm.eval_F(E2, vec(0, 0, 3, 4)) == pytest.approx(5.0)
    assert fm.eval_F(RD, vec(0, 0, 1, 0)) == pytest.approx(1.5)
    assert fm.eval_F(RD, vec(0, 0, -1, 0)) == pytest.approx(0.5)


def test_zero_vector_rejected(E2):
    with pytest.raises(ZeroVector):
        fm.eval_F(E2, vec(0, 0, 0, 0))


def test_outside_chart(HY):
    with pytest.raises(OutsideChart):
        fm.eval_F(HY, vec(0.99, 0.5, 1, 0))


def test_fundamental_tensor_values(E2, RD, SP):
    assert np.allclose(fm.fundamental_tensor(E2, vec(0.3, -1, 2, 7)).matrix, np.eye(2))
    g = fm.fundamental_tensor(RD, vec(0, 0, 1, 0))
    v = np.array([1.0, 0.0])
    assert g(v, v) == pytest.approx(2.25)
    assert np.allclose(fm.fundamental_tensor(SP, vec(0, 0, 1, 0)).matrix, 4 * np.eye(2))


@pytest.mark.parametrize("name", sorted(ALL))
@given(x=coord, y=coord, a=comp, b=comp)
def test_g_symmetric_positive_and_reproduces_F(name, x, y, a, b):
    if not nonzero(a, b):
        return
    m = ALL[name]
    v = vec(x * 0.9, y * 0.9, a, b)
    G = fm.fundamental_tensor(m, v).matrix
    assert np.allclose(G, G.T, atol=1e-8)
    assert np.linalg.eigvalsh(G).min() > 0
    F = fm.eval_F(m, v)
    assert v.components @ G @ v.components == pytest.approx(F**2, rel=1e-6)


@pytest.mark.parametrize("name", sorted(ALL))
@given(x=coord, y=coord, a=comp, b=comp, lam=st.floats(0.05, 20))
def test_positive_homogeneity(name, x, y, a, b, lam):
    if not nonzero(a, b):
        return
    m = ALL[name]
    p = np.array([x, y]) * 0.9
    v = np.array([a, b])
    assert m.F(p, lam * v) == pytest.approx(lam * m.F(p, v), rel=1e-10)


def test_cartan_riemannian_vanishes(E2, SP):
    for m in (E2, SP):
        assert fm.cartan_tensor(m, vec(0.1, 0.2, 1, 2), [1, 0], [0, 1], [1, 1]) == pytest.approx(0, abs=1e-10)


def test_cartan_reference_slot_vanishes(RD):
    v = vec(0, 0, 0.3, 1)
    assert fm.cartan_tensor(RD, v, v.components, [1, 0], [0.2, 1]) == pytest.approx(0, abs=1e-8)


def _fd_cartan(F2, x, y, a, b, c, h=1e-4):
    """C = 1/4 d^3(F^2) by nested central differences along a, b, c."""
    a, b, c = map(np.asarray, (a, b, c))
    tot = 0.0
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                tot += s1 * s2 * s3 * F2(x, y + h * (s1 * a + s2 * b + s3 * c))
    return tot / (8 * h**3) / 4


def test_cartan_matches_nested_differences(RD):
    x = np.zeros(2)
    y = np.array([0.0, 1.0])
    e = np.array([1.0, 0.0])
    fd = _fd_cartan(lambda p, w: RD.F(p, w) ** 2, x, y, e, e, e)
    got = fm.cartan_tensor(RD, TangentVector(x, y), e, e, e)
    assert abs(got) > 1e-3
    assert got == pytest.approx(fd, rel=1e-4)


def test_legendre_values(E2, RD):
    assert np.allclose(fm.legendre(E2, vec(0, 0, 3, 4)).components, [3, 4])
    assert np.allclose(fm.legendre(RD, vec(0, 0, 1, 0)).components, [2.25, 0])
    back = fm.legendre_inverse(RD, fm.Covector(np.zeros(2), np.array([2.25, 0.0])))
    assert np.allclose(back.components, [1, 0], atol=1e-10)


@pytest.mark.parametrize("name", ["RD", "MQ", "ZM", "HY"])
@given(x=coord, y=coord, a=comp, b=comp)
def test_legendre_round_trip(name, x, y, a, b):
    if not nonzero(a, b):
        return
    m = ALL[name]
    v = vec(x * 0.9, y * 0.9, a, b)
    back = fm.legendre_inverse(m, fm.legendre(m, v))
    assert np.allclose(back.components, v.components, atol=1e-7 * max(1, np.abs(v.components).max()))


@given(x=coord, y=coord, a=comp, b=comp)
def test_reverse_metric_flips(x, y, a, b):
    if not nonzero(a, b):
        return
    m = ALL["ZM"]
    rev = fm.reverse_metric(m)
    p = np.array([x, y])
    v = np.array([a, b])
    assert rev.F(p, v) == pytest.approx(m.F(p, -v), rel=1e-12)
    assert np.allclose(rev.g(p, v), m.g(p, -v), atol=1e-8)


def test_reverse_values(E2, RD):
    assert fm.reverse_metric(E2).F(np.zeros(2), np.array([1.0, 2.0])) == pytest.approx(np.sqrt(5))
    assert fm.reverse_metric(RD).F(np.zeros(2), np.array([1.0, 0.0])) == pytest.approx(0.5)
