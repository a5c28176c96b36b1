"""Parametrized submanifolds, normal cones and shape operators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NotC2, NotNormal, NotSelfAdjoint
from .metric import MetricSpec, SymmetricBilinear, TangentVector, fd_jacobian, legendre_inverse_array

NORMAL_TOL = 1e-8


@dataclass(frozen=True)
class SubmanifoldSpec:
    """Immersion ``u -> x(u)`` over a parameter box.

    ``immersion`` maps ``(n, k)`` parameters to ``(n, d)`` points;
    ``jacobian`` / ``hessian`` give ``(n, d, k)`` and ``(n, d, k, k)``
    (finite differences when omitted).  ``param_dim = 0`` is a point.
    """

    ambient_dim: int
    param_dim: int
    immersion: Callable
    param_lo: Sequence[float] = ()
    param_hi: Sequence[float] = ()
    periodic: Sequence[bool] = ()
    jacobian: Optional[Callable] = None
    hessian: Optional[Callable] = None
    smoothness: str = "smooth"
    singular_params: Sequence[Sequence[float]] = ()
    name: str = "submanifold"
    kind: str = "param_table"
    params: dict = field(default_factory=dict)

    @property
    def codim(self):
        return self.ambient_dim - self.param_dim

    @property
    def compact(self):
        return self.param_dim == 0 or all(self.periodic)

    def _U(self, U):
        U = np.asarray(U, float)
        if self.param_dim == 0:
            return U.reshape(-1, 0) if U.size else np.zeros((max(len(np.atleast_1d(U)), 1), 0))
        return U.reshape(-1, self.param_dim)

    def wrap(self, U):
        U = np.array(self._U(U))
        for a, per in enumerate(self.periodic):
            if per:
                lo, hi = self.param_lo[a], self.param_hi[a]
                U[:, a] = lo + np.mod(U[:, a] - lo, hi - lo)
        return U

    def x(self, U):
        return np.asarray(self.immersion(self._U(U)), float)

    def frame(self, U):
        U = self._U(U)
        if self.param_dim == 0:
            return np.zeros((len(U), self.ambient_dim, 0))
        if self.jacobian is not None:
            return np.asarray(self.jacobian(U), float)
        return fd_jacobian(self.immersion, U, 1e-4)

    def second(self, U):
        U = self._U(U)
        k = self.param_dim
        if k == 0:
            return np.zeros((len(U), self.ambient_dim, 0, 0))
        if self.hessian is not None:
            return np.asarray(self.hessian(U), float)
        H = fd_jacobian(self.frame, U, 1e-4)
        return 0.5 * (H + np.swapaxes(H, -1, -2))

    def annihilators(self, U):
        """Rows spanning the annihilator of the tangent space, ``(n, c, d)``.

        For hypersurfaces the single row ``xi`` satisfies
        ``det[x_1, ..., x_k, xi] > 0``; in the plane this is the left
        rotation of the tangent, inward for counter-clockwise curves.
        """
        U = self._U(U)
        n, d, k = len(U), self.ambient_dim, self.param_dim
        if k == 0:
            return np.broadcast_to(np.eye(d), (n, d, d)).copy()
        T = self.frame(U)
        if self.codim == 1:
            xi = np.empty((n, d))
            for i in range(d):
                minor = np.delete(T, i, axis=1)
                xi[:, i] = (-1) ** (d - 1 + i) * np.linalg.det(minor) if k else 1.0
            xi /= np.linalg.norm(xi, axis=1, keepdims=True)
            return xi[:, None, :]
        # project fixed axes off the tangent space, then orthonormalize
        Q, _ = np.linalg.qr(T)
        out = np.empty((n, self.codim, d))
        for i in range(n):
            P = np.eye(d) - Q[i] @ Q[i].T
            cand = P @ np.eye(d)
            order = np.argsort(-np.linalg.norm(cand, axis=0))
            B, _ = np.linalg.qr(cand[:, order[: self.codim]])
            out[i] = B.T
        return out

    def sample_params(self, count):
        """Centered regular grid over a periodic parameter box."""
        if self.param_dim == 0:
            return np.zeros((1, 0))
        if self.param_dim != 1:
            raise NotImplementedError("parameter sampling implemented for curves")
        lo, hi = self.param_lo[0], self.param_hi[0]
        if self.periodic[0]:
            u = lo + (hi - lo) * (np.arange(count) + 0.5) / count
        else:
            u = np.linspace(lo, hi, count)
        return u[:, None]

    def diameter(self, samples=256):
        if self.param_dim == 0:
            return 0.0
        P = self.x(self.sample_params(samples))
        D = np.linalg.norm(P[:, None] - P[None], axis=-1)
        return float(D.max())

    def check_c2(self, U, tol=1e-9):
        U = self._U(U)
        for s in self.singular_params:
            if np.any(np.linalg.norm(U - np.asarray(s, float), axis=1) <= tol):
                raise NotC2(f"{self.name} is not twice differentiable at u={list(s)}")


@dataclass
class NormalVector:
    u: np.ndarray
    vector: TangentVector
    co_orientation: Optional[float] = None
    direction: Optional[np.ndarray] = None

    @property
    def point(self):
        return self.vector.point

    @property
    def components(self):
        return self.vector.components


def normals_array(m: MetricSpec, N: SubmanifoldSpec, U, W):
    """Unit normals for parameters ``U`` and annihilator coordinates ``W``.

    ``W`` has shape ``(n, codim)``; the covector ``sum_a W_a xi_a`` is
    mapped through the inverse Legendre transform and scaled to unit F.
    Returns ``(points, normals)``.
    """
    W = np.atleast_2d(np.asarray(W, float))
    U = N._U(U)
    if len(U) == 1 and len(W) > 1:
        U = np.repeat(U, len(W), axis=0)
    X = N.x(U)
    xi = np.einsum("nc,ncd->nd", W, N.annihilators(U))
    V = legendre_inverse_array(m, X, xi)
    V = V / m.F(X, V)[:, None]
    return X, V


def normal_residual(m: MetricSpec, N: SubmanifoldSpec, U, V):
    """``max_a |g_n(n, x_a)| / |x_a|`` per row."""
    U = N._U(U)
    if N.param_dim == 0:
        return np.zeros(len(V))
    X = N.x(U)
    T = N.frame(U)
    L = m.legendre(X, V)
    r = np.abs(np.einsum("nd,ndk->nk", L, T)) / np.linalg.norm(T, axis=1)
    return r.max(axis=1)


def unit_normal_sample(m: MetricSpec, N: SubmanifoldSpec, u, xi_dir) -> NormalVector:
    """Unit normal at ``x(u)`` along an annihilator direction.

    ``xi_dir`` is a co-orientation sign (hypersurfaces), a vector of
    annihilator coordinates, or a full covector of length ``ambient_dim``
    that annihilates the tangent space.
    """
    U = N._U(u)
    xi_dir = np.atleast_1d(np.asarray(xi_dir, float))
    basis = N.annihilators(U)[0]
    co = None
    if xi_dir.shape == (N.codim,):
        W = xi_dir
        if N.codim == 1:
            co = float(np.sign(W[0]))
    elif xi_dir.shape == (N.ambient_dim,):
        W = basis @ xi_dir
        leak = np.linalg.norm(xi_dir - W @ basis)
        if leak > 1e-8 * np.linalg.norm(xi_dir):
            raise NotNormal("covector does not annihilate the tangent space")
    else:
        raise ValueError("bad annihilator direction")
    X, V = normals_array(m, N, U, W[None])
    res = normal_residual(m, N, U, V)[0]
    if res > NORMAL_TOL:
        raise NotNormal(f"normal-cone residual {res:.2e}")
    return NormalVector(U[0].copy(), TangentVector(X[0], V[0]), co, W / np.linalg.norm(W))


def sample_normal_cone(N: SubmanifoldSpec, count):
    """Parameters ``(U, W)`` covering the unit normal cone with ``count`` samples."""
    if N.param_dim == 0:
        d = N.ambient_dim
        if d == 2:
            th = 2 * np.pi * (np.arange(count) + 0.5) / count
            W = np.stack([np.cos(th), np.sin(th)], axis=1)
        else:
            i = np.arange(count) + 0.5
            z = 1 - 2 * i / count
            phi = np.pi * (1 + 5**0.5) * i
            r = np.sqrt(1 - z**2)
            W = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        return np.zeros((count, 0)), W
    if N.codim != 1:
        raise NotImplementedError("normal-cone sampling implemented for hypersurfaces and points")
    half = count // 2
    U = N.sample_params(half)
    U = np.concatenate([U, U])
    W = np.concatenate([np.ones(half), -np.ones(half)])[:, None]
    return U, W


# -- second fundamental form and shape operator --------------------------


def _gamma(m, x, ref):
    G = m.chern(x, ref)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def _require_normal(m, N, n: NormalVector):
    res = normal_residual(m, N, n.u, n.components[None])[0]
    if res > 1e-6:
        raise NotNormal(f"normal-cone residual {res:.2e}")


def _pieces(m, N, n: NormalVector):
    u = N._U(n.u)
    x, v = n.point, n.components
    T = N.frame(u)[0]
    H = N.second(u)[0]
    g = m.g(x, v)
    Gam = _gamma(m, x, v)
    # covariant derivative of x_b along x_a with reference n
    D = H + np.einsum("ljk,ja,kb->lab", Gam, T, T)
    return T, H, g, Gam, D


def second_fundamental_form(m: MetricSpec, N: SubmanifoldSpec, n: NormalVector, a, b) -> np.ndarray:
    """Normal part of ``nabla^n_a b`` for tangent coefficient vectors ``a, b``."""
    _require_normal(m, N, n)
    N.check_c2(n.u)
    T, _, g, _, D = _pieces(m, N, n)
    w = np.einsum("lab,a,b->l", D, np.asarray(a, float), np.asarray(b, float))
    Gt = T.T @ g @ T
    tangential = T @ np.linalg.solve(Gt, T.T @ g @ w)
    return w - tangential


def shape_operator(m: MetricSpec, N: SubmanifoldSpec, n: NormalVector) -> np.ndarray:
    """Matrix of ``A_n`` in the tangent frame, from ``g_n(A x, y) = g_n(n, nabla_x y)``."""
    _require_normal(m, N, n)
    N.check_c2(n.u)
    T, _, g, _, D = _pieces(m, N, n)
    Gt = T.T @ g @ T
    S = np.einsum("l,lm,mab->ab", n.components, g, D)
    S = 0.5 * (S + S.T)
    return np.linalg.solve(Gt, S)


def shape_operator_from_normal_field(m: MetricSpec, N: SubmanifoldSpec, n: NormalVector, h=1e-4) -> np.ndarray:
    """``A_n x = -(nabla^n_x n~)^T`` with ``n~`` the unit normal field along N
    sharing the annihilator direction of ``n``."""
    _require_normal(m, N, n)
    N.check_c2(n.u)
    u = N._U(n.u)[0]
    W = n.direction[None] if n.direction is not None else np.ones((1, 1))
    x, v = n.point, n.components
    T = N.frame(u)[0]
    g = m.g(x, v)
    Gam = _gamma(m, x, v)
    k = N.param_dim
    A = np.zeros((k, k))
    Gt = T.T @ g @ T
    for a in range(k):
        e = np.zeros(k)
        e[a] = h
        dn = 0.0
        for s, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
            dn = dn + c * normals_array(m, N, (u + s * e)[None], W)[1][0]
        dn = dn / h
        cov = dn + np.einsum("ljk,j,k->l", Gam, T[:, a], v)
        A[:, a] = -np.linalg.solve(Gt, T.T @ g @ cov)
    return A


@dataclass
class PrincipalCurvatures:
    values: np.ndarray
    absolute: float


def principal_curvatures(m: MetricSpec, N: SubmanifoldSpec, n: NormalVector) -> PrincipalCurvatures:
    A = shape_operator(m, N, n)
    T = N.frame(n.u)[0]
    Gt = T.T @ m.g(n.point, n.components) @ T
    vals = _self_adjoint_eigs(A, Gt)
    return PrincipalCurvatures(vals, float(np.max(np.abs(vals))) if len(vals) else 0.0)


def _self_adjoint_eigs(A, M):
    from scipy.linalg import eigh

    S = M @ A
    return np.sort(eigh(0.5 * (S + S.T), M, eigvals_only=True))


@dataclass
class DominanceResult:
    dominates: bool
    min_eig_A: float
    max_eig_B: float
    min_eig_difference: float
    difference_positive_definite: bool


def eigen_dominance_check(A, B, inner, tol=1e-8) -> DominanceResult:
    """Whether every eigenvalue of ``A`` exceeds every eigenvalue of ``B``.

    Both operators must be self-adjoint for ``inner`` (a matrix or
    :class:`SymmetricBilinear`).
    """
    M = inner.matrix if isinstance(inner, SymmetricBilinear) else np.asarray(inner, float)
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    for name, X in (("A", A), ("B", B)):
        S = M @ X
        if np.abs(S - S.T).max() > tol * max(1.0, np.abs(S).max()):
            raise NotSelfAdjoint(f"{name} is not self-adjoint for the inner product")
    ea = _self_adjoint_eigs(A, M)
    eb = _self_adjoint_eigs(B, M)
    ed = _self_adjoint_eigs(A - B, M)
    dom = bool(ea[0] > eb[-1])
    return DominanceResult(dom, float(ea[0]), float(eb[-1]), float(ed[0]), bool(ed[0] > 0))


# -- builders -------------------------------------------------------------


def _curve(name, kind, x, dx, ddx, lo, hi, periodic=True, params=None, **kw):
    return SubmanifoldSpec(
        ambient_dim=2,
        param_dim=1,
        immersion=lambda U: x(U[:, 0]),
        jacobian=lambda U: dx(U[:, 0])[:, :, None],
        hessian=lambda U: ddx(U[:, 0])[:, :, None, None],
        param_lo=(lo,),
        param_hi=(hi,),
        periodic=(periodic,),
        name=name,
        kind=kind,
        params=params or {},
        **kw,
    )


def circle(radius=1.0, center=(0.0, 0.0)) -> SubmanifoldSpec:
    c = np.asarray(center, float)
    R = float(radius)
    return _curve(
        f"circle(r={R:g})",
        "circle",
        lambda u: c + R * np.stack([np.cos(u), np.sin(u)], axis=1),
        lambda u: R * np.stack([-np.sin(u), np.cos(u)], axis=1),
        lambda u: -R * np.stack([np.cos(u), np.sin(u)], axis=1),
        0.0,
        2 * np.pi,
        params={"radius": R, "center": c.tolist()},
    )


def ellipse(a=2.0, b=1.0, center=(0.0, 0.0)) -> SubmanifoldSpec:
    c = np.asarray(center, float)
    return _curve(
        f"ellipse({a:g},{b:g})",
        "ellipse",
        lambda u: c + np.stack([a * np.cos(u), b * np.sin(u)], axis=1),
        lambda u: np.stack([-a * np.sin(u), b * np.cos(u)], axis=1),
        lambda u: -np.stack([a * np.cos(u), b * np.sin(u)], axis=1),
        0.0,
        2 * np.pi,
        params={"a": a, "b": b, "center": c.tolist()},
    )


def line(point=(0.0, 0.0), direction=(1.0, 0.0), half_length=10.0) -> SubmanifoldSpec:
    p = np.asarray(point, float)
    e = np.asarray(direction, float)
    return _curve(
        "line",
        "line",
        lambda u: p + u[:, None] * e,
        lambda u: np.broadcast_to(e, (len(u), 2)).copy(),
        lambda u: np.zeros((len(u), 2)),
        -half_length,
        half_length,
        periodic=False,
        params={"point": p.tolist(), "direction": e.tolist()},
    )


def equator_sphere(tilt=np.pi / 4) -> SubmanifoldSpec:
    """Great circle of the unit sphere in stereographic coordinates.

    The circle is tilted so that neither of its poles is the projection
    centre, keeping both poles (the focal points) inside the chart.
    """
    cb, sb = np.cos(tilt), np.sin(tilt)
    e = np.array([cb, 0.0, -sb])
    f = np.array([0.0, 1.0, 0.0])

    def X(u):
        return np.cos(u)[:, None] * e + np.sin(u)[:, None] * f

    def dX(u):
        return -np.sin(u)[:, None] * e + np.cos(u)[:, None] * f

    def proj(P):
        return P[:, :2] / (1 - P[:, 2:3])

    def dproj(P, dP):
        s = 1 - P[:, 2:3]
        return dP[:, :2] / s + P[:, :2] * dP[:, 2:3] / s**2

    def ddproj(P, dP, ddP):
        s = 1 - P[:, 2:3]
        ds = -dP[:, 2:3]
        return ddP[:, :2] / s - 2 * dP[:, :2] * ds / s**2 + P[:, :2] * (ddP[:, 2:3] * s + 2 * ds**2) / s**3

    poles = np.array([[sb, 0.0, cb], [-sb, 0.0, -cb]])
    return _curve(
        "equator",
        "equator",
        lambda u: proj(X(u)),
        lambda u: dproj(X(u), dX(u)),
        lambda u: ddproj(X(u), dX(u), -X(u)),
        0.0,
        2 * np.pi,
        params={"tilt": float(tilt), "poles": proj(poles).tolist()},
    )


# quintic Hermite basis (ascending powers): p0, v0, a0, a1, v1, p1
_QH = np.array([
    [1, 0, 0, -10, 15, -6],
    [0, 1, 0, -6, 8, -3],
    [0, 0, 0.5, -1.5, 1.5, -0.5],
    [0, 0, 0, 0.5, -1, 0.5],
    [0, 0, 0, -4, 7, -3],
    [0, 0, 0, 10, -15, 6],
])


def _quintic_hermite(p0, v0, a0, p1, v1, a1):
    """Degree-5 curve on [0, 1] matching position, velocity and acceleration at both ends."""
    coef = np.stack([np.asarray(z, float) for z in (p0, v0, a0, a1, v1, p1)])
    poly = _QH.T @ coef  # (6 powers, dim)

    def P(t, order=0):
        c = np.polynomial.polynomial.polyder(poly, order, axis=0) if order else poly
        return np.polynomial.polynomial.polyval(np.asarray(t, float), c).T

    return P


def x32_curve(cap_scale=3.0) -> SubmanifoldSpec:
    """Closed C^1 curve containing the graph ``y = |x|^{3/2}`` over ``[-1, 1]``.

    Parameter ``u`` in ``[-1, 1]`` traces the graph left to right; ``u`` in
    ``[1, 1 + L]`` is a quintic cap joining the ends with matching first and
    second derivatives.  Counter-clockwise, so co-orientation +1 is inward.
    The curvature blows up at ``u = 0``.
    """
    L = float(cap_scale)
    P = _quintic_hermite((1, 1), (L, 1.5 * L), (0, 0.75 * L**2), (-1, 1), (L, -1.5 * L), (0, 0.75 * L**2))

    def split(u):
        u = np.asarray(u, float)
        return u <= 1.0, np.clip((u - 1.0) / L, 0.0, 1.0)

    def x(u):
        g, t = split(u)
        graph = np.stack([u, np.abs(u) ** 1.5], axis=1)
        return np.where(g[:, None], graph, P(t))

    def dx(u):
        g, t = split(u)
        graph = np.stack([np.ones_like(u), 1.5 * np.sign(u) * np.abs(u) ** 0.5], axis=1)
        return np.where(g[:, None], graph, P(t, 1) / L)

    def ddx(u):
        g, t = split(u)
        with np.errstate(divide="ignore"):
            curv = np.where(u == 0, np.inf, 0.75 * np.abs(u) ** -0.5)
        graph = np.stack([np.zeros_like(u), curv], axis=1)
        return np.where(g[:, None], graph, P(t, 2) / L**2)

    return _curve(
        "x32",
        "x32_curve",
        x,
        dx,
        ddx,
        -1.0,
        1.0 + L,
        params={"cap_scale": L},
        smoothness="c1_only",
        singular_params=((0.0,),),
    )


def point(p) -> SubmanifoldSpec:
    p = np.asarray(p, float)
    d = len(p)
    return SubmanifoldSpec(
        ambient_dim=d,
        param_dim=0,
        immersion=lambda U: np.broadcast_to(p, (len(U), d)).copy(),
        name=f"point{tuple(p.tolist())}",
        kind="point",
        params={"p": p.tolist()},
    )


def param_table(points, name="param_table") -> SubmanifoldSpec:
    """Closed curve through tabulated points, interpolated by a periodic cubic spline
    in a uniform parameter on ``[0, 2*pi)``."""
    P = np.asarray(points, float)
    if np.linalg.norm(P[0] - P[-1]) > 0:
        P = np.vstack([P, P[:1]])
    u = np.linspace(0, 2 * np.pi, len(P))
    cs = CubicSpline(u, P, bc_type="periodic")
    wrap = lambda t: np.mod(t, 2 * np.pi)
    return _curve(
        name,
        "param_table",
        lambda t: cs(wrap(t)),
        lambda t: cs(wrap(t), 1),
        lambda t: cs(wrap(t), 2),
        0.0,
        2 * np.pi,
        params={"points": P[:-1].tolist()},
    )


def curve_is_simple(N: SubmanifoldSpec, samples=2000) -> bool:
    """No two non-adjacent chords of a fine polyline intersect."""
    P = N.x(N.sample_params(samples))
    Q = np.roll(P, -1, axis=0)
    n = len(P)
    for i in range(n):
        a, b = P[i], Q[i]
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if len(j) == 0:
            continue
        c, d = P[j], Q[j]
        def orient(p, q, r):
            return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])
        o1 = orient(a, b, c)
        o2 = orient(a, b, d)
        o3 = orient(c, d, a)
        o4 = orient(c, d, b)
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return False
    return True
