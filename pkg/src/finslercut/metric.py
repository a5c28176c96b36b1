"""Finsler metrics on a single coordinate chart and their pointwise tensors.

A :class:`MetricSpec` bundles the norm ``F(x, v)`` with optional closed-form
overrides.  Every array-level method is vectorized: points and vectors carry
the coordinate axis last and any number of leading batch axes.  When an
override is missing the quantity is obtained from finite differences of
``F**2`` using fourth-order tensor-product stencils.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NoConvergence, OutsideChart, ZeroVector

# stencil steps (relative to max(1, |arg|)) per derivative order
FD_STEP = {1: 1e-3, 2: 1e-3, 3: 5e-3}
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

KINDS = ("riemannian-conformal", "randers", "minkowski", "custom")


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lo) & (x <= self.hi), axis=-1)


@dataclass(frozen=True)
class TangentVector:
    point: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))


@dataclass(frozen=True)
class Covector:
    point: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))

    def __call__(self, w):
        return float(self.components @ np.asarray(w, dtype=float))


@dataclass(frozen=True)
class SymmetricBilinear:
    point: np.ndarray
    reference_vector: Optional[np.ndarray]
    matrix: np.ndarray

    def __call__(self, a, b):
        return float(np.asarray(a) @ self.matrix @ np.asarray(b))


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """A Finsler metric on one chart.

    Parameters
    ----------
    dim : int
        Chart dimension (>= 2).
    F_eval : callable
        ``F_eval(x, v)`` on arrays of shape ``(..., dim)``; must broadcast.
    kind : str
        One of ``riemannian-conformal``, ``randers``, ``minkowski``, ``custom``.
    domain : Box
        Axis-aligned chart box; ``predicate`` optionally narrows it.
    flat : bool
        True when ``F`` does not depend on the base point.  Spray, Chern
        coefficients and coordinate derivatives then vanish identically.

    Optional overrides (all vectorized) are ``g_eval``, ``cartan_eval``,
    ``dg_dx_eval`` (index order ``[i, j, k] = d g_ij / d x^k``),
    ``spray_eval``, ``chern_eval`` (``[l, j, k] = Gamma^l_jk``) and
    ``distance_eval(p, q)`` for metrics with a closed-form distance.
    """

    dim: int
    F_eval: Callable
    kind: str = "custom"
    name: str = "custom"
    domain: Box = None
    predicate: Optional[Callable] = None
    flat: bool = False
    params: dict = field(default_factory=dict)
    g_eval: Optional[Callable] = None
    cartan_eval: Optional[Callable] = None
    dg_dx_eval: Optional[Callable] = None
    spray_eval: Optional[Callable] = None
    chern_eval: Optional[Callable] = None
    distance_eval: Optional[Callable] = None
    reversed_from: Optional["MetricSpec"] = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.domain is None:
            object.__setattr__(self, "domain", Box(-np.full(self.dim, 1e3), np.full(self.dim, 1e3)))

    # -- chart ---------------------------------------------------------
    def contains(self, x):
        inside = self.domain.contains(x)
        if self.predicate is not None:
            inside = inside & np.asarray(self.predicate(np.asarray(x, dtype=float)), dtype=bool)
        return inside

    @property
    def is_reversible_hint(self):
        return self.kind == "riemannian-conformal" or (
            self.kind == "randers" and not np.any(self.params.get("b", 0.0))
        )

    # -- array-level tensors -------------------------------------------
    def F(self, x, v):
        return self.F_eval(np.asarray(x, dtype=float), np.asarray(v, dtype=float))

    def F2(self, x, v):
        return self.F(x, v) ** 2

    def g(self, x, v):
        if self.g_eval is not None:
            return self.g_eval(np.asarray(x, float), np.asarray(v, float))
        return 0.5 * fd_tensor(self.F2, x, v, "vv", FD_STEP[2])

    def cartan(self, x, v):
        if self.cartan_eval is not None:
            return self.cartan_eval(np.asarray(x, float), np.asarray(v, float))
        return 0.25 * fd_tensor(self.F2, x, v, "vvv", FD_STEP[3])

    def dg_dx(self, x, v):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        if self.dg_dx_eval is not None:
            return self.dg_dx_eval(x, v)
        if self.flat:
            return np.zeros(np.broadcast_shapes(x.shape, v.shape) + (self.dim, self.dim))
        # d^3 F^2 / dv_i dv_j dx_k, halved
        return 0.5 * fd_tensor(self.F2, x, v, "vvx", FD_STEP[3])

    def legendre(self, x, v):
        """``L(v)_i = g_v(v, e_i)``; zero maps to zero."""
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        zero = np.linalg.norm(v, axis=-1) == 0.0
        safe = np.where(zero[..., None], 1.0, v)
        out = np.einsum("...ij,...j->...i", self.g(x, safe), safe)
        return np.where(zero[..., None], 0.0, out)

    def spray(self, x, v):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        if self.spray_eval is not None:
            return self.spray_eval(x, v)
        if self.flat:
            return np.zeros(np.broadcast_shapes(x.shape, v.shape))
        # G^i = 1/4 g^{il} [ y^k d2F2/dx^k dy^l - dF2/dx^l ]
        mixed = fd_tensor(self.F2, x, v, "xv", FD_STEP[2])  # [k, l]
        dx = fd_tensor(self.F2, x, v, "x", FD_STEP[1])
        rhs = np.einsum("...k,...kl->...l", v, mixed) - dx
        return 0.25 * np.linalg.solve(self.g(x, v), rhs[..., None])[..., 0]

    def nonlinear_connection(self, x, v):
        """``N^i_j = dG^i / dy^j`` by central differences of the spray."""
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        if self.flat:
            return np.zeros(np.broadcast_shapes(x.shape, v.shape) + (self.dim,))
        return fd_jacobian(lambda y: self.spray(x, y), v, 1e-4)

    def chern(self, x, v):
        """Chern connection coefficients ``Gamma[..., l, j, k]`` at reference ``v``."""
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        if self.chern_eval is not None:
            return self.chern_eval(x, v)
        shape = np.broadcast_shapes(x.shape, v.shape) + (self.dim, self.dim)
        if self.flat:
            return np.zeros(shape)
        g = self.g(x, v)
        dgx = self.dg_dx(x, v)  # [i, j, k] = d_k g_ij
        dgy = 2.0 * self.cartan(x, v)  # [i, j, m] = d g_ij / dy^m
        N = self.nonlinear_connection(x, v)  # [m, k]
        # delta_k g_ij = d_k g_ij - N^m_k dg_ij/dy^m
        dg = dgx - np.einsum("...ijm,...mk->...ijk", dgy, N)
        lower = 0.5 * (
            np.einsum("...ijk->...ijk", dg)  # delta_k g_ij
            + np.einsum("...ikj->...ijk", dg)  # delta_j g_ik
            - np.einsum("...jki->...ijk", dg)  # delta_i g_jk
        )
        # lower[i, j, k] = Gamma_{i j k} with first index lowered
        return np.einsum("...li,...ijk->...ljk", np.linalg.inv(g), lower)

    def distance(self, p, q):
        if self.distance_eval is None:
            raise NotImplementedError(f"{self.name} has no closed-form distance")
        return self.distance_eval(np.asarray(p, float), np.asarray(q, float))

    @property
    def has_closed_distance(self):
        return self.distance_eval is not None

    def check_point(self, x):
        if not bool(np.all(self.contains(x))):
            raise OutsideChart(f"point {np.asarray(x).tolist()} outside chart of {self.name}")


# -- finite-difference machinery ----------------------------------------


def _scale(a):
    return np.maximum(1.0, np.linalg.norm(a, axis=-1))


def fd_tensor(fun, x, v, slots, rel_step):
    """Mixed partials of scalar ``fun(x, v)`` along coordinate axes.

    ``slots`` is a string over ``{'x', 'v'}``; the result has one trailing
    axis of length ``dim`` per slot, in slot order.  Each slot is
    differentiated with the fourth-order five-point stencil, so an n-th
    mixed partial uses ``4**n`` evaluations per index tuple, all of them
    stacked into a single call of ``fun``.
    """
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    batch = np.broadcast_shapes(x.shape, v.shape)[:-1]
    d = x.shape[-1]
    x = np.broadcast_to(x, batch + (d,))
    v = np.broadcast_to(v, batch + (d,))
    n = len(slots)
    hx = rel_step * _scale(x)
    # F^2 is homogeneous in v, so the v-step scales with |v|
    nv = np.linalg.norm(v, axis=-1)
    hv = rel_step * np.where(nv > 0, nv, 1.0)
    eye = np.eye(d)
    idx_tuples = list(itertools.product(range(d), repeat=n))
    st_tuples = list(itertools.product(range(4), repeat=n))
    DX = np.zeros((len(idx_tuples), len(st_tuples), d))
    DV = np.zeros_like(DX)
    for a, idx in enumerate(idx_tuples):
        for b, st in enumerate(st_tuples):
            for slot, i, s in zip(slots, idx, st):
                if slot == "x":
                    DX[a, b] += _OFFSETS[s] * eye[i]
                else:
                    DV[a, b] += _OFFSETS[s] * eye[i]
    W = np.ones(len(st_tuples))
    for b, st in enumerate(st_tuples):
        W[b] = np.prod(_WEIGHTS[list(st)])
    C = len(idx_tuples) * len(st_tuples)
    DX = DX.reshape((C,) + (1,) * len(batch) + (d,))
    DV = DV.reshape((C,) + (1,) * len(batch) + (d,))
    xs = x[None] + DX * hx[None, ..., None]
    vs = v[None] + DV * hv[None, ..., None]
    vals = np.asarray(fun(xs, vs)).reshape((len(idx_tuples), len(st_tuples)) + batch)
    out = np.tensordot(W, vals, axes=([0], [1]))  # (n_idx, *batch)
    denom = np.ones(batch)
    for slot in slots:
        denom = denom * (hx if slot == "x" else hv)
    out = out / denom
    out = out.reshape((d,) * n + batch)
    return np.moveaxis(out, list(range(n)), list(range(len(batch), len(batch) + n)))


def fd_jacobian(fun, a, rel_step):
    """Jacobian ``[..., i, j] = d fun_i / d a_j`` by 4th-order central differences."""
    a = np.asarray(a, float)
    d = a.shape[-1]
    h = rel_step * _scale(a)
    cols = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        acc = 0.0
        for s, w in zip(_OFFSETS, _WEIGHTS):
            acc = acc + w * np.asarray(fun(a + (s * h)[..., None] * e))
        cols.append(acc / h[..., None])
    return np.stack(cols, axis=-1)


# -- public operations on TangentVector / Covector -----------------------


def _check_vector(m: MetricSpec, v: TangentVector):
    if v.components.shape != (m.dim,) or v.point.shape != (m.dim,):
        raise ValueError(f"expected {m.dim}-dimensional point and components")
    if not np.any(v.components):
        raise ZeroVector("tensors are undefined at the zero vector")
    m.check_point(v.point)


def eval_F(m: MetricSpec, v: TangentVector) -> float:
    _check_vector(m, v)
    return float(m.F(v.point, v.components))


def fundamental_tensor(m: MetricSpec, v: TangentVector) -> SymmetricBilinear:
    _check_vector(m, v)
    g = m.g(v.point, v.components)
    return SymmetricBilinear(v.point, v.components, 0.5 * (g + g.T))


def cartan_tensor(m: MetricSpec, v: TangentVector, v1, v2, v3) -> float:
    _check_vector(m, v)
    C = m.cartan(v.point, v.components)
    return float(np.einsum("ijk,i,j,k->", C, np.asarray(v1, float), np.asarray(v2, float), np.asarray(v3, float)))


def legendre(m: MetricSpec, v: TangentVector) -> Covector:
    if v.components.shape != (m.dim,):
        raise ValueError(f"expected {m.dim} components")
    m.check_point(v.point)
    return Covector(v.point, m.legendre(v.point, v.components))


def legendre_inverse_array(m: MetricSpec, x, xi, tol=1e-13, max_iter=60):
    """Solve ``g_v(v, .) = xi`` for ``v`` by damped Newton (vectorized).

    The Jacobian of the Legendre map is ``g_v`` itself.  Start from the
    Euclidean dual rescaled by the least-squares factor, which is exact for
    conformal metrics.  Zero covectors map to zero.
    """
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    batch = np.broadcast_shapes(x.shape, xi.shape)
    x = np.broadcast_to(x, batch)
    xi = np.broadcast_to(xi, batch)
    xnorm = np.linalg.norm(xi, axis=-1)
    zero = xnorm == 0.0
    xi_s = np.where(zero[..., None], 1.0, xi)
    v = xi_s.copy()
    Lv = m.legendre(x, v)
    c = np.sum(Lv * xi_s, axis=-1) / np.sum(Lv * Lv, axis=-1)
    v = v * c[..., None]
    scale = np.where(zero, 1.0, xnorm)
    res = np.linalg.norm(m.legendre(x, v) - xi_s, axis=-1) / scale
    for _ in range(max_iter):
        if np.all(res <= tol):
            break
        r = m.legendre(x, v) - xi_s
        step = np.linalg.solve(m.g(x, v), r[..., None])[..., 0]
        lam = np.ones(batch[:-1])
        for _ in range(12):
            trial = v - lam[..., None] * step
            ok = np.linalg.norm(trial, axis=-1) > 0
            new_res = np.where(
                ok,
                np.linalg.norm(m.legendre(x, np.where(ok[..., None], trial, v)) - xi_s, axis=-1) / scale,
                np.inf,
            )
            better = (new_res < res) | (res <= tol)
            if np.all(better):
                break
            lam = np.where(better, lam, 0.5 * lam)
        # rows whose line search cannot improve have hit the noise floor
        stalled = ~better
        v = np.where(((res > tol) & better)[..., None], trial, v)
        res = np.linalg.norm(m.legendre(x, v) - xi_s, axis=-1) / scale
        if np.all((res <= tol) | stalled):
            break
    # tensors from finite differences carry ~1e-10 noise
    accept = max(tol, 1e-10 if m.g_eval is not None else 1e-8)
    if np.any(res > accept):
        raise NoConvergence("legendre_inverse did not converge; metric may not be strongly convex here",
                            float(np.max(res)))
    return np.where(zero[..., None], 0.0, v)


def legendre_inverse(m: MetricSpec, xi: Covector) -> TangentVector:
    m.check_point(xi.point)
    return TangentVector(xi.point, legendre_inverse_array(m, xi.point, xi.components))


def reverse_metric(m: MetricSpec) -> MetricSpec:
    """The reverse metric ``F(x, -v)``; reversing twice returns ``m`` itself."""
    if m.reversed_from is not None:
        return m.reversed_from

    def opt(fn, wrap):
        return None if fn is None else wrap(fn)

    rev = MetricSpec(
        dim=m.dim,
        F_eval=lambda x, v: m.F_eval(x, -v),
        kind=m.kind,
        name=m.name + "~rev",
        domain=m.domain,
        predicate=m.predicate,
        flat=m.flat,
        params=dict(m.params),
        g_eval=opt(m.g_eval, lambda f: (lambda x, v: f(x, -v))),
        cartan_eval=opt(m.cartan_eval, lambda f: (lambda x, v: -f(x, -v))),
        dg_dx_eval=opt(m.dg_dx_eval, lambda f: (lambda x, v: f(x, -v))),
        spray_eval=opt(m.spray_eval, lambda f: (lambda x, v: f(x, -v))),
        chern_eval=opt(m.chern_eval, lambda f: (lambda x, v: f(x, -v))),
        distance_eval=opt(m.distance_eval, lambda f: (lambda p, q: f(q, p))),
        reversed_from=m,
    )
    return rev


# -- built-in families -----------------------------------------------------


def _conformal(dim, name, sigma, dlog_sigma, distance, domain, predicate=None, params=None):
    """``F = sigma(x) |v|``; ``dlog_sigma`` is the gradient of ``log sigma``."""

    def F(x, v):
        return sigma(x) * np.linalg.norm(v, axis=-1)

    def g(x, v):
        s = sigma(x)
        shape = np.broadcast_shapes(np.shape(x), np.shape(v))[:-1]
        return np.broadcast_to((s**2)[..., None, None] * np.eye(dim), shape + (dim, dim)).copy()

    def cartan(x, v):
        shape = np.broadcast_shapes(np.shape(x), np.shape(v))[:-1]
        return np.zeros(shape + (dim, dim, dim))

    def dg_dx(x, v):
        s = sigma(x)
        phi = dlog_sigma(x)
        shape = np.broadcast_shapes(np.shape(x), np.shape(v))[:-1]
        out = 2.0 * (s**2)[..., None, None, None] * np.eye(dim)[:, :, None] * phi[..., None, None, :]
        return np.broadcast_to(out, shape + (dim,) * 3).copy()

    def spray(x, v):
        phi = dlog_sigma(x)
        pv = np.sum(phi * v, axis=-1)
        return pv[..., None] * v - 0.5 * np.sum(v * v, axis=-1)[..., None] * phi

    def chern(x, v):
        phi = dlog_sigma(x)
        shape = np.broadcast_shapes(np.shape(x), np.shape(v))[:-1]
        I = np.eye(dim)
        out = (
            np.einsum("lj,...k->...ljk", I, phi)
            + np.einsum("lk,...j->...ljk", I, phi)
            - np.einsum("jk,...l->...ljk", I, phi)
        )
        return np.broadcast_to(out, shape + (dim,) * 3).copy()

    return MetricSpec(
        dim=dim, F_eval=F, kind="riemannian-conformal", name=name, domain=domain,
        predicate=predicate, flat=(name == "euclidean"), params=params or {},
        g_eval=g, cartan_eval=cartan, dg_dx_eval=dg_dx, spray_eval=spray,
        chern_eval=chern, distance_eval=distance,
    )


def euclidean(dim=2, half_width=50.0) -> MetricSpec:
    return _conformal(
        dim, "euclidean",
        sigma=lambda x: np.ones(np.shape(x)[:-1]),
        dlog_sigma=lambda x: np.zeros(np.shape(x)),
        distance=lambda p, q: np.linalg.norm(q - p, axis=-1),
        domain=Box(-np.full(dim, half_width), np.full(dim, half_width)),
        params={"model": "euclidean"},
    )


def _to_sphere(x):
    r2 = np.sum(x * x, axis=-1)
    return np.concatenate([2.0 * x, (r2 - 1.0)[..., None]], axis=-1) / (1.0 + r2)[..., None]


def _sphere_distance(p, q):
    P, Q = _to_sphere(p), _to_sphere(q)
    cross = np.linalg.norm(P - Q, axis=-1)
    s = np.linalg.norm(P + Q, axis=-1)
    return 2.0 * np.arctan2(cross, s)


def sphere(dim=2, half_width=1e3) -> MetricSpec:
    """Unit round sphere in the stereographic chart from the north pole."""
    return _conformal(
        dim, "sphere",
        sigma=lambda x: 2.0 / (1.0 + np.sum(x * x, axis=-1)),
        dlog_sigma=lambda x: -2.0 * x / (1.0 + np.sum(x * x, axis=-1))[..., None],
        distance=_sphere_distance,
        domain=Box(-np.full(dim, half_width), np.full(dim, half_width)),
        params={"model": "sphere"},
    )


def _hyperbolic_distance(p, q):
    num = 2.0 * np.sum((p - q) ** 2, axis=-1)
    den = (1.0 - np.sum(p * p, axis=-1)) * (1.0 - np.sum(q * q, axis=-1))
    return np.arccosh(1.0 + num / den)


def hyperbolic(dim=2, radius=0.98) -> MetricSpec:
    """Poincare ball of curvature -1, restricted to ``|x| <= radius``."""
    return _conformal(
        dim, "hyperbolic",
        sigma=lambda x: 2.0 / (1.0 - np.sum(x * x, axis=-1)),
        dlog_sigma=lambda x: 2.0 * x / (1.0 - np.sum(x * x, axis=-1))[..., None],
        distance=_hyperbolic_distance,
        domain=Box(-np.ones(dim), np.ones(dim)),
        predicate=lambda x: np.sum(x * x, axis=-1) <= radius**2,
        params={"model": "hyperbolic", "radius": radius},
    )


def randers(a=None, b=None, dim=2, half_width=50.0) -> MetricSpec:
    """Constant-coefficient Randers norm ``sqrt(v.a.v) + b.v`` (a Minkowski space).

    Defaults to ``|v| + 0.5 v_1``.
    """
    a = np.eye(dim) if a is None else np.asarray(a, float)
    if b is None:
        b = np.zeros(dim)
        b[0] = 0.5
    b = np.asarray(b, float)
    dim = a.shape[0]
    if np.sum(b * np.linalg.solve(a, b)) >= 1.0:
        raise ValueError("Randers drift must satisfy |b|_a < 1")

    def alpha(v):
        return np.sqrt(np.einsum("...i,ij,...j->...", v, a, v))

    def F(x, v):
        return alpha(v) + v @ b

    def parts(x, v):
        v = np.broadcast_to(v, np.broadcast_shapes(np.shape(x), np.shape(v)))
        al = alpha(v)
        ell = (v @ a) / al[..., None]
        h = a - ell[..., :, None] * ell[..., None, :]
        return v, al, ell, h

    def g(x, v):
        v, al, ell, h = parts(x, v)
        Fv = al + v @ b
        Fi = ell + b
        return (Fv / al)[..., None, None] * h + Fi[..., :, None] * Fi[..., None, :]

    def cartan(x, v):
        v, al, ell, h = parts(x, v)
        beta = v @ b
        p = b - (beta / al)[..., None] * ell
        out = (
            np.einsum("...ij,...k->...ijk", h, p)
            + np.einsum("...ik,...j->...ijk", h, p)
            + np.einsum("...jk,...i->...ijk", h, p)
        )
        return out / (2.0 * al)[..., None, None, None]

    def zeros(k):
        def f(x, v):
            shape = np.broadcast_shapes(np.shape(x), np.shape(v))[:-1]
            return np.zeros(shape + (dim,) * k)
        return f

    return MetricSpec(
        dim=dim, F_eval=F, kind="randers", name="randers",
        domain=Box(-np.full(dim, half_width), np.full(dim, half_width)), flat=True,
        params={"a": a.tolist(), "b": b.tolist()},
        g_eval=g, cartan_eval=cartan, dg_dx_eval=zeros(3), spray_eval=zeros(1), chern_eval=zeros(3),
        distance_eval=lambda p, q: F(None, q - p),
    )


def minkowski_quartic(eps=0.1, dim=2, half_width=50.0) -> MetricSpec:
    """Reversible non-Riemannian Minkowski norm ``sqrt(|v|^2 + eps sum v_i^4 / |v|^2)``.

    Tensors come from finite differences; the closed-form distance and the
    vanishing spray follow from translation invariance.
    """
    if not 0.0 <= eps <= 0.2:
        raise ValueError("eps outside the strongly convex range [0, 0.2]")

    def F(x, v):
        s = np.sum(v * v, axis=-1)
        return np.sqrt(s + eps * np.sum(v**4, axis=-1) / s)

    return MetricSpec(
        dim=dim, F_eval=F, kind="minkowski", name="minkowski", flat=True,
        domain=Box(-np.full(dim, half_width), np.full(dim, half_width)),
        params={"eps": eps}, distance_eval=lambda p, q: F(None, q - p),
    )


def zermelo(strength=0.3, half_width=3.0) -> MetricSpec:
    """Navigation metric on the Euclidean plane with a swirling wind.

    Wind ``W(x) = strength * (-x2, x1) * exp(-|x|^2 / 2)`` keeps ``|W| < 1``
    everywhere.  Everything is computed from ``F`` by finite differences.
    """

    def wind(x):
        damp = strength * np.exp(-0.5 * np.sum(x * x, axis=-1))
        return np.stack([-x[..., 1], x[..., 0]], axis=-1) * damp[..., None]

    def F(x, v):
        W = wind(x)
        lam = 1.0 - np.sum(W * W, axis=-1)
        Wv = np.sum(W * v, axis=-1)
        return (np.sqrt(lam * np.sum(v * v, axis=-1) + Wv**2) - Wv) / lam

    return MetricSpec(
        dim=2, F_eval=F, kind="custom", name="zermelo",
        domain=Box(-np.full(2, half_width), np.full(2, half_width)),
        params={"preset": "zermelo", "strength": strength},
    )
