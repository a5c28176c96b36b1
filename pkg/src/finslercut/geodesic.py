"""Geodesic flow, exponential map and the Chern connection along curves."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DegenerateFlag, OutsideDomain, ZeroReference, ZeroVector
from .metric import MetricSpec, TangentVector, _check_vector, fd_jacobian
from .ode import BatchSolution, integrate_batch

DEFAULT_TOL = 1e-9
_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def spray_coefficients(m: MetricSpec, v: TangentVector) -> np.ndarray:
    _check_vector(m, v)
    return np.asarray(m.spray(v.point, v.components), float)


def geodesic_rhs(m: MetricSpec):
    d = m.dim

    def rhs(Y):
        x, y = Y[:, :d], Y[:, d:]
        return np.concatenate([y, -2.0 * m.spray(x, y)], axis=1)

    return rhs


def chart_inside(m: MetricSpec, region=None):
    d = m.dim
    if region is None:
        return lambda Y: np.asarray(m.contains(Y[:, :d]), dtype=bool)
    lo, hi = (np.asarray(b, float) for b in region)

    def inside(Y):
        x = Y[:, :d]
        return np.asarray(m.contains(x), dtype=bool) & np.all((x >= lo) & (x <= hi), axis=1)

    return inside


def flow_batch(m: MetricSpec, X, V, t_end, tol=DEFAULT_TOL, region=None) -> BatchSolution:
    """Integrate geodesics from rows of ``X`` with initial velocities ``V``.

    Rows leaving the chart, or the optional box ``region = (lo, hi)``, stop
    there and record an exit time.
    """
    X = np.atleast_2d(np.asarray(X, float))
    V = np.atleast_2d(np.asarray(V, float))
    X, V = np.broadcast_arrays(X, V)
    Y0 = np.concatenate([X, V], axis=1)
    return integrate_batch(geodesic_rhs(m), Y0, float(t_end), rtol=tol, atol=tol, inside=chart_inside(m, region))


@dataclass
class GeodesicRecord:
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    terminated_by: str
    end_time: float = np.inf
    _sol: Optional[BatchSolution] = field(default=None, repr=False)
    _row: int = 0

    @classmethod
    def from_batch(cls, sol: BatchSolution, row: int = 0, d: Optional[int] = None):
        k = sol.Y.shape[2]
        d = d or k // 2
        end = float(sol.end_time()[row])
        keep = sol.times < end
        times = np.append(sol.times[keep], end)
        Y = sol(times, np.full(times.shape, row))
        reason = "chart_exit" if np.isfinite(sol.exit_time[row]) else "time_end"
        return cls(times, Y[:, :d].copy(), Y[:, d : 2 * d].copy(), reason, end, sol, row)

    @property
    def dim(self):
        return self.points.shape[1]

    def at(self, t):
        """Position and velocity at affine time ``t`` from dense output."""
        t = np.asarray(t, float)
        flat = np.atleast_1d(t)
        Y = self._sol(flat, np.full(flat.shape, self._row))
        d = self.dim
        x, y = Y[:, :d], Y[:, d : 2 * d]
        if t.ndim == 0:
            return x[0], y[0]
        return x, y

    def speeds(self, m: MetricSpec):
        return m.F(self.points, self.velocities)

    def to_csv(self, path):
        d = self.dim
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(d)])
            for t, x, y in zip(self.times, self.points, self.velocities):
                w.writerow([repr(float(t))] + [repr(float(a)) for a in x] + [repr(float(a)) for a in y])

    def to_polyline(self, path):
        with open(path, "w") as fh:
            for x in self.points:
                fh.write(" ".join(repr(float(a)) for a in x) + "\n")


def integrate_geodesic(m: MetricSpec, v0: TangentVector, t_end: float, tol: float = DEFAULT_TOL) -> GeodesicRecord:
    _check_vector(m, v0)
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    m.check_point(v0.point)
    sol = flow_batch(m, v0.point, v0.components, t_end, tol)
    return GeodesicRecord.from_batch(sol, 0, m.dim)


def exp_map(m: MetricSpec, v: TangentVector, tol: float = DEFAULT_TOL) -> np.ndarray:
    if not np.any(v.components):
        return v.point.copy()
    rec = integrate_geodesic(m, v, 1.0, tol)
    if rec.terminated_by == "chart_exit":
        raise OutsideDomain(f"geodesic leaves the chart at t={rec.end_time:.6g} < 1")
    return rec.points[-1].copy()


def exp_batch(m: MetricSpec, X, V, tol: float = DEFAULT_TOL):
    """Vectorized ``exp``; rows leaving the chart come back as NaN."""
    sol = flow_batch(m, X, V, 1.0, tol)
    out = sol(1.0)[:, : m.dim]
    out[np.isfinite(sol.exit_time)] = np.nan
    return out


def chern_coefficients(m: MetricSpec, v: TangentVector) -> np.ndarray:
    _check_vector(m, v)
    G = np.asarray(m.chern(v.point, v.components), float)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def _gamma(m, x, ref, a, b):
    G = m.chern(x, ref)
    G = 0.5 * (G + np.swapaxes(G, -1, -2))
    return np.einsum("...ljk,...j,...k->...l", G, a, b)


def _curve_eval(curve, t):
    if isinstance(curve, GeodesicRecord):
        return curve.at(t)[0]
    return np.asarray(curve(t), float)


def covariant_derivative(
    m: MetricSpec,
    curve: Union[GeodesicRecord, Callable],
    W: Callable,
    X: Callable,
    t: float,
    h: float = 1e-4,
) -> np.ndarray:
    """``D^W_c X`` at ``t``: ``dX/dt + Gamma(c, W)(c', X)``.

    ``curve``, ``W`` and ``X`` are callables of ``t`` returning coordinates
    (``curve`` may be a geodesic record).
    """
    w = np.asarray(W(t), float)
    if not np.any(w):
        raise ZeroReference("reference field vanishes")
    dX = sum(c * np.asarray(X(t + s * h), float) for s, c in _STENCIL) / h
    if isinstance(curve, GeodesicRecord):
        c, dc = curve.at(t)
    else:
        c = _curve_eval(curve, t)
        dc = sum(cc * _curve_eval(curve, t + s * h) for s, cc in _STENCIL) / h
    return dX + _gamma(m, c, w, dc, np.asarray(X(t), float))


def parallel_extension(m: MetricSpec, p, v):
    """Field agreeing with ``v`` at ``p`` whose covariant derivative vanishes there."""
    p = np.asarray(p, float)
    v = np.asarray(v, float)
    G = m.chern(p, v)
    G = 0.5 * (G + np.swapaxes(G, -1, -2))

    def V(x):
        dx = np.asarray(x, float) - p
        return v - np.einsum("ljk,...j,k->...l", G, dx, v)

    return V


def curvature_tensor(m: MetricSpec, p, V, X, Y, Z, h: float = 1e-3) -> np.ndarray:
    """``R^V(X, Y)Z`` with constant-coefficient ``X, Y, Z`` at ``p``.

    ``V`` is either a vector at ``p`` (extended by :func:`parallel_extension`)
    or a callable field.
    """
    p = np.asarray(p, float)
    X, Y, Z = (np.asarray(a, float) for a in (X, Y, Z))
    field_ = V if callable(V) else parallel_extension(m, p, V)
    vp = np.asarray(field_(p), float)
    if not np.any(vp):
        raise ZeroReference("reference vector vanishes")
    scale = max(1.0, float(np.linalg.norm(p)))

    def B(x, a, b):
        return _gamma(m, x, field_(x), a, b)

    def directional(a, b, c):
        # d/ds B(p + s a)(b, c) at s = 0
        n = float(np.linalg.norm(a))
        if n == 0:
            return np.zeros_like(p)
        step = h * scale / n
        pts = np.stack([p + s * step * a for s, _ in _STENCIL])
        vals = B(pts, np.broadcast_to(b, pts.shape), np.broadcast_to(c, pts.shape))
        return sum(w * vals[i] for i, (_, w) in enumerate(_STENCIL)) / step

    Byz = B(p, Y, Z)
    Bxz = B(p, X, Z)
    return directional(X, Y, Z) - directional(Y, X, Z) + _gamma(m, p, vp, X, Byz) - _gamma(m, p, vp, Y, Bxz)


def flag_curvature(m: MetricSpec, v: TangentVector, w) -> float:
    _check_vector(m, v)
    w = np.asarray(w, float)
    p, y = v.point, v.components
    g = m.g(p, y)
    gvv = y @ g @ y
    gww = w @ g @ w
    gvw = y @ g @ w
    denom = gvv * gww - gvw**2
    if denom < 1e-12 * gvv * max(gww, 1e-300):
        raise DegenerateFlag("flag pole and transverse edge are dependent")
    R = curvature_tensor(m, p, y, y, w, w)
    return float((R @ g @ y) / denom)


def spray_jacobians(m: MetricSpec, x, y):
    """``(dG/dx, dG/dy)`` with trailing index pair ``[i, j] = dG^i / d(.)^j``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    shape = np.broadcast_shapes(x.shape, y.shape) + (m.dim,)
    if m.flat:
        z = np.zeros(shape)
        return z, z.copy()
    Gx = fd_jacobian(lambda a: m.spray(a, y), x, 1e-4)
    Gy = m.nonlinear_connection(x, y)
    return Gx, Gy


def check_nonzero(v):
    if not np.any(np.asarray(v)):
        raise ZeroVector("zero vector")
