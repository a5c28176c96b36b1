"""Jacobi and N-Jacobi fields.

A Jacobi field is integrated as the linearization of the geodesic
equation, ``J'' = -2 (dG/dx J + dG/dy J')``, carried jointly with the
geodesic.  Its Chern covariant derivative is ``DJ = J' + N J`` with
``N = dG/dy``; this system is equivalent to ``D^2 J = R(g', J) g'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNormal
from .geodesic import DEFAULT_TOL, GeodesicRecord, chart_inside, spray_jacobians
from .metric import MetricSpec
from .ode import BatchSolution, integrate_batch


def jacobi_rhs(m: MetricSpec, k: int):
    """Right-hand side for state ``[x, y, J_1, J_1', ..., J_k, J_k']``."""
    d = m.dim

    def rhs(Y):
        x, y = Y[:, :d], Y[:, d : 2 * d]
        Gx, Gy = spray_jacobians(m, x, y)
        out = np.empty_like(Y)
        out[:, :d] = y
        out[:, d : 2 * d] = -2.0 * m.spray(x, y)
        for a in range(k):
            o = 2 * d + 2 * d * a
            J, Jd = Y[:, o : o + d], Y[:, o + d : o + 2 * d]
            out[:, o : o + d] = Jd
            out[:, o + d : o + 2 * d] = -2.0 * (
                np.einsum("nij,nj->ni", Gx, J) + np.einsum("nij,nj->ni", Gy, Jd)
            )
        return out

    return rhs


def jacobi_batch(m: MetricSpec, X, V, J0, Jdot0, t_end, tol=DEFAULT_TOL) -> BatchSolution:
    """Geodesics from ``(X, V)`` with ``k`` Jacobi fields each.

    ``J0`` and ``Jdot0`` have shape ``(n, k, d)`` and hold coordinate
    derivatives (not covariant ones).
    """
    X = np.atleast_2d(np.asarray(X, float))
    V = np.atleast_2d(np.asarray(V, float))
    J0 = np.asarray(J0, float)
    Jdot0 = np.asarray(Jdot0, float)
    n, k, d = J0.shape
    pairs = np.concatenate([J0, Jdot0], axis=2).reshape(n, 2 * k * d)
    Y0 = np.concatenate([X, V, pairs], axis=1)
    return integrate_batch(jacobi_rhs(m, k), Y0, float(t_end), rtol=tol, atol=tol, inside=chart_inside(m))


def split_state(Y, d, k):
    """``(x, y, J, J')`` with ``J`` of shape ``(..., k, d)``."""
    x, y = Y[..., :d], Y[..., d : 2 * d]
    pairs = Y[..., 2 * d : 2 * d + 2 * d * k].reshape(Y.shape[:-1] + (k, 2 * d))
    return x, y, pairs[..., :d], pairs[..., d:]


def covariant_jacobi(m: MetricSpec, x, y, J, Jd):
    N = m.nonlinear_connection(x, y)
    return Jd + np.einsum("...ij,...kj->...ki", N, J)


@dataclass
class JacobiRecord:
    times: np.ndarray
    J_values: np.ndarray
    DJ_values: np.ndarray
    along: GeodesicRecord

    def at(self, m: MetricSpec, t):
        """``(J, DJ)`` at time ``t`` from dense output."""
        sol = self.along._sol
        Y = sol(np.atleast_1d(np.asarray(t, float)), np.zeros(np.size(t), dtype=int))
        d = self.along.dim
        x, y, J, Jd = split_state(Y, d, 1)
        DJ = covariant_jacobi(m, x, y, J, Jd)
        if np.ndim(t) == 0:
            return J[0, 0], DJ[0, 0]
        return J[:, 0], DJ[:, 0]


def _record(m, sol, d, k, field_index=0):
    along = GeodesicRecord.from_batch(sol, 0, d)
    Y = sol(along.times, np.zeros(along.times.shape, dtype=int))
    x, y, J, Jd = split_state(Y, d, k)
    DJ = covariant_jacobi(m, x, y, J, Jd)
    return JacobiRecord(along.times, J[:, field_index].copy(), DJ[:, field_index].copy(), along)


def jacobi_field(m: MetricSpec, gamma, J0, DJ0, t_end=None, tol=DEFAULT_TOL) -> JacobiRecord:
    """Jacobi field along ``gamma`` with ``J(0) = J0`` and ``DJ(0) = DJ0``.

    ``gamma`` is a :class:`GeodesicRecord` (integrated again jointly with
    the field, up to its end time) or an initial ``TangentVector``.
    """
    if isinstance(gamma, GeodesicRecord):
        x0, y0 = gamma.points[0], gamma.velocities[0]
        t_end = gamma.end_time if t_end is None else t_end
    else:
        x0, y0 = gamma.point, gamma.components
        if t_end is None:
            raise ValueError("t_end required when starting from a vector")
    J0 = np.asarray(J0, float)
    Jdot0 = np.asarray(DJ0, float) - m.nonlinear_connection(x0, y0) @ J0
    sol = jacobi_batch(m, x0[None], y0[None], J0[None, None], Jdot0[None, None], t_end, tol)
    return _record(m, sol, m.dim, 1)


def n_jacobi_initial(m: MetricSpec, N, U, W, h=1e-4):
    """Initial data of the N-Jacobi frame for normals ``(U, W)``.

    Returns ``(X, V, J0, Jdot0)``.  Tangent fields come from varying the
    foot point along the normal field, ``J(0) = x_a``, ``J'(0) = dn/du_a``;
    for a cone of dimension > 0 the remaining fields vary the normal
    direction with ``J(0) = 0``.
    """
    from .submanifold import normals_array

    U = np.atleast_2d(np.asarray(U, float)).reshape(len(np.atleast_2d(W)), N.param_dim)
    W = np.atleast_2d(np.asarray(W, float))
    X, V = normals_array(m, N, U, W)
    n, d = X.shape
    fields_J, fields_Jd = [], []
    T = N.frame(U)  # (n, d, k)
    for a in range(N.param_dim):
        e = np.zeros(N.param_dim)
        e[a] = h
        acc = 0.0
        for s, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
            acc = acc + c * normals_array(m, N, U + s * e, W)[1]
        fields_J.append(T[:, :, a])
        fields_Jd.append(acc / h)
    codim = W.shape[1]
    if codim > 1:
        # tangent directions of the annihilator sphere at W
        for b in range(codim - 1):
            Wt = _sphere_tangent(W, b)
            acc = 0.0
            for s, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
                Ws = W + s * h * Wt
                Ws = Ws / np.linalg.norm(Ws, axis=1, keepdims=True)
                acc = acc + c * normals_array(m, N, U, Ws)[1]
            fields_J.append(np.zeros((n, d)))
            fields_Jd.append(acc / h)
    J0 = np.stack(fields_J, axis=1)
    Jd0 = np.stack(fields_Jd, axis=1)
    return X, V, J0, Jd0


def _sphere_tangent(W, b):
    """An orthonormal tangent frame vector of the unit sphere at rows of ``W``."""
    n, c = W.shape
    out = np.zeros_like(W)
    for i in range(n):
        basis = np.linalg.svd(W[i][None])[2][1:]
        out[i] = basis[b]
    return out


def n_jacobi_field(m: MetricSpec, N, u, w, J0_tangent, t_end, tol=DEFAULT_TOL) -> JacobiRecord:
    """N-Jacobi field along the N-geodesic of the unit normal ``(u, w)``.

    ``J0_tangent`` gives the coefficients of ``J(0)`` in the tangent frame
    of ``N``; the initial covariant derivative is fixed by the variation
    through N-geodesics.
    """
    from .submanifold import normal_residual

    X, V, J0, Jd0 = n_jacobi_initial(m, N, u, w)
    res = normal_residual(m, N, np.atleast_2d(u).reshape(1, N.param_dim), V)[0]
    if res > 1e-6:
        raise NotNormal(f"normal-cone residual {res:.2e}")
    c = np.asarray(J0_tangent, float).reshape(-1)
    k = N.param_dim
    J = np.einsum("a,nad->nd", c, J0[:, :k])
    Jd = np.einsum("a,nad->nd", c, Jd0[:, :k])
    sol = jacobi_batch(m, X, V, J[:, None], Jd[:, None], t_end, tol)
    return _record(m, sol, m.dim, 1)
