"""Finsler gradient and hessian of scalar functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SingularPoint
from .metric import Box, MetricSpec, SymmetricBilinear, TangentVector, fd_tensor, legendre_inverse_array

FD_REL = 1e-3


@dataclass(frozen=True)
class ScalarField:
    """``f`` maps ``(..., d)`` points to ``(...)`` values."""

    f: Callable
    df: Optional[Callable] = None
    domain: Optional[Box] = None

    def __call__(self, x):
        return np.asarray(self.f(np.asarray(x, float)), float)


def _as_field(f):
    return f if isinstance(f, ScalarField) else ScalarField(f)


def differential(f, p, h=FD_REL) -> np.ndarray:
    f = _as_field(f)
    p = np.asarray(p, float)
    if f.df is not None:
        return np.asarray(f.df(p), float)
    return fd_tensor(lambda x, v: f(x), p, p, "x", h)


def second_derivatives(f, p, h=FD_REL) -> np.ndarray:
    f = _as_field(f)
    p = np.asarray(p, float)
    if f.df is not None:
        from .metric import fd_jacobian

        H = fd_jacobian(lambda x: np.asarray(f.df(x), float), p, h)
    else:
        H = fd_tensor(lambda x, v: f(x), p, p, "xx", h)
    return 0.5 * (H + np.swapaxes(H, -1, -2))


def _grad_array(m, f, p, h):
    df = differential(f, p, h)
    if np.linalg.norm(df) <= 1e-10:
        raise SingularPoint("differential vanishes; gradient undefined")
    return df, legendre_inverse_array(m, p, df)


def gradient(m: MetricSpec, f, p, h=FD_REL) -> TangentVector:
    """``grad f = L^{-1}(df)``."""
    p = np.asarray(p, float)
    _, v = _grad_array(m, f, p, h)
    return TangentVector(p, v)


def _gamma(m, x, ref):
    G = m.chern(x, ref)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def hessian(m: MetricSpec, f, p, h=FD_REL) -> SymmetricBilinear:
    """``Hess f(X, Y) = XY f - (nabla^{grad f}_X Y) f`` for constant-coefficient fields."""
    p = np.asarray(p, float)
    df, gf = _grad_array(m, f, p, h)
    H = second_derivatives(f, p, h) - np.einsum("l,ljk->jk", df, _gamma(m, p, gf))
    return SymmetricBilinear(p, gf, 0.5 * (H + H.T))


def hessian_via_gradient(m: MetricSpec, f, p, h=FD_REL) -> np.ndarray:
    """``g_{grad f}(nabla^{grad f}_X grad f, Y)`` as a matrix (not symmetrized)."""
    p = np.asarray(p, float)
    _, gf = _grad_array(m, f, p, h)
    d = len(p)
    hs = h * max(1.0, float(np.linalg.norm(p)))
    D = np.zeros((d, d))  # D[:, j] = d(grad f)/dx^j
    for j in range(d):
        e = np.zeros(d)
        e[j] = hs
        acc = 0.0
        for s, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
            acc = acc + c * _grad_array(m, f, p + s * e, h)[1]
        D[:, j] = acc / hs
    G = _gamma(m, p, gf)
    cov = D + np.einsum("ljk,k->lj", G, gf)  # column j: nabla_{e_j} grad f
    return cov.T @ m.g(p, gf)


def level_set_shape_from_hessian(m: MetricSpec, f, p, h=FD_REL):
    """Shape operator of the level set through ``p`` for ``n = grad f / F(grad f)``.

    Uses ``g_n(A x, y) = -Hess f(x, y) / F(grad f)``.  Returns ``(A, basis)``
    with ``A`` expressed in the columns of ``basis`` (a basis of ``ker df``).
    """
    p = np.asarray(p, float)
    H = hessian(m, f, p, h)
    df = differential(f, p, h)
    gf = H.reference_vector
    Fn = float(m.F(p, gf))
    n = gf / Fn
    # ker df: orthonormal complement of df
    _, _, Vt = np.linalg.svd(df[None])
    T = Vt[1:].T
    Gt = T.T @ m.g(p, n) @ T
    A = -np.linalg.solve(Gt, T.T @ H.matrix @ T) / Fn
    return A, T


def distance_field(m: MetricSpec, q, forward=True) -> ScalarField:
    """``x -> d(q, x)`` (``forward``) or ``x -> d(x, q)`` from the closed form."""
    q = np.asarray(q, float)
    if forward:
        return ScalarField(lambda x: m.distance(np.broadcast_to(q, np.shape(x)), x))
    return ScalarField(lambda x: m.distance(x, np.broadcast_to(q, np.shape(x))))
