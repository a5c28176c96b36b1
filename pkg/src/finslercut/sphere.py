"""Small backward spheres and the curvature comparison ``ct_lambda``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleCrossing, RadiusTooLarge
from .geodesic import flag_curvature
from .jacobi import covariant_jacobi, jacobi_batch, split_state
from .metric import MetricSpec, TangentVector, reverse_metric
from .submanifold import NormalVector, SubmanifoldSpec, normals_array, shape_operator

SPHERE_TOL = 1e-12
KAPPA_TOL = 1e-3


@dataclass(frozen=True)
class ComparisonBound:
    lam: float
    r: float
    ct_value: float


def ct_lambda(lam, r) -> float:
    """``sqrt(l) cot(sqrt(l) r)``, ``1/r`` or ``sqrt(-l) coth(sqrt(-l) r)`` by the sign of ``l``."""
    lam = float(lam)
    r = float(r)
    if not r > 0:
        raise ValueError("radius must be positive")
    if lam > 0:
        s = np.sqrt(lam)
        if s * r >= np.pi:
            raise PoleCrossing(f"sqrt(lambda) r = {s * r:.6g} >= pi")
        return float(s / np.tan(s * r))
    if lam < 0:
        s = np.sqrt(-lam)
        return float(s / np.tanh(s * r))
    return 1.0 / r


def comparison_bound(lam, r) -> ComparisonBound:
    return ComparisonBound(float(lam), float(r), ct_lambda(lam, r))


def _unit_dirs(m, q, th):
    e = np.stack([np.cos(th), np.sin(th)], axis=1)
    de = np.stack([-np.sin(th), np.cos(th)], axis=1)
    Q = np.broadcast_to(q, e.shape)
    F = m.F(Q, e)
    # dF(e)[e'] = L(e)(e') / F(e)
    dF = np.einsum("ni,ni->n", m.legendre(Q, e), de) / F
    return e / F[:, None], de / F[:, None] - e * (dF / F**2)[:, None]


class _ReverseSphere:
    """``theta -> exp~_q(r v~(theta))`` with its tangent from reverse Jacobi fields."""

    def __init__(self, m, q, r, tol=SPHERE_TOL):
        self.m = m
        self.rev = reverse_metric(m)
        self.q = np.asarray(q, float)
        self.r = float(r)
        self.tol = tol
        self._cache = {}

    def prime(self, th, h=1e-4):
        """Integrate ``th`` and its difference stencil in one batch."""
        th = np.asarray(th, float).reshape(-1)
        allth = np.concatenate([th] + [th + s * h for s in (-2, -1, 1, 2)])
        parts = self._solve(allth)
        for i, t in enumerate(allth):
            self._cache[float(t)] = tuple(a[i] for a in parts)

    def state(self, th):
        th = np.asarray(th, float).reshape(-1)
        if all(float(t) in self._cache for t in th):
            rows = [self._cache[float(t)] for t in th]
            return tuple(np.stack(a) for a in zip(*rows))
        return self._solve(th)

    def _solve(self, th):
        v, dv = _unit_dirs(self.rev, self.q, th)
        X = np.broadcast_to(self.q, v.shape).copy()
        sol = jacobi_batch(self.rev, X, v, np.zeros((len(th), 1, 2)), dv[:, None], self.r, self.tol)
        return split_state(sol(self.r), 2, 1)

    def x(self, U):
        return self.state(U[:, 0])[0]

    def dx(self, U):
        return self.state(U[:, 0])[2][:, 0, :, None]

    def ddx(self, U, h=1e-4):
        th = U[:, 0]
        acc = 0.0
        for s, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
            acc = acc + c * self.state(th + s * h)[2][:, 0]
        return (acc / h)[:, :, None, None]

    def spec(self) -> SubmanifoldSpec:
        return SubmanifoldSpec(
            ambient_dim=2,
            param_dim=1,
            immersion=self.x,
            jacobian=self.dx,
            hessian=self.ddx,
            param_lo=(0.0,),
            param_hi=(2 * np.pi,),
            periodic=(True,),
            name=f"backward_sphere(r={self.r:g})",
            kind="backward_sphere",
            params={"q": self.q.tolist(), "r": self.r},
        )


def backward_sphere(m: MetricSpec, q, r) -> SubmanifoldSpec:
    """``{x : d(x, q) = r}`` traced by reverse-metric geodesics from ``q``."""
    if m.dim != 2:
        raise NotImplementedError("backward spheres are traced in two dimensions")
    return _ReverseSphere(m, q, r).spec()


def injectivity_probe(m: MetricSpec, q, r, directions=16):
    """Smallest radial cut time at ``q`` for ``m`` and its reverse, probed up to ``2 r``."""
    from .cut import cut_times
    from .submanifold import point, sample_normal_cone

    N = point(q)
    _, W = sample_normal_cone(N, directions)
    U = np.zeros((len(W), 0))
    out = []
    for mm in (m, reverse_metric(m)):
        t = cut_times(mm, N, U, W, t_max=2 * r, focal=False)
        out.append(float(t.rho.min()))
    return tuple(out)


def estimate_lambda(m: MetricSpec, q, r, n_points=25, n_flags=8):
    """Largest flag curvature over a sampled ball of radius ``r`` about ``q``.

    Base points: ``q`` and reverse radial points at ``r/3, 2r/3, r`` on
    ``(n_points - 1) / 3`` rays; ``n_flags`` flag poles at each.
    """
    rev = reverse_metric(m)
    q = np.asarray(q, float)
    rays = max(1, (n_points - 1) // 3)
    th = 2 * np.pi * np.arange(rays) / rays
    v, _ = _unit_dirs(rev, q, th)
    pts = [q]
    for frac in (1 / 3, 2 / 3, 1.0):
        from .geodesic import exp_batch

        pts.extend(exp_batch(rev, np.broadcast_to(q, v.shape), frac * r * v, SPHERE_TOL))
    lam = -np.inf
    phi = np.pi * np.arange(n_flags) / n_flags
    for p in pts:
        for a in phi:
            pole = np.array([np.cos(a), np.sin(a)])
            edge = np.array([-np.sin(a), np.cos(a)])
            lam = max(lam, flag_curvature(m, TangentVector(p, pole), edge))
    return float(lam), len(pts), n_flags


@dataclass
class SphereCurvatureReport:
    q: np.ndarray
    r: float
    lambda_est: float
    ct_value: float
    min_kappa: float
    margin: float
    passed: bool
    kappas: np.ndarray
    reverse_law_error: float
    jacobi_error: float
    inj_forward: float
    inj_backward: float
    sampling: str

    def row(self):
        return (self.q.tolist(), self.r, self.lambda_est, self.ct_value, self.min_kappa, self.margin)


def backward_sphere_curvature_check(
    m: MetricSpec, q, r, sample_count=50, lam=None, tol=KAPPA_TOL, probe_inj=True
) -> SphereCurvatureReport:
    """Principal curvatures of ``S_-(q, r)`` along inward radial normals against ``ct_lambda(r)``.

    ``lam`` defaults to the sampled flag-curvature maximum on the ball.
    Also reports the reverse-shape law error ``|A~_{-n} + A_n|`` and the
    mismatch with ``g(DJ, J) / g(J, J)`` along reverse radial geodesics.
    """
    q = np.asarray(q, float)
    r = float(r)
    m.check_point(q)
    inj_f = inj_b = np.inf
    if probe_inj:
        inj_f, inj_b = injectivity_probe(m, q, r)
        if min(inj_f, inj_b) <= r:
            raise RadiusTooLarge(f"r={r:g} exceeds the probed injectivity radius {min(inj_f, inj_b):.6g} at q")
    sampling = "given"
    if lam is None:
        lam, npts, nflags = estimate_lambda(m, q, r)
        sampling = f"{npts} points x {nflags} flags"
    ct = ct_lambda(lam, r)
    sph = _ReverseSphere(m, q, r)
    S = sph.spec()
    rev = sph.rev
    th = 2 * np.pi * (np.arange(sample_count) + 0.5) / sample_count
    sph.prime(th)
    x, y, J, Jd = sph.state(th)
    DJ = covariant_jacobi(rev, x, y, J, Jd)[:, 0]
    J = J[:, 0]
    kappas = np.empty(sample_count)
    rev_err = 0.0
    jac_err = 0.0
    for i in range(sample_count):
        n = -y[i]
        # the inward normal is the unit normal with positive co-orientation
        _, nv = normals_array(m, S, th[i : i + 1, None], np.ones((1, 1)))
        if np.linalg.norm(nv[0] - n) > 1e-6 * max(1.0, np.linalg.norm(n)):
            raise RuntimeError("backward sphere parametrization lost orientation")
        nrm = NormalVector(np.array([th[i]]), TangentVector(x[i], n), 1.0, np.ones(1))
        A = shape_operator(m, S, nrm)[0, 0]
        kappas[i] = A
        back = NormalVector(np.array([th[i]]), TangentVector(x[i], -n), -1.0, -np.ones(1))
        Ab = shape_operator(rev, S, back)[0, 0]
        rev_err = max(rev_err, abs(Ab + A))
        g = rev.g(x[i], y[i])
        jac_err = max(jac_err, abs(A - (DJ[i] @ g @ J[i]) / (J[i] @ g @ J[i])))
    kmin = float(kappas.min())
    margin = kmin - (ct - tol)
    return SphereCurvatureReport(
        q, r, float(lam), ct, kmin, float(margin), bool(margin >= 0), kappas,
        float(rev_err), float(jac_err), inj_f, inj_b, sampling,
    )
