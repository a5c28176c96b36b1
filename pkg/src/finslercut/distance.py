"""Point-to-point and point-to-submanifold Finsler distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OutOfBox, Unreachable
from .geodesic import DEFAULT_TOL, GeodesicRecord, flow_batch, integrate_geodesic
from .metric import MetricSpec, TangentVector, legendre_inverse_array
from .submanifold import SubmanifoldSpec, normals_array

N_STARTS = 64
N_BASINS = 4
ANGLE_TOL = 0.05
FOOT_TOL = 1e-3
SCAN = 512
CHUNK = 8  # pairs per batch; a shared step sequence degrades with batch size
_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


@dataclass
class DistanceResult:
    value: float
    initial_direction: Optional[np.ndarray]
    multiplicity: int
    method: str
    start: Optional[np.ndarray] = None
    foot_params: Optional[np.ndarray] = None
    degenerate: bool = False
    residual: float = 0.0
    _metric: Optional[MetricSpec] = None

    @property
    def minimizer(self) -> Optional[GeodesicRecord]:
        """Unit-speed minimizing geodesic, integrated on demand."""
        if self.initial_direction is None or self.value == 0.0:
            return None
        return integrate_geodesic(self._metric, TangentVector(self.start, self.initial_direction), self.value)


def _scale(*pts):
    return max(1.0, *(float(np.linalg.norm(p)) for p in pts))


def closed_form_direction(m: MetricSpec, p, q, h=1e-5):
    """Unit initial velocity of the minimizer from ``p`` to ``q``: ``L^{-1}(-d_p d)``."""
    p = np.atleast_2d(np.asarray(p, float))
    q = np.atleast_2d(np.asarray(q, float))
    p, q = np.broadcast_arrays(p, q)
    if m.flat:
        v = q - p
        return v / m.F(p, v)[:, None]
    d = p.shape[1]
    grad = np.zeros_like(p)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        grad[:, i] = sum(c * m.distance(p + s * e, q) for s, c in _STENCIL) / h
    v = legendre_inverse_array(m, p, -grad)
    return v / m.F(p, v)[:, None]


def straight_length(m: MetricSpec, p, q, n=64):
    """F-length of the chart segment from ``p`` to ``q`` (Gauss-Legendre)."""
    s, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (s + 1)
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    pts = p[..., None, :] + t[:, None] * (q - p)[..., None, :]
    vals = m.F(pts, np.broadcast_to((q - p)[..., None, :], pts.shape))
    return 0.5 * np.sum(vals * w, axis=-1)


def _unit_dirs(m, p, count):
    d = len(p)
    if d == 2:
        th = 2 * np.pi * np.arange(count) / count
        E = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5**0.5) * i
        r = np.sqrt(1 - z**2)
        E = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    return E / m.F(p, E)[:, None]


def newton_batch(endpoint, Z0, target, scale, iters=25, fd=1e-6, admissible=None):
    """Damped Newton for ``endpoint(Z, rows) = target[rows]`` on every row at once.

    ``endpoint`` maps unknowns ``(m, k)`` of candidates ``rows`` to points
    ``(m, d)`` (NaN when the geodesic leaves the chart).  Trial steps
    failing ``admissible(Z, rows)`` are shortened.  Returns
    ``(Z, converged)``.
    """
    Z = np.array(Z0, float)
    target = np.asarray(target, float)
    K, k = Z.shape
    d = target.shape[1]
    done = np.zeros(K, bool)
    dead = np.zeros(K, bool)
    r = endpoint(Z, np.arange(K)) - target
    eye = np.eye(k)
    for _ in range(iters):
        res = np.linalg.norm(r, axis=1)
        done |= res < 1e-10 * scale
        dead |= ~np.isfinite(res)
        act = np.nonzero(~done & ~dead)[0]
        if len(act) == 0:
            break
        Za = Z[act]
        h = fd * np.maximum(1.0, np.linalg.norm(Za, axis=1))
        plus = Za[:, None] + h[:, None, None] * eye
        minus = Za[:, None] - h[:, None, None] * eye
        stack = np.concatenate([plus, minus], axis=1).reshape(-1, k)
        E = endpoint(stack, np.repeat(act, 2 * k)).reshape(len(act), 2 * k, d)
        J = np.swapaxes(E[:, :k] - E[:, k:], 1, 2) / (2 * h[:, None, None])  # (m, d, k)
        ok = np.all(np.isfinite(J), axis=(1, 2))
        step = np.zeros_like(Za)
        for i in np.nonzero(ok)[0]:
            step[i] = np.linalg.lstsq(J[i], -r[act[i]], rcond=None)[0]
        dead[act[~ok]] = True
        lam = np.ones(len(act))
        base = np.linalg.norm(r[act], axis=1)
        pending = ok.copy()
        for _ in range(8):
            idx = np.nonzero(pending)[0]
            if len(idx) == 0:
                break
            trial = Za[idx] + lam[idx, None] * step[idx]
            if admissible is not None:
                fine = admissible(trial, act[idx])
                lam[idx[~fine]] *= 0.5
                idx, trial = idx[fine], trial[fine]
                if len(idx) == 0:
                    continue
            rt = endpoint(trial, act[idx]) - target[act[idx]]
            good = np.linalg.norm(rt, axis=1) < base[idx]
            g = idx[good]
            r[act[g]] = rt[good]
            Za[g] = trial[good]
            pending[g] = False
            lam[idx[~good]] *= 0.5
        dead[act[pending]] = True
        Z[act] = Za
    res = np.linalg.norm(r, axis=1)
    return Z, res < 1e-10 * scale


def _exp_rows(m, X, V, tol, region=None):
    sol = flow_batch(m, X, V, 1.0, tol, region)
    out = sol(1.0)[:, : m.dim]
    out[np.isfinite(sol.exit_time)] = np.nan
    return out


def _region(P, Q):
    """Search box for shooting: the endpoints' bounding box, padded by its extent."""
    pts = np.vstack([P, Q])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = max(float(np.max(hi - lo)), 1.0)
    return lo - pad, hi + pad


def shoot_many(m: MetricSpec, P, Q, tol=DEFAULT_TOL, starts=N_STARTS, basins=N_BASINS, chunk=CHUNK):
    """Multi-start shooting for every pair ``(P[i], Q[i])``.

    Returns per pair the minimal length (inf if unreachable), its unit
    initial direction and the number of distinct minimizing directions.
    """
    P = np.atleast_2d(np.asarray(P, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    if len(P) > chunk:
        parts = [_shoot_chunk(m, P[i : i + chunk], Q[i : i + chunk], tol, starts, basins) for i in range(0, len(P), chunk)]
        return tuple(np.concatenate(a) for a in zip(*parts))
    return _shoot_chunk(m, P, Q, tol, starts, basins)


def _shoot_chunk(m, P, Q, tol, starts, basins):
    n, d = P.shape
    region = _region(P, Q)
    T = 1.5 * straight_length(m, P, Q)
    E = np.stack([_unit_dirs(m, p, starts) for p in P])  # (n, s, d)
    V0 = (T[:, None, None] * E).reshape(-1, d)
    X0 = np.repeat(P, starts, axis=0)
    sol = flow_batch(m, X0, V0, 1.0, tol, region)
    ts = np.linspace(0, 1, 301)
    Qr = np.repeat(Q, starts, axis=0)
    gaps = np.full((len(X0), len(ts)), np.inf)
    for j, t in enumerate(ts):
        ok = sol.valid(t)
        gaps[ok, j] = np.linalg.norm(sol(t)[ok, :d] - Qr[ok], axis=1)
    best = gaps.min(axis=1).reshape(n, starts)
    best_t = ts[np.argmin(gaps, axis=1)].reshape(n, starts)
    if d == 2:
        loc = (best <= np.roll(best, 1, axis=1)) & (best <= np.roll(best, -1, axis=1)) & np.isfinite(best)
    else:
        loc = np.isfinite(best)
    score = np.where(loc, best, np.inf)
    ranked = np.argsort(score, axis=1)[:, :basins]
    pair = np.repeat(np.arange(n), basins)
    sidx = ranked.reshape(-1)
    keep = np.isfinite(score[pair, sidx])
    pair, sidx = pair[keep], sidx[keep]
    Z0 = (best_t[pair, sidx] * T[pair])[:, None] * E[pair, sidx]
    base = P[pair]
    # a minimizer is no longer than the straight segment
    cap = 1.1 * T[pair] / 1.5 + 1e-12
    Z, conv = newton_batch(
        lambda V, rows: _exp_rows(m, base[rows], V, tol, region), Z0, Q[pair], float(max(1.0, np.abs(Q).max())),
        admissible=lambda V, rows: m.F(base[rows], V) <= cap[rows],
    )
    values = np.full(n, np.inf)
    dirs = np.full((n, d), np.nan)
    mult = np.zeros(n, int)
    F = m.F(base, Z)
    for i in range(n):
        rows = np.nonzero((pair == i) & conv)[0]
        if len(rows) == 0:
            continue
        k = rows[np.argmin(F[rows])]
        values[i] = F[k]
        dirs[i] = Z[k] / F[k]
        close = rows[F[rows] <= F[k] + 1e-6 * max(1.0, float(np.linalg.norm(Q[i])))]
        mult[i] = _count_clusters(Z / F[:, None], close)
    return values, dirs, mult


def shoot(m: MetricSpec, p, q, tol=DEFAULT_TOL, starts=N_STARTS, basins=N_BASINS):
    """Single-pair shooting; returns ``(value, direction, multiplicity)``."""
    vals, dirs, mult = shoot_many(m, p, q, tol, starts, basins)
    if not np.isfinite(vals[0]):
        raise Unreachable("shooting failed to reach the target")
    return float(vals[0]), dirs[0], int(mult[0])


def _count_clusters(dirs, keys):
    """Distinct initial directions by chart angle."""
    reps = []
    for v in dirs[keys]:
        u = v / np.linalg.norm(v)
        if all(np.arccos(np.clip(u @ r, -1, 1)) > ANGLE_TOL for r in reps):
            reps.append(u)
    return len(reps)


def distance_point(m: MetricSpec, p, q, method: Optional[str] = None, tol=DEFAULT_TOL) -> DistanceResult:
    """``d(p, q)``: closed form when the metric provides one, else multi-start shooting."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    m.check_point(p)
    m.check_point(q)
    if np.array_equal(p, q):
        return DistanceResult(0.0, None, 1, "closed_form", p, _metric=m)
    method = method or ("closed_form" if m.has_closed_distance else "shooting")
    if method == "closed_form":
        val = float(m.distance(p, q))
        v = closed_form_direction(m, p, q)[0]
        return DistanceResult(val, v, 1, "closed_form", p, _metric=m)
    val, v, mult = shoot(m, p, q, tol)
    return DistanceResult(val, v, mult, "shooting", p, _metric=m)


# -- distance from a submanifold -----------------------------------------


@dataclass
class SubmanifoldDistances:
    """Vectorized ``d(N, q)`` for a batch of queries."""

    values: np.ndarray
    feet: np.ndarray  # (n, k) best parameter
    multiplicity: np.ndarray
    degenerate: np.ndarray
    all_feet: list  # per query, parameters of every cluster


def _refine_params(fun, N, q_idx, u0, h, rounds=10, pts=17):
    """Zoom search of ``fun(q_idx, u)`` around ``u0`` (1-d parameter), then a parabolic step."""
    u = u0.copy()
    w = np.full_like(u, h)
    offs = np.linspace(-1, 1, pts)
    lo = N.param_lo[0]
    hi = N.param_hi[0]
    periodic = N.periodic[0]
    for _ in range(rounds):
        U = u[:, None] + w[:, None] * offs[None]
        if not periodic:
            U = np.clip(U, lo, hi)
        D = fun(np.repeat(q_idx, pts), U.reshape(-1)).reshape(U.shape)
        j = np.argmin(D, axis=1)
        u = U[np.arange(len(u)), j]
        w = w * 2.0 / (pts - 1) * 2.0
    hs = w / 4
    U3 = np.stack([u - hs, u, u + hs], axis=1)
    if not periodic:
        U3 = np.clip(U3, lo, hi)
    D3 = fun(np.repeat(q_idx, 3), U3.reshape(-1)).reshape(U3.shape)
    den = D3[:, 0] - 2 * D3[:, 1] + D3[:, 2]
    ok = den > 0
    shift = np.where(ok, 0.5 * hs * (D3[:, 0] - D3[:, 2]) / np.where(ok, den, 1.0), 0.0)
    shift = np.clip(shift, -hs, hs)
    u_new = u + shift
    if not periodic:
        u_new = np.clip(u_new, lo, hi)
    D_new = fun(q_idx, u_new)
    better = D_new < D3[:, 1]
    return np.where(better, u_new, u), np.where(better, D_new, D3[:, 1])


def distances_to_submanifold(
    m: MetricSpec, N: SubmanifoldSpec, Q, cluster_tol=1e-6, scan=SCAN, candidates=N_BASINS
) -> SubmanifoldDistances:
    """``d(N, q) = min_u d(x(u), q)`` for every row of ``Q`` (closed-form metrics)."""
    Q = np.atleast_2d(np.asarray(Q, float))
    nq = len(Q)
    if N.param_dim == 0:
        p = N.x(np.zeros((1, 0)))[0]
        vals = m.distance(np.broadcast_to(p, Q.shape), Q)
        z = np.zeros((nq, 0))
        return SubmanifoldDistances(vals, z, np.ones(nq, int), np.zeros(nq, bool), [z[i : i + 1] for i in range(nq)])
    if N.param_dim != 1:
        raise NotImplementedError("submanifold distance implemented for curves and points")

    def fun(qi, u):
        return m.distance(N.x(np.asarray(u)[:, None]), Q[qi])

    U = N.sample_params(scan)[:, 0]
    D = m.distance(N.x(U[:, None])[None, :, :], Q[:, None, :])  # (nq, scan)
    if N.periodic[0]:
        left, right = np.roll(D, 1, axis=1), np.roll(D, -1, axis=1)
    else:
        left = np.concatenate([np.full((nq, 1), np.inf), D[:, :-1]], axis=1)
        right = np.concatenate([D[:, 1:], np.full((nq, 1), np.inf)], axis=1)
    locmin = (D <= left) & (D <= right)
    Dm = np.where(locmin, D, np.inf)
    order = np.argsort(Dm, axis=1)[:, :candidates]
    du = U[1] - U[0]
    qi = np.repeat(np.arange(nq), candidates)
    idx = order.reshape(-1)
    valid = np.isfinite(Dm[qi, idx])
    qi, u0 = qi[valid], U[idx[valid]]
    # fine rescan around each coarse minimum; close pairs of minima split here
    fine = np.linspace(-2.0, 2.0, 129)
    Uf = u0[:, None] + du * fine[None]
    if not N.periodic[0]:
        Uf = np.clip(Uf, N.param_lo[0], N.param_hi[0])
    Df = fun(np.repeat(qi, len(fine)), Uf.reshape(-1)).reshape(Uf.shape)
    lf = np.concatenate([np.full((len(qi), 1), np.inf), Df[:, :-1]], axis=1)
    rf = np.concatenate([Df[:, 1:], np.full((len(qi), 1), np.inf)], axis=1)
    Dfm = np.where((Df <= lf) & (Df <= rf), Df, np.inf)
    two = np.argsort(Dfm, axis=1)[:, :2]
    rows = np.arange(len(qi))
    second_ok = np.isfinite(Dfm[rows, two[:, 1]])
    qi2 = np.concatenate([qi, qi[second_ok]])
    start = np.concatenate([Uf[rows, two[:, 0]], Uf[rows, two[:, 1]][second_ok]])
    u_ref, d_ref = _refine_params(fun, N, qi2, start, du / 32)
    cand_u = np.full((nq, 2 * candidates), np.nan)
    cand_d = np.full((nq, 2 * candidates), np.inf)
    fill = np.zeros(nq, int)
    for q_, u_, d_ in zip(qi2, u_ref, d_ref):
        cand_u[q_, fill[q_]] = u_
        cand_d[q_, fill[q_]] = d_
        fill[q_] += 1
    best = np.argmin(cand_d, axis=1)
    values = cand_d[np.arange(nq), best]
    feet = cand_u[np.arange(nq), best][:, None]
    scale = np.maximum(1.0, np.linalg.norm(Q, axis=1))
    mult = np.ones(nq, int)
    degenerate = np.zeros(nq, bool)
    all_feet = []
    # most of the scan within tolerance of the minimum: a whole family of minimizers
    near = np.sum(D <= values[:, None] + 1e-6 * scale[:, None], axis=1)
    for i in range(nq):
        if near[i] > scan // 2:
            degenerate[i] = True
            mult[i] = int(near[i])
            all_feet.append(U[D[i] <= values[i] + 1e-6 * scale[i]][:, None])
            continue
        keep = cand_d[i] <= values[i] + cluster_tol * scale[i]
        reps = []
        for u in cand_u[i][keep]:
            xu = N.x(np.array([[u]]))[0]
            if all(np.linalg.norm(xu - N.x(np.array([[r]]))[0]) > FOOT_TOL * scale[i] for r in reps):
                reps.append(u)
        mult[i] = len(reps)
        all_feet.append(np.array(reps)[:, None])
    return SubmanifoldDistances(values, feet, mult, degenerate, all_feet)


def _shoot_to_submanifold(m, N, q, tol=DEFAULT_TOL, fan=256, basins=2 * N_BASINS):
    """``d(N, q)`` for metrics without closed-form distance.

    A fan of N-geodesics locates candidate feet; Newton in ``(u, t)`` then
    solves ``exp(t n(u)) = q``.  Returns a list of ``(t, u, w)``.
    """
    from .submanifold import sample_normal_cone

    U, W = sample_normal_cone(N, fan)
    X, V = normals_array(m, N, U, W)
    near = float(np.min(np.linalg.norm(N.x(N.sample_params(64)) - q, axis=1)))
    reach = 3.0 * max(near, 0.1) + 1.0
    sol = flow_batch(m, X, V, reach, tol)
    ts = np.linspace(0, reach, 301)
    gaps = np.full((len(X), len(ts)), np.inf)
    for j, t in enumerate(ts):
        ok = sol.valid(t)
        gaps[ok, j] = np.linalg.norm(sol(t)[ok, : m.dim] - q, axis=1)
    best = gaps.min(axis=1)
    cand = np.argsort(best)[:basins]
    cand = cand[np.isfinite(best[cand])]
    Z0 = np.concatenate([U[cand], ts[np.argmin(gaps[cand], axis=1)][:, None]], axis=1)
    Wc = W[cand]

    def endpoint(Z, rows):
        Xz, Vz = normals_array(m, N, Z[:, :-1], Wc[rows])
        return _exp_rows(m, Xz, Vz * Z[:, -1:], tol)

    Z, conv = newton_batch(endpoint, Z0, np.broadcast_to(q, (len(cand), m.dim)), _scale(q))
    out = [(float(z[-1]), z[:-1].copy(), w) for z, w, c in zip(Z, Wc, conv) if c and z[-1] >= 0]
    if not out:
        raise Unreachable("no N-geodesic reaches the query")
    return out


def distance_to_submanifold(m: MetricSpec, N: SubmanifoldSpec, q, cluster_tol=1e-6) -> DistanceResult:
    q = np.asarray(q, float)
    m.check_point(q)
    if m.has_closed_distance:
        r = distances_to_submanifold(m, N, q[None], cluster_tol)
        u = r.feet[0]
        foot = N.x(u[None])[0]
        val = float(r.values[0])
        v = closed_form_direction(m, foot, q)[0] if val > 0 else None
        res = 0.0
        if v is not None and N.param_dim:
            T = N.frame(u[None])[0]
            res = float(np.max(np.abs(m.legendre(foot, v) @ T) / np.linalg.norm(T, axis=0)))
        return DistanceResult(
            val, v, int(r.multiplicity[0]), "closed_form", foot, u, bool(r.degenerate[0]), res, _metric=m
        )
    if N.param_dim == 0:
        r = distance_point(m, N.x(np.zeros((1, 0)))[0], q)
        r.foot_params = np.zeros(0)
        return r
    results = _shoot_to_submanifold(m, N, q)
    vals = np.array([r[0] for r in results])
    k = int(np.argmin(vals))
    feet = [N.x(r[1][None])[0] for r in results]
    reps = []
    for j in np.nonzero(vals <= vals[k] + cluster_tol * _scale(q))[0]:
        if all(np.linalg.norm(feet[j] - r) > FOOT_TOL * _scale(q) for r in reps):
            reps.append(feet[j])
    _, u, w = results[k]
    v = normals_array(m, N, u[None], w[None])[1][0]
    return DistanceResult(float(vals[k]), v, len(reps), "shooting", feet[k], u, False, 0.0, _metric=m)


# -- grid-graph oracle ----------------------------------------------------


def _stencil(max_offset=3):
    from math import gcd

    out = []
    for i in range(-max_offset, max_offset + 1):
        for j in range(-max_offset, max_offset + 1):
            if (i, j) != (0, 0) and gcd(abs(i), abs(j)) == 1:
                out.append((i, j))
    return np.array(out, float)


def grid_oracle_distance(m: MetricSpec, p, q, h: Optional[float] = None, box=None, margin=0.5) -> float:
    """Shortest path on a regular grid with a 32-neighbour stencil.

    Edge weights are ``F(midpoint, edge)``, so the graph is directed for
    irreversible metrics.  ``p`` and ``q`` join the graph as extra nodes
    linked to grid nodes within three cells.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import dijkstra

    if m.dim != 2:
        raise ValueError("grid oracle is two-dimensional")
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    if box is None:
        lo = np.minimum(p, q)
        hi = np.maximum(p, q)
        ext = max(float(np.max(hi - lo)), 0.2)
        lo, hi = lo - margin * ext, hi + margin * ext
        lo = np.maximum(lo, m.domain.lo)
        hi = np.minimum(hi, m.domain.hi)
    else:
        lo, hi = (np.asarray(b, float) for b in box)
        if np.any(p < lo) or np.any(p > hi) or np.any(q < lo) or np.any(q > hi):
            raise OutOfBox("endpoints outside the oracle box")
    if h is None:
        h = float(np.max(hi - lo)) / 120
    nx = int(np.ceil((hi[0] - lo[0]) / h)) + 1
    ny = int(np.ceil((hi[1] - lo[1]) / h)) + 1
    gx = lo[0] + h * np.arange(nx)
    gy = lo[1] + h * np.arange(ny)
    GX, GY = np.meshgrid(gx, gy, indexing="ij")
    P = np.stack([GX.ravel(), GY.ravel()], axis=1)
    alive = np.asarray(m.contains(P), bool)
    ids = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, wts = [], [], []
    for di, dj in _stencil():
        di, dj = int(di), int(dj)
        i0, i1 = max(0, -di), min(nx, nx - di)
        j0, j1 = max(0, -dj), min(ny, ny - dj)
        a = ids[i0:i1, j0:j1].ravel()
        b = ids[i0 + di : i1 + di, j0 + dj : j1 + dj].ravel()
        ok = alive[a] & alive[b]
        a, b = a[ok], b[ok]
        e = np.array([di * h, dj * h])
        mid = 0.5 * (P[a] + P[b])
        rows.append(a)
        cols.append(b)
        wts.append(m.F(mid, np.broadcast_to(e, mid.shape)))
    n = nx * ny
    extra = []
    for k, z in enumerate((p, q)):
        near = np.nonzero(alive & (np.linalg.norm(P - z, axis=1) <= 3 * h))[0]
        node = n + k
        zz = np.broadcast_to(z, (len(near), 2))
        if k == 0:  # source: edges out of p
            rows.append(np.full(len(near), node))
            cols.append(near)
            wts.append(m.F(0.5 * (zz + P[near]), P[near] - zz))
        else:  # target: edges into q
            rows.append(near)
            cols.append(np.full(len(near), node))
            wts.append(m.F(0.5 * (zz + P[near]), zz - P[near]))
        extra.append(node)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    wts = np.concatenate(wts)
    G = coo_matrix((np.maximum(wts, 1e-300), (rows, cols)), shape=(n + 2, n + 2)).tocsr()
    dist = dijkstra(G, directed=True, indices=n)
    val = float(dist[n + 1])
    if not np.isfinite(val):
        raise Unreachable("grid oracle found no path")
    return val
