"""Acceptance suites: each criterion is a list of numeric checks with tolerance and margin."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List

import numpy as np

from . import metric as M
from . import submanifold as S
from .calculus import distance_field, hessian, level_set_shape_from_hessian
from .cut import (
    cut_locus_sample,
    distance_to_cloud,
    inj_radius_submanifold,
    interior_radius_study,
    separating_set_samples,
    singleton_intersection_check,
    tubular_verify,
)
from .distance import grid_oracle_distance, shoot_many
from .geodesic import exp_map, flag_curvature, integrate_geodesic
from .jacobi import jacobi_field
from .metric import TangentVector, legendre_inverse_array, reverse_metric
from .sphere import backward_sphere, backward_sphere_curvature_check, ct_lambda
from .submanifold import NormalVector, shape_operator


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    margin: float
    relation: str = "<="

    @classmethod
    def at_most(cls, name, measured, tol):
        measured = float(measured)
        return cls(name, measured, float(tol), bool(measured <= tol), float(tol - measured), "<=")

    @classmethod
    def at_least(cls, name, measured, bound):
        measured = float(measured)
        return cls(name, measured, float(bound), bool(measured >= bound), float(measured - bound), ">=")


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: List[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def line(self):
        worst = min(self.checks, key=lambda c: c.margin / (abs(c.tolerance) + 1e-300)) if self.checks else None
        tail = f"worst {worst.name}: {worst.measured:.3e} {worst.relation} {worst.tolerance:.3e}" if worst else ""
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title} ({len(self.checks)} checks, {self.seconds:.1f}s) {tail}"

    def to_dict(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "checks": [asdict(c) for c in self.checks],
        }


def _metrics():
    return {"E2": M.euclidean(2), "RD": M.randers(), "SP": M.sphere(), "HY": M.hyperbolic()}


def _disk(rng, n, R):
    r = R * np.sqrt(rng.uniform(0, 1, n))
    a = rng.uniform(0, 2 * np.pi, n)
    return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)


def _points(name, rng, n):
    if name == "HY":
        return _disk(rng, n, 0.9)
    return rng.uniform(-2, 2, (n, 2))


# -- 1. tensors ---------------------------------------------------------------


def criterion_1(seed=0, per_metric=250) -> CriterionResult:
    res = CriterionResult(1, "Tensor identities")
    rng = np.random.default_rng(seed)
    for name, m in _metrics().items():
        P = _points(name, rng, per_metric)
        V = rng.normal(size=(per_metric, 2)) * np.exp(rng.uniform(-1, 1, (per_metric, 1)))
        F = m.F(P, V)
        g = m.g(P, V)
        C = m.cartan(P, V)
        res.checks.append(Check.at_most(f"{name} g_v(v,v)=F^2", np.max(np.abs(np.einsum("ni,nij,nj->n", V, g, V) - F**2)), 1e-9))
        res.checks.append(Check.at_most(f"{name} C_v(v,.,.)=0", np.max(np.abs(np.einsum("nijk,ni->njk", C, V))), 1e-6))
        if m.kind == "riemannian-conformal":
            res.checks.append(Check.at_most(f"{name} Cartan vanishes", np.max(np.abs(C)), 1e-9))
        xi = m.legendre(P, V)
        back = legendre_inverse_array(m, P, xi)
        rel = np.linalg.norm(back - V, axis=1) / np.linalg.norm(V, axis=1)
        res.checks.append(Check.at_most(f"{name} Legendre roundtrip", rel.max(), 1e-8))
        lam = rng.uniform(0.1, 10, per_metric)
        hom = np.abs(m.F(P, lam[:, None] * V) - lam * F) / (lam * F)
        res.checks.append(Check.at_most(f"{name} homogeneity", hom.max(), 1e-10))
        rev = reverse_metric(m)
        err = max(
            np.max(np.abs(rev.F(P, V) - m.F(P, -V))),
            np.max(np.abs(rev.g(P, V) - m.g(P, -V))),
            np.max(np.abs(rev.cartan(P, V) + m.cartan(P, -V))),
        )
        Q = _points(name, rng, per_metric)
        err = max(err, np.max(np.abs(rev.distance(P, Q) - m.distance(Q, P))))
        res.checks.append(Check.at_most(f"{name} reverse relations", err, 1e-9))
    z = M.zermelo()
    P = rng.uniform(-1.5, 1.5, (100, 2))
    V = rng.normal(size=(100, 2))
    gz = z.g(P, V)
    res.checks.append(
        Check.at_most("zermelo (FD) g_v(v,v)=F^2", np.max(np.abs(np.einsum("ni,nij,nj->n", V, gz, V) - z.F(P, V) ** 2)), 1e-6)
    )
    return res


# -- 2. geodesics -------------------------------------------------------------


def _g_orthonormal(m, p, v):
    g = m.g(p, v)
    w = np.array([-v[1], v[0]])
    w = w - (w @ g @ v) / (v @ g @ v) * v
    return w / np.sqrt(w @ g @ w)


def criterion_2(seed=0) -> CriterionResult:
    res = CriterionResult(2, "Geodesics")
    rng = np.random.default_rng(seed)
    mets = _metrics()
    mets["MQ"] = M.minkowski_quartic()
    for name, m in mets.items():
        drift = 0.0
        for _ in range(10):
            p = _points(name, rng, 1)[0] * 0.5
            v = rng.normal(size=2)
            v /= m.F(p, v)
            rec = integrate_geodesic(m, TangentVector(p, v), 5.0)
            drift = max(drift, float(np.max(np.abs(rec.speeds(m) - 1.0))))
        res.checks.append(Check.at_most(f"{name} F-speed drift on [0,5]", drift, 1e-6))
        if m.flat:
            err = 0.0
            for _ in range(10):
                p = rng.uniform(-1, 1, 2)
                v = rng.normal(size=2)
                err = max(err, float(np.linalg.norm(exp_map(m, TangentVector(p, v)) - (p + v))))
            res.checks.append(Check.at_most(f"{name} flat exponential", err, 1e-8))
    for name, K in (("SP", 1.0), ("HY", -1.0)):
        m = mets[name]
        err = 0.0
        for _ in range(20):
            p = _points(name, rng, 1)[0] * 0.5
            v, w = rng.normal(size=2), rng.normal(size=2)
            err = max(err, abs(flag_curvature(m, TangentVector(p, v), w) - K))
        res.checks.append(Check.at_most(f"{name} flag curvature = {K:+g}", err, 1e-3))
        prof = np.sin if K > 0 else np.sinh
        err = 0.0
        for _ in range(5):
            p = _points(name, rng, 1)[0] * 0.3
            v = rng.normal(size=2)
            v /= m.F(p, v)
            w = _g_orthonormal(m, p, v)
            rec = jacobi_field(m, TangentVector(p, v), np.zeros(2), w, 2.0)
            Y = rec.along.velocities
            g = m.g(rec.along.points, Y)
            norm = np.sqrt(np.einsum("ni,nij,nj->n", rec.J_values, g, rec.J_values))
            err = max(err, float(np.max(np.abs(norm - prof(rec.times)))))
        res.checks.append(Check.at_most(f"{name} Jacobi norm profile", err, 1e-3))
    return res


# -- 3. distance ----------------------------------------------------------------

# pairs stay where minimizers stay inside the chart box: the unit disk is a hemisphere
_PAIR_RADIUS = {"E2": 1.0, "RD": 1.0, "SP": 1.0, "HY": 0.6}


def criterion_3(seed=7, pairs=200) -> CriterionResult:
    res = CriterionResult(3, "Distance")
    rng = np.random.default_rng(seed)
    for name, m in _metrics().items():
        R = _PAIR_RADIUS[name]
        P, Q = _disk(rng, pairs, R), _disk(rng, pairs, R)
        v, _, _ = shoot_many(m, P, Q)
        g = np.array([grid_oracle_distance(m, p, q) for p, q in zip(P, Q)])
        res.checks.append(Check.at_most(f"{name} shooting vs grid oracle (rel)", np.max(np.abs(g / v - 1)), 0.03))
    rd = M.randers()
    a, b = np.zeros(2), np.array([1.0, 0.0])
    res.checks.append(Check.at_most("RD d((0,0),(1,0)) = 1.5", abs(rd.distance(a, b) - 1.5), 1e-12))
    res.checks.append(Check.at_most("RD d((1,0),(0,0)) = 0.5", abs(rd.distance(b, a) - 0.5), 1e-12))
    res.checks.append(Check.at_most("RD oracle forward (rel)", abs(grid_oracle_distance(rd, a, b) / 1.5 - 1), 0.03))
    res.checks.append(Check.at_most("RD oracle backward (rel)", abs(grid_oracle_distance(rd, b, a) / 0.5 - 1), 0.03))
    for name, m, n in (("RD", rd, 20), ("zermelo", M.zermelo(), 4)):
        P, Q = _disk(rng, n, 1.0), _disk(rng, n, 1.0)
        fwd, _, _ = shoot_many(m, P, Q)
        bwd, _, _ = shoot_many(reverse_metric(m), Q, P)
        res.checks.append(Check.at_most(f"{name} reverse duality", np.max(np.abs(fwd - bwd)), 1e-6))
    return res


# -- 4, 5, 8. cut loci ----------------------------------------------------------

CORPUS = {
    "circle/E2": (lambda: M.euclidean(2), lambda: S.circle(1.0), 1.0, 1e-3, "abs"),
    "circle/RD": (lambda: M.randers(), lambda: S.circle(1.0), None, None, None),
    "equator/SP": (lambda: M.sphere(), lambda: S.equator_sphere(), np.pi / 2, 1e-3, "abs"),
    "ellipse/E2": (lambda: M.euclidean(2), lambda: S.ellipse(2.0, 1.0), 0.5, 0.01, "rel"),
}


@lru_cache(maxsize=None)
def corpus_case(name, sample_count=500):
    mk, nk, *_ = CORPUS[name]
    m, N = mk(), nk()
    return m, N, inj_radius_submanifold(m, N, sample_count)


def criterion_4(sample_count=500) -> CriterionResult:
    res = CriterionResult(4, "Cut-time positivity and Inj+ anchors")
    for name, (_, _, anchor, tol, kind) in CORPUS.items():
        _, _, rep = corpus_case(name, sample_count)
        res.checks.append(Check.at_least(f"{name} min cut time (eps0) > 0", rep.table.rho.min(), 1e-12))
        if anchor is not None:
            err = abs(rep.value - anchor) / (anchor if kind == "rel" else 1.0)
            res.checks.append(Check.at_most(f"{name} Inj+ = {anchor:.6g}", err, tol))
    return res


def criterion_5(sample_count=500) -> CriterionResult:
    res = CriterionResult(5, "Disjointness and tubular neighbourhood")
    for name in CORPUS:
        m, N, rep = corpus_case(name, sample_count)
        cloud = cut_locus_sample(m, N, table=rep.table)
        res.checks.append(Check.at_least(f"{name} d(N, cut locus) > 0", cloud.d_to_cut_locus, 1e-12))
        res.checks.append(Check.at_most(f"{name} d(N, cut locus) vs Inj+ (rel)", abs(cloud.d_to_cut_locus / rep.value - 1), 0.02))
    for name in ("circle/E2", "ellipse/E2"):
        m, N, rep = corpus_case(name, sample_count)
        ok = tubular_verify(m, N, 0.9 * rep.value, inj_plus=rep.value)
        res.checks.append(Check.at_most(f"{name} collisions at 0.9 Inj+", ok.collision_count, 0))
        res.checks.append(Check.at_most(f"{name} image probes", ok.probe_max_error, 1e-4))
        bad = tubular_verify(m, N, 1.2 * rep.value, inj_plus=rep.value)
        res.checks.append(Check.at_least(f"{name} collisions at 1.2 Inj+", bad.collision_count, 1))
    return res


def criterion_8(sample_count=500) -> CriterionResult:
    res = CriterionResult(8, "Ordering and structure")
    for name in CORPUS:
        m, N, rep = corpus_case(name, sample_count)
        t = rep.table
        fin = t.finite
        scale = max(1.0, N.diameter())
        res.checks.append(Check.at_most(f"{name} rho - focal time", np.max(t.rho[fin] - t.focal[fin]), 1e-4 * scale))
        cloud = cut_locus_sample(m, N, table=t)
        se, mult = separating_set_samples(m, N, t)
        res.checks.append(Check.at_least(f"{name} separating samples found", len(se), 1))
        if len(se):
            res.checks.append(Check.at_least(f"{name} separating multiplicity", mult.min(), 2))
            d, local = distance_to_cloud(se, cloud)
            res.checks.append(Check.at_most(f"{name} Se within 2 tol of cloud (ratio)", np.max(d / (2 * local)), 1.0))
    e2 = M.euclidean(2)
    H = hessian(e2, distance_field(e2, np.zeros(2)), np.array([1.0, 0.0]))
    res.checks.append(Check.at_most("E2 Hess d(0,.) tangential = 1/r", abs(H.matrix[1, 1] - 1.0), 1e-4))
    res.checks.extend(hessian_shape_bridge())
    return res


def hessian_shape_bridge(radius=0.4, angles=(0.3, 1.7, 4.0)):
    """Level-set shape operator from the hessian of ``d(q, .)`` against the submanifold one."""
    out = []
    for name, m, q in (
        ("E2", M.euclidean(2), (0.2, -0.1)),
        ("RD", M.randers(), (0.0, 0.0)),
        ("SP", M.sphere(), (0.1, 0.2)),
        ("HY", M.hyperbolic(), (0.1, 0.0)),
    ):
        q = np.asarray(q, float)
        # the forward sphere of m is the backward sphere of the reverse metric
        Sph = backward_sphere(reverse_metric(m), q, radius)
        f = distance_field(m, q)
        err = 0.0
        for th in angles:
            x = Sph.x(np.array([[th]]))[0]
            A, _ = level_set_shape_from_hessian(m, f, x)
            df = -np.array(Sph.annihilators(np.array([[th]]))[0, 0])
            v = legendre_inverse_array(m, x, df)
            v = v / m.F(x, v)
            n = NormalVector(np.array([th]), TangentVector(x, v), -1.0, -np.ones(1))
            err = max(err, abs(float(A[0, 0]) - float(shape_operator(m, Sph, n)[0, 0])))
        out.append(Check.at_most(f"{name} hessian-shape bridge", err, 1e-4))
    return out


# -- 6. backward spheres --------------------------------------------------------

LEMMA_CASES = (
    ("E2", lambda: M.euclidean(2), (0.3, -0.2), True),
    ("SP", lambda: M.sphere(), (0.2, 0.1), False),
    ("HY", lambda: M.hyperbolic(), (0.1, 0.05), False),
    ("RD", lambda: M.randers(), (0.0, 0.0), False),
)


def criterion_6(radii=(0.1, 0.2, 0.4), sample_count=50) -> CriterionResult:
    res = CriterionResult(6, "Backward-sphere curvature lemma")
    for name, mk, q, equality in LEMMA_CASES:
        m = mk()
        for r in radii:
            rep = backward_sphere_curvature_check(m, q, r, sample_count)
            res.checks.append(Check.at_least(f"{name} r={r:g} min kappa >= ct - 1e-3", rep.min_kappa, rep.ct_value - 1e-3))
            if equality:
                res.checks.append(Check.at_most(f"{name} r={r:g} kappa = ct", np.max(np.abs(rep.kappas - rep.ct_value)), 1e-3))
            res.checks.append(Check.at_most(f"{name} r={r:g} reverse-shape law", rep.reverse_law_error, 1e-6))
            res.checks.append(Check.at_most(f"{name} r={r:g} Jacobi identity", rep.jacobi_error, 1e-4))
    for lam in (1e-6, -1e-6):
        err = max(abs(ct_lambda(lam, r) - 1 / r) for r in np.linspace(0.1, 2, 20))
        res.checks.append(Check.at_most(f"ct branch continuity lambda={lam:+g}", err, 1e-4))
    return res


# -- 7. counterexample ----------------------------------------------------------


def criterion_7(probes=(0.2, 0.1, 0.05)) -> CriterionResult:
    res = CriterionResult(7, "C1 counterexample versus smooth ellipse")
    e2 = M.euclidean(2)
    N = S.x32_curve()
    for t in probes:
        r = singleton_intersection_check(e2, N, (0.0, t))
        res.checks.append(Check.at_least(f"x32 q=(0,{t:g}) multiple feet", len(r.witnesses) if r.verdict == "multiple" else 0, 2))
    st = interior_radius_study(e2, N)
    res.checks.append(Check.at_most("x32 interior radius decreasing (max step ratio)", np.max(st.radii[1:] / st.radii[:-1]), 1.0 - 1e-9))
    res.checks.append(Check.at_most("x32 interior radius -> 0 (last/first)", st.radii[-1] / st.radii[0], 0.25))
    E = S.ellipse(2.0, 1.0)
    for t in probes:
        r = singleton_intersection_check(e2, E, (0.0, -1.0 + t))
        res.checks.append(Check.at_most(f"ellipse probe at depth {t:g} feet", len(r.witnesses) if r.verdict == "unique" else 99, 1))
    return res


CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}

SUITES = {
    "tensors": (1,),
    "geodesics": (2,),
    "distance": (3,),
    "submanifold": (8,),
    "cut": (4, 5),
    "lemma_ct": (6,),
    "counterexample": (7,),
    "all": (1, 2, 3, 4, 5, 6, 7, 8),
}


def run_criterion(k) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[k]()
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(name, echo=None) -> List[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    out = []
    for k in SUITES[name]:
        r = run_criterion(k)
        if echo:
            echo(r.line())
        out.append(r)
    return out
