"""YAML scenarios: schema, builders and task execution."""

from __future__ import annotations

import copy
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from jsonschema import Draft202012Validator

from . import metric as M
from . import submanifold as S
from .errors import FinslerError, SchemaError, TaskError

# every tolerance a task can override
TOLERANCES = {
    "integration": 1e-11,
    "tol_d": None,  # per metric: 1e-9 closed form, 1e-5 shooting
    "bracket": 1e-8,
    "cluster": 1e-6,
    "kappa": 1e-3,
    "probe": 1e-4,
    "default_abs": 1e-6,
}

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["metric", "tasks"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer"},
        "output_dir": {"type": "string"},
        "plot_hook": {"type": "string"},
        "metric": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["euclidean", "sphere", "hyperbolic", "randers", "minkowski", "zermelo"]},
                "params": {"type": "object"},
            },
        },
        "submanifolds": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["circle", "ellipse", "line", "equator", "x32", "point", "param_table"]},
                    "params": {"type": "object"},
                },
            },
        },
        "tasks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "op"],
                "properties": {
                    "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
                    "op": {"type": "string"},
                    "submanifold": {"type": "string"},
                    "params": {"type": "object"},
                    "tolerances": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {k: {"type": ["number", "null"]} for k in TOLERANCES},
                    },
                    "expect": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["quantity"],
                            "properties": {
                                "quantity": {"type": "string"},
                                "value": _NUM,
                                "tol": _NUM,
                                "rel_tol": _NUM,
                                "min": _NUM,
                                "max": _NUM,
                                "equals": {"type": ["string", "number", "boolean"]},
                            },
                        },
                    },
                },
            },
        },
    },
}


def _path(err):
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = err.message.split("'")[1]
        parts.append(missing)
    elif err.validator == "additionalProperties":
        extra = err.message.split("'")[1] if "'" in err.message else ""
        parts.append(extra)
    return ".".join(parts) or "<root>"


def validate(doc) -> None:
    """Raise :class:`SchemaError` naming the offending field."""
    if not isinstance(doc, dict):
        raise SchemaError("<root>: scenario must be a mapping")
    errors = sorted(Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SchemaError(f"{_path(e)}: {e.message}", field=_path(e))
    names = set(doc.get("submanifolds", {}))
    seen = set()
    for i, t in enumerate(doc["tasks"]):
        if t["op"] not in OPS:
            raise SchemaError(f"tasks.{i}.op: unknown op {t['op']!r}", field=f"tasks.{i}.op")
        if t["id"] in seen:
            raise SchemaError(f"tasks.{i}.id: duplicate id {t['id']!r}", field=f"tasks.{i}.id")
        seen.add(t["id"])
        sub = t.get("submanifold")
        if sub is not None and sub not in names:
            raise SchemaError(f"tasks.{i}.submanifold: undefined {sub!r}", field=f"tasks.{i}.submanifold")


def _set_dotted(doc, key, value):
    parts = key.split(".")
    cur = doc
    for p in parts[:-1]:
        if isinstance(cur, list):
            cur = next(t for t in cur if t.get("id") == p) if not p.isdigit() else cur[int(p)]
        else:
            cur = cur.setdefault(p, {})
    if isinstance(cur, list):
        raise SchemaError(f"{key}: cannot assign into a list")
    cur[parts[-1]] = value


def load(source, overrides: Optional[Dict[str, Any]] = None) -> "Scenario":
    """Scenario from a YAML path, YAML text or mapping; ``overrides`` use dotted keys."""
    if isinstance(source, dict):
        doc = copy.deepcopy(source)
        origin = "<mapping>"
    else:
        p = Path(source)
        if p.exists():
            text = p.read_text()
            origin = str(p)
        elif "\n" in str(source) or ":" in str(source):
            text, origin = str(source), "<text>"
        else:
            bundled = Path(__file__).parent / "scenarios" / f"{source}.yaml"
            if not bundled.exists():
                raise SchemaError(f"<root>: no scenario file {source!r}")
            text, origin = bundled.read_text(), str(bundled)
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaError(f"<root>: unparseable YAML ({exc})") from exc
    for k, v in (overrides or {}).items():
        _set_dotted(doc, k, v)
    validate(doc)
    return Scenario(doc, origin)


@dataclass
class Scenario:
    doc: dict
    origin: str = "<mapping>"

    @property
    def name(self):
        return self.doc.get("name", Path(self.origin).stem if self.origin.startswith("/") else "scenario")

    @property
    def seed(self):
        return int(self.doc.get("seed", 0))

    @property
    def tasks(self):
        return self.doc["tasks"]

    def digest(self):
        return hashlib.sha256(json.dumps(self.doc, sort_keys=True).encode()).hexdigest()

    def metric(self):
        return build_metric(self.doc["metric"])

    def submanifold(self, name):
        return build_submanifold(self.doc["submanifolds"][name])


def build_metric(rec) -> M.MetricSpec:
    kind = rec["kind"]
    params = dict(rec.get("params", {}))
    try:
        if kind == "euclidean":
            return M.euclidean(**params)
        if kind == "sphere":
            return M.sphere(**params)
        if kind == "hyperbolic":
            return M.hyperbolic(**params)
        if kind == "randers":
            return M.randers(**params)
        if kind == "minkowski":
            return M.minkowski_quartic(**params)
        if kind == "zermelo":
            return M.zermelo(**params)
    except TypeError as exc:
        raise SchemaError(f"metric.params: {exc}", field="metric.params") from exc
    raise SchemaError(f"metric.kind: unknown kind {kind!r}", field="metric.kind")


def build_submanifold(rec) -> S.SubmanifoldSpec:
    kind = rec["kind"]
    params = dict(rec.get("params", {}))
    builders = {
        "circle": S.circle,
        "ellipse": S.ellipse,
        "line": S.line,
        "equator": S.equator_sphere,
        "x32": S.x32_curve,
        "point": lambda p: S.point(p),
        "param_table": lambda points: S.param_table(np.asarray(points, float)),
    }
    try:
        return builders[kind](**params)
    except TypeError as exc:
        raise SchemaError(f"submanifolds.params: {exc}", field="submanifolds.params") from exc


# -- task results -------------------------------------------------------------


@dataclass
class Assertion:
    quantity: str
    measured: Any
    expected: Any
    tolerance: Any
    margin: Optional[float]
    passed: bool


@dataclass
class TaskResult:
    id: str
    op: str
    values: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    polylines: Dict[str, np.ndarray] = field(default_factory=dict)
    assertions: List[Assertion] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(a.passed for a in self.assertions)


def _assert(spec, values) -> Assertion:
    q = spec["quantity"]
    if q not in values:
        return Assertion(q, None, spec, None, None, False)
    got = values[q]
    if "equals" in spec:
        return Assertion(q, got, spec["equals"], None, None, got == spec["equals"])
    x = float(got)
    if "value" in spec:
        want = float(spec["value"])
        if "rel_tol" in spec:
            tol = float(spec["rel_tol"]) * abs(want)
        else:
            tol = float(spec.get("tol", TOLERANCES["default_abs"]))
        margin = tol - abs(x - want)
        return Assertion(q, x, want, tol, margin, margin >= 0)
    lo = spec.get("min", -np.inf)
    hi = spec.get("max", np.inf)
    margin = min(x - lo, hi - x)
    return Assertion(q, x, {"min": lo, "max": hi}, 0.0, float(margin), bool(lo <= x <= hi))


def _tol(task, key):
    t = dict(TOLERANCES)
    t.update(task.get("tolerances", {}))
    return t[key]


def execute_task(scn_doc, task, seed) -> TaskResult:
    scn = Scenario(scn_doc)
    t0 = time.perf_counter()
    try:
        values, rows, lines = OPS[task["op"]](scn, task, np.random.default_rng(seed))
    except FinslerError as exc:
        raise TaskError(f"task {task['id']!r} ({task['op']}): {type(exc).__name__}: {exc}", task=task["id"]) from exc
    res = TaskResult(task["id"], task["op"], values, rows, lines)
    res.assertions = [_assert(e, values) for e in task.get("expect", [])]
    res.seconds = time.perf_counter() - t0
    return res


# -- ops ----------------------------------------------------------------------


def _sub(scn, task):
    name = task.get("submanifold")
    if name is None:
        raise TaskError(f"task {task['id']!r} needs a submanifold", task=task["id"])
    return scn.submanifold(name)


def _cut_kw(task):
    return {"tol": _tol(task, "integration"), "tol_d": _tol(task, "tol_d"), "bracket": _tol(task, "bracket")}


def _table_rows(t):
    rows = []
    for i in range(len(t)):
        r = {"sample": i}
        r.update({f"u{a}": float(v) for a, v in enumerate(t.U[i])})
        r.update({f"w{a}": float(v) for a, v in enumerate(t.W[i])})
        r["rho"] = float(t.rho[i])
        r["focal"] = float(t.focal[i])
        r["reason"] = str(t.reason[i])
        cp = t.cut_points[i]
        r.update({f"c{a}": float(v) for a, v in enumerate(cp)})
        rows.append(r)
    return rows


def op_cut_times(scn, task, rng):
    from .cut import inj_radius_submanifold

    m, N = scn.metric(), _sub(scn, task)
    p = task.get("params", {})
    rep = inj_radius_submanifold(m, N, int(p.get("sample_count", 500)), refine=bool(p.get("refine", True)), **_cut_kw(task))
    t = rep.table
    fin = t.finite
    values = {
        "inj_radius": rep.value,
        "min_rho": float(t.rho.min()),
        "finite_samples": int(fin.sum()),
        "positive": bool(rep.positive),
        "local_uniform": bool(rep.local_uniform),
        "max_rho_minus_focal": float(np.max(t.rho[fin] - t.focal[fin])) if fin.any() else float("-inf"),
    }
    lines = {"cut_points": t.cut_points[fin], "submanifold": N.x(N.sample_params(256))}
    return values, _table_rows(t), lines


def op_cut_locus(scn, task, rng):
    from .cut import cut_locus_sample, inj_radius_submanifold, separating_set_samples

    m, N = scn.metric(), _sub(scn, task)
    p = task.get("params", {})
    rep = inj_radius_submanifold(m, N, int(p.get("sample_count", 500)), **_cut_kw(task))
    cloud = cut_locus_sample(m, N, table=rep.table)
    values = {
        "inj_radius": rep.value,
        "d_to_cut_locus": cloud.d_to_cut_locus,
        "disjoint": cloud.disjoint,
        "cloud_size": int(len(cloud.points)),
    }
    rows = [{"sample": int(i), "x0": float(c[0]), "x1": float(c[1]), "d_N": float(d)} for i, c, d in zip(cloud.rows, cloud.points, cloud.distances)]
    lines = {"cut_locus": cloud.points, "submanifold": N.x(N.sample_params(256))}
    if p.get("separating", False):
        se, mult = separating_set_samples(m, N, rep.table)
        values["separating_samples"] = int(len(se))
        lines["separating"] = se
    return values, rows, lines


def op_tubular(scn, task, rng):
    from .cut import inj_radius_submanifold, tubular_verify

    m, N = scn.metric(), _sub(scn, task)
    p = task.get("params", {})
    inj = None
    if "epsilon" in p:
        eps = float(p["epsilon"])
    else:
        inj = inj_radius_submanifold(m, N, int(p.get("sample_count", 200)), **_cut_kw(task)).value
        eps = float(p.get("epsilon_factor", 0.9)) * inj
    rep = tubular_verify(m, N, eps, probe_count=int(p.get("probe_count", 400)), inj_plus=inj, seed=int(rng.integers(2**31)))
    values = {
        "epsilon": eps,
        "collisions": rep.collision_count,
        "probe_max_error": rep.probe_max_error,
        "probes_checked": rep.probes_checked,
        "min_pair_separation": rep.min_pairwise_image_separation,
    }
    rows = [{"collision": i, "u_a": a[0], "w_a": a[1], "t_a": a[2], "u_b": b[0], "w_b": b[1], "t_b": b[2]} for i, (a, b, _) in enumerate(rep.collisions)]
    lines = {"collisions": np.array([c[2] for c in rep.collisions]).reshape(-1, m.dim)}
    return values, rows, lines


def op_distance(scn, task, rng):
    from .distance import distance_point

    m = scn.metric()
    p = task["params"]
    r = distance_point(m, p["p"], p["q"], method=p.get("method"))
    values = {"distance": r.value, "multiplicity": int(r.multiplicity), "method": r.method}
    return values, [{"distance": r.value, "multiplicity": int(r.multiplicity)}], {}


def op_oracle_distance(scn, task, rng):
    from .distance import grid_oracle_distance

    m = scn.metric()
    p = task["params"]
    d = grid_oracle_distance(m, p["p"], p["q"], h=p.get("h"))
    return {"distance": d}, [{"distance": d}], {}


def op_distance_to_submanifold(scn, task, rng):
    from .distance import distance_to_submanifold

    m, N = scn.metric(), _sub(scn, task)
    r = distance_to_submanifold(m, N, task["params"]["q"])
    values = {"distance": r.value, "multiplicity": int(r.multiplicity), "degenerate": bool(r.degenerate)}
    return values, [values], {}


def op_singleton(scn, task, rng):
    from .cut import singleton_intersection_check

    m, N = scn.metric(), _sub(scn, task)
    r = singleton_intersection_check(m, N, task["params"]["q"])
    values = {"verdict": r.verdict, "multiplicity": int(len(r.witnesses)), "distance": r.value}
    rows = [{"witness": i, "x0": float(w[0]), "x1": float(w[1])} for i, w in enumerate(r.witnesses)]
    return values, rows, {"witnesses": r.witnesses}


def op_interior_radius(scn, task, rng):
    from .cut import interior_radius_study

    m, N = scn.metric(), _sub(scn, task)
    p = task.get("params", {})
    st = interior_radius_study(m, N, u0=float(p.get("u0", 0.0)), levels=int(p.get("levels", 4)))
    values = {"monotone": st.monotone, "last_radius": float(st.radii[-1]), "first_radius": float(st.radii[0])}
    rows = [{"level": k, "step": float(h), "tol_d": float(t), "radius": float(r)} for k, (h, t, r) in enumerate(zip(st.steps, st.tolerances, st.radii))]
    return values, rows, {}


def op_sphere_curvature(scn, task, rng):
    from .sphere import backward_sphere_curvature_check

    m = scn.metric()
    p = task["params"]
    rep = backward_sphere_curvature_check(m, p["q"], float(p["r"]), int(p.get("sample_count", 50)), tol=_tol(task, "kappa"))
    values = {
        "lambda_est": rep.lambda_est,
        "ct_value": rep.ct_value,
        "min_kappa": rep.min_kappa,
        "margin": rep.margin,
        "passed": rep.passed,
        "reverse_law_error": rep.reverse_law_error,
        "jacobi_error": rep.jacobi_error,
    }
    rows = [{"sample": i, "kappa": float(k)} for i, k in enumerate(rep.kappas)]
    return values, rows, {}


def op_geodesic(scn, task, rng):
    from .geodesic import integrate_geodesic

    m = scn.metric()
    p = task["params"]
    rec = integrate_geodesic(m, M.TangentVector(np.asarray(p["p"], float), np.asarray(p["v"], float)), float(p["t_end"]), _tol(task, "integration"))
    sp = rec.speeds(m)
    values = {"end_time": rec.end_time, "terminated_by": rec.terminated_by, "speed_drift": float(np.max(np.abs(sp - sp[0])))}
    rows = [{"t": float(t), "x0": float(x[0]), "x1": float(x[1])} for t, x in zip(rec.times, rec.points)]
    return values, rows, {"geodesic": rec.points}


OPS = {
    "cut_times": op_cut_times,
    "inj_radius": op_cut_times,
    "cut_locus": op_cut_locus,
    "tubular_verify": op_tubular,
    "distance": op_distance,
    "oracle_distance": op_oracle_distance,
    "distance_to_submanifold": op_distance_to_submanifold,
    "singleton": op_singleton,
    "interior_radius": op_interior_radius,
    "sphere_curvature": op_sphere_curvature,
    "geodesic": op_geodesic,
}
