"""Command line: ``run``, ``verify`` and ``oracle-distance``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import SchemaError, TaskError
from .scenario import execute_task, load

OUT_ENV = "FINSLERCUT_OUT"


def _clean(x):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _dump(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def _write_rows(path, rows):
    keys = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def _write_polyline(path, pts):
    with open(path, "w") as fh:
        for p in np.atleast_2d(pts):
            fh.write(" ".join(repr(float(a)) for a in p) + "\n")


def _output_dir(scn, out):
    if out:
        return Path(out)
    if "output_dir" in scn.doc:
        return Path(scn.doc["output_dir"])
    base = Path(os.environ.get(OUT_ENV, "finslercut_out"))
    return base / scn.name


def run_scenario(path, overrides=None, out=None, workers=1, echo=print):
    """Execute a scenario; returns ``(exit_status, report)``."""
    scn = load(path, overrides)
    out_dir = _output_dir(scn, out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [scn.seed * 1000003 + i for i in range(len(scn.tasks))]
    t0 = time.perf_counter()
    if workers > 1 and len(scn.tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(execute_task, scn.doc, t, s) for t, s in zip(scn.tasks, seeds)]
            results = [f.result() for f in futs]
    else:
        results = [execute_task(scn.doc, t, s) for t, s in zip(scn.tasks, seeds)]
    wall = time.perf_counter() - t0
    summary = []
    files = ["results.csv", "report.json", "manifest.json"]
    for res in results:
        if res.rows:
            _write_rows(out_dir / f"{res.id}.csv", res.rows)
            files.append(f"{res.id}.csv")
        for name, pts in sorted(res.polylines.items()):
            fn = f"{res.id}.{name}.polyline"
            _write_polyline(out_dir / fn, pts)
            files.append(fn)
        for k in sorted(res.values):
            summary.append({"task": res.id, "op": res.op, "quantity": k, "value": res.values[k]})
        if echo:
            echo(f"[{'PASS' if res.passed else 'FAIL'}] {res.id} ({res.op}) " + ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(res.values.items())))
    _write_rows(out_dir / "results.csv", summary)
    passed = all(r.passed for r in results)
    report = {
        "scenario": scn.name,
        "seed": scn.seed,
        "passed": passed,
        "tasks": [
            {"id": r.id, "op": r.op, "passed": r.passed, "values": r.values, "assertions": [asdict(a) for a in r.assertions]}
            for r in results
        ],
    }
    _dump(out_dir / "report.json", report)
    manifest = {
        "scenario": scn.name,
        "scenario_origin": scn.origin,
        "scenario_sha256": scn.digest(),
        "seed": scn.seed,
        "tool_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "workers": workers,
        "wall_time_s": round(wall, 3),
        "tasks": [
            {"id": r.id, "wall_time_s": round(r.seconds, 3), "assertions": [{"quantity": a.quantity, "passed": a.passed, "margin": a.margin} for a in r.assertions]}
            for r in results
        ],
        "files": sorted(files),
    }
    _dump(out_dir / "manifest.json", manifest)
    hook = scn.doc.get("plot_hook")
    if hook:
        import importlib

        mod, _, fn = hook.partition(":")
        getattr(importlib.import_module(mod), fn or "main")(str(out_dir))
    return (0 if passed else 1), report


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _parse_set(items):
    out = {}
    for it in items or []:
        if "=" not in it:
            raise SchemaError(f"--set expects key=value, got {it!r}")
        k, v = it.split("=", 1)
        out[k] = yaml.safe_load(v)
    return out


def _vec(text):
    return np.array([float(a) for a in text.replace(" ", "").strip("()[]").split(",")])


_METRIC_ALIASES = {"E2": "euclidean", "SP": "sphere", "HY": "hyperbolic", "RD": "randers", "MQ": "minkowski"}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="finslercut", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="execute a scenario file (or a bundled scenario name)")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="dotted override, e.g. tasks.rho.params.sample_count=100")
    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite")
    v.add_argument("--out", help="write the JSON report here")
    o = sub.add_parser("oracle-distance", help="grid shortest-path distance between two points")
    o.add_argument("metric", help="euclidean|sphere|hyperbolic|randers|minkowski|zermelo (or E2/SP/HY/RD/MQ)")
    o.add_argument("p")
    o.add_argument("q")
    o.add_argument("--h", type=float)
    args = ap.parse_args(argv)

    if args.cmd == "run":
        try:
            overrides = _parse_set(args.set)
            if args.seed is not None:
                overrides["seed"] = args.seed
            status, _ = run_scenario(args.scenario, overrides, args.out, args.workers)
        except (SchemaError, TaskError) as exc:
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        return status
    if args.cmd == "verify":
        from .verification import SUITES, run_suite

        if args.suite not in SUITES:
            print(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}", file=sys.stderr)
            return 2
        results = run_suite(args.suite, echo=print)
        ok = all(r.passed for r in results)
        report = {"suite": args.suite, "passed": ok, "criteria": [r.to_dict() for r in results]}
        if args.out:
            _dump(args.out, report)
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1
    if args.cmd == "oracle-distance":
        from .distance import grid_oracle_distance
        from .scenario import build_metric

        kind = _METRIC_ALIASES.get(args.metric, args.metric)
        try:
            m = build_metric({"kind": kind})
        except SchemaError as exc:
            print(f"SchemaError: {exc}", file=sys.stderr)
            return 2
        print(repr(grid_oracle_distance(m, _vec(args.p), _vec(args.q), h=args.h)))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
