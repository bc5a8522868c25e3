"""Command-line interface: ``sl2r <command> [options]``.

Every command prints one JSON document (or writes it with ``--out``) that
includes the effective configuration.  Exit codes: 0 success, 1 usage
error, 2 domain or solver error; errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import SL2RError
from .geodesics import distance_from_origin
from .mesh import obj_text, sphere_mesh
from .model import ORIGIN, from_euclidean, from_hyperboloid, normalize, to_hyperboloid
from .packing import SWEEP_COLUMNS, _atomic_write_text, pack, sweep
from .tiling import TilingParams, build_prism, prism_volume, verify_presentation
from .volumes import QuadratureSpec, ball_volume, ball_volume_mc_oracle

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    params: dict
    quadrature: Optional[dict] = None
    out: Optional[str] = None
    format: str = "json"
    seed: int = 0


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _emit(doc, out):
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    if out:
        _atomic_write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _spec(args) -> QuadratureSpec:
    overrides = {}
    for name in ("abs_tol", "rel_tol", "order", "rule"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    return QuadratureSpec.from_env(**overrides)


def _config(args, params, spec=None, fmt="json"):
    return asdict(RunConfig(args.command, params, asdict(spec) if spec else None,
                            getattr(args, "out", None), fmt, getattr(args, "seed", 0)))


# -- commands ----------------------------------------------------------------

def cmd_distance(args):
    cart = [args.x, args.y, args.z]
    hyp = [args.r, args.theta, args.phi]
    if any(v is not None for v in cart) and any(v is not None for v in hyp):
        raise UsageError("give either --x --y --z or --r --theta --phi, not both")
    if all(v is not None for v in cart):
        p = from_euclidean(cart)
        params = {"x": args.x, "y": args.y, "z": args.z}
    elif all(v is not None for v in hyp):
        p = from_hyperboloid(*hyp)
        params = {"r": args.r, "theta": args.theta, "phi": args.phi}
    else:
        raise UsageError("a point needs all of --x --y --z or all of --r --theta --phi")
    res = distance_from_origin(normalize(p), tol=args.tol)
    return {
        "config": _config(args, {**params, "tol": args.tol}),
        "d": res.d,
        "geodesic": {"s": res.params.s, "lam": res.params.lam, "alpha": res.params.alpha},
        "residual": res.residual,
        "candidates": [{"s": s, "alpha": a, "branch": b} for s, a, b in res.branches],
    }


def cmd_ballvol(args):
    spec = _spec(args)
    doc = {"config": _config(args, {"rho": args.rho, "mc": args.mc, "samples": args.samples}, spec)}
    doc["volume"] = ball_volume(args.rho, spec)
    if args.mc:
        mean, se = ball_volume_mc_oracle(args.rho, n_samples=args.samples, seed=args.seed)
        doc["mc"] = {"estimate": mean, "std_error": se,
                     "z_score": (mean - doc["volume"]) / se if se > 0 else 0.0}
    return doc


def cmd_sphere_mesh(args):
    mesh = sphere_mesh(args.rho, args.res)
    summary = {"config": _config(args, {"rho": args.rho, "res": args.res}, fmt="obj"),
               "vertices": len(mesh.vertices), "faces": len(mesh.faces),
               "watertight": mesh.is_watertight()}
    text = obj_text(mesh, comment=f"geodesic sphere rho={args.rho!r} res={args.res}")
    if args.out:
        _atomic_write_text(Path(args.out), text)
        return summary
    sys.stdout.write(text)
    return None


def cmd_prism(args):
    spec = _spec(args)
    d = build_prism(TilingParams(args.p, args.q), n_samples=args.samples)
    screw_image = normalize(ORIGIN @ d.gen_a @ d.gen_b)
    th, r = d.base_curve.samples
    return {
        "config": _config(args, {"p": args.p, "q": args.q, "samples": args.samples}, spec),
        "b": d.b,
        "Phi": d.Phi,
        "vertices": d.vertices,
        "vertex_polar": [[float(h.r), float(h.theta)] for h in map(to_hyperboloid, d.vertices)],
        "H": d.f0_foot,
        "H_polar": list(to_hyperboloid(d.f0_foot)[:2]),
        "screw_image_of_origin": {"point": screw_image,
                                  "hyperboloid": to_hyperboloid(screw_image)._asdict()},
        "curve_samples": {"theta": th, "r": r},
        "volume": prism_volume(d, spec),
        "relations": [asdict(c) for c in verify_presentation(d)],
    }


def cmd_pack(args):
    spec = _spec(args)
    res = pack(TilingParams(args.p, args.q), spec)
    return {"config": _config(args, {"p": args.p, "q": args.q}, spec), **res.row()}


def cmd_sweep(args):
    spec = _spec(args)
    if args.p_min > args.p_max or args.q_min > args.q_max:
        raise UsageError("empty range: min exceeds max")
    table = sweep(range(args.p_min, args.p_max + 1), range(args.q_min, args.q_max + 1),
                  spec, jobs=args.jobs, cache_dir=args.cache_dir)
    best = table.best
    summary = {
        "config": _config(args, {k: getattr(args, k) for k in
                                 ("p_min", "p_max", "q_min", "q_max", "jobs", "cache_dir")},
                          spec, fmt="csv" if args.out else "json"),
        "cells": len(table.results),
        "best": best.row() if best else None,
        "skipped": [{"p": p, "q": q, "reason": why} for p, q, why in table.skipped],
        "errors": [{"p": p, "q": q, "error": e} for p, q, e in table.errors],
    }
    if args.out:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in table.results:
            w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in r.row().items()})
        _atomic_write_text(Path(args.out), buf.getvalue())
    else:
        summary["results"] = [r.row() for r in table.results]
    return summary


# -- parser ------------------------------------------------------------------

def _add_quadrature(p):
    g = p.add_argument_group("quadrature")
    g.add_argument("--abs-tol", type=float, dest="abs_tol")
    g.add_argument("--rel-tol", type=float, dest="rel_tol")
    g.add_argument("--order", type=int)
    g.add_argument("--rule", choices=("gauss-legendre", "adaptive-simpson"))


def build_parser():
    parser = _Parser(prog="sl2r", description="Geodesics, volumes and ball packings in the SL(2,R)~ geometry.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("distance", help="geodesic distance from the origin")
    for name in ("x", "y", "z", "r", "theta", "phi"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("ballvol", help="volume of a geodesic ball")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mc", action="store_true", help="also run the Monte-Carlo oracle")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_quadrature(p)
    p.set_defaults(func=cmd_ballvol)

    p = sub.add_parser("sphere-mesh", help="OBJ mesh of a geodesic sphere")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--res", type=int, default=32)
    p.add_argument("--out", help="OBJ path (stdout if omitted)")
    p.set_defaults(func=cmd_sphere_mesh)

    p = sub.add_parser("prism", help="prism data for the group pq2_1")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, default=65, help="side-curve samples")
    p.add_argument("--out")
    _add_quadrature(p)
    p.set_defaults(func=cmd_prism)

    p = sub.add_parser("pack", help="optimal ball packing for one (p, q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out")
    _add_quadrature(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("sweep", help="packings over a (p, q) range")
    p.add_argument("--p-min", type=int, default=3)
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--q-min", type=int, default=3)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache-dir")
    p.add_argument("--out", help="CSV path; summary JSON goes to stdout")
    _add_quadrature(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        doc = args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (SL2RError, ValueError) as exc:
        return _fail(EXIT_DOMAIN, type(exc).__name__, str(exc))
    if doc is not None:
        if args.command in ("sweep", "sphere-mesh"):
            # --out holds the CSV/OBJ artifact; the summary goes to stdout
            _emit(doc, None)
        else:
            _emit(doc, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
