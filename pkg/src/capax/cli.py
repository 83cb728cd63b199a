"""Command-line interface: domain spec files, capacity records and figure data.

Domain specs are JSON documents
``{"kind": ..., "dimension": n, "params": {...}, "perturbations": [...]}``.
Output is canonical: sorted keys, floats rounded to 12 significant digits,
so identical inputs give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bumps import PerturbationSpec
from .domains import (
    Box, Circle, CurveDomain, CurveProfile, Domain, GraphDomain, LpBall, PEllipse, Perturbed,
    PolytopeDomain, Simplex, curve_from_dict, profile_from_dict, validate,
)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3
SIG_DIGITS = 12


class SpecError(ValueError):
    pass


class VerificationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _round(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def canonical(obj):
    """Recursively round floats and turn tuples and arrays into lists."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite number {x} in output")
        return _round(x)
    return obj


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def _reject_constant(name):
    raise SpecError(f"non-finite number {name} in spec")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None


# ---------------------------------------------------------------------------
# domain specs
# ---------------------------------------------------------------------------

_TOP_FIELDS = {"kind", "dimension", "params", "perturbations"}
_PARAMS = {
    "simplex": {"a"},
    "box": {"a"},
    "lpball": {"p"},
    "pellipse": {"p", "a"},
    "polytope": {"vertices", "mode"},
}
_PROFILE_FIELDS = {
    "circle": set(), "pellipse": {"p", "a"}, "lpball2": {"p"}, "arc": {"lam", "slope0"},
    "polyline": {"points"}, "curve": {"curve"},
}
_CURVE_FIELDS = {"alpha": set(), "gamma_eps": {"eps"}, "or_curve": {"p"}}


def _only(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise SpecError(f"{where} must be an object")
    extra = set(d) - allowed
    if extra:
        raise SpecError(f"unknown fields in {where}: {sorted(extra)}")


def _require(d: dict, keys, where: str):
    missing = [k for k in keys if k not in d]
    if missing:
        raise SpecError(f"missing fields in {where}: {missing}")


def _check_finite(obj, where="spec"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_finite(v, f"{where}[{i}]")
    elif isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return
    elif isinstance(obj, (int, float)):
        if not math.isfinite(obj):
            raise SpecError(f"{where} is not finite")
    else:
        raise SpecError(f"{where} has unsupported type {type(obj).__name__}")


def _curve(d: dict):
    _only(d, {"curve"} | _CURVE_FIELDS.get(d.get("curve"), set()), "curve")
    if d.get("curve") not in _CURVE_FIELDS:
        raise SpecError(f"unknown curve {d.get('curve')!r}")
    _require(d, _CURVE_FIELDS[d["curve"]], "curve")
    return curve_from_dict(d)


def _profile(d: dict):
    kind = d.get("profile")
    if kind not in _PROFILE_FIELDS:
        raise SpecError(f"unknown profile {kind!r}")
    _only(d, {"profile"} | _PROFILE_FIELDS[kind], f"profile {kind}")
    _require(d, _PROFILE_FIELDS[kind] - {"a"}, f"profile {kind}")
    if kind == "curve":
        return CurveProfile(_curve(d["curve"]))
    return profile_from_dict(d)


def parse_spec(doc: dict) -> Domain:
    """One domain from a spec document; raises SpecError on any problem."""
    _only(doc, _TOP_FIELDS, "spec")
    _require(doc, ["kind"], "spec")
    _check_finite(doc)
    kind = doc["kind"]
    params = doc.get("params", {})
    perts = doc.get("perturbations", [])
    if not isinstance(perts, list):
        raise SpecError("perturbations must be a list")
    if perts and kind != "graph":
        raise SpecError("perturbations apply to graph specs only")
    try:
        if kind in _PARAMS:
            _only(params, _PARAMS[kind], f"{kind} params")
        if kind == "simplex":
            _require(params, ["a"], "simplex params")
            dom = Simplex(tuple(params["a"]))
        elif kind == "box":
            _require(params, ["a"], "box params")
            dom = Box(tuple(params["a"]))
        elif kind == "lpball":
            _require(params, ["p"], "lpball params")
            if "dimension" not in doc:
                raise SpecError("lpball needs a dimension")
            dom = LpBall(int(doc["dimension"]), float(params["p"]))
        elif kind == "pellipse":
            _require(params, ["p"], "pellipse params")
            dom = GraphDomain(PEllipse(float(params["p"]), float(params.get("a", 1.0))))
        elif kind == "polytope":
            _require(params, ["vertices"], "polytope params")
            dom = PolytopeDomain(params["vertices"], params.get("mode", "convex"))
        elif kind == "graph":
            prof = _profile(params)
            if perts:
                specs = [PerturbationSpec.from_dict(p) for p in perts]
                prof = Perturbed(prof, specs)
            dom = GraphDomain(prof)
            if perts and not validate(dom).ok:
                raise SpecError("perturbed profile leaves its curvature class")
        elif kind == "curve":
            dom = CurveDomain(_curve(params))
        else:
            raise SpecError(f"unknown kind {kind!r}")
    except SpecError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise SpecError(str(exc)) from None
    dim = doc.get("dimension")
    if dim is not None and (not isinstance(dim, int) or dim != dom.dimension):
        raise SpecError(f"dimension {dim} does not match the domain's {dom.dimension}")
    return dom


def spec_of(dom: Domain) -> dict:
    """The canonical spec document of a domain."""
    n = dom.dimension
    if isinstance(dom, Simplex):
        return {"kind": "simplex", "dimension": n, "params": {"a": [float(t) for t in dom.a]}, "perturbations": []}
    if isinstance(dom, Box):
        return {"kind": "box", "dimension": n, "params": {"a": [float(t) for t in dom.a]}, "perturbations": []}
    if isinstance(dom, LpBall):
        return {"kind": "lpball", "dimension": n, "params": {"p": float(dom.p)}, "perturbations": []}
    if isinstance(dom, PolytopeDomain):
        return {"kind": "polytope", "dimension": n,
                "params": {"vertices": dom.vertices.tolist(), "mode": dom.mode}, "perturbations": []}
    if isinstance(dom, CurveDomain):
        return {"kind": "curve", "dimension": 2, "params": dom.curve.to_dict(), "perturbations": []}
    if isinstance(dom, GraphDomain):
        prof = dom.profile
        if isinstance(prof, PEllipse):
            return {"kind": "pellipse", "dimension": 2,
                    "params": {"p": float(prof.p), "a": float(prof.a)}, "perturbations": []}
        perts = []
        if isinstance(prof, Perturbed):
            perts = [p.to_dict() for p in prof.perturbations]
            prof = prof.base
        return {"kind": "graph", "dimension": 2, "params": prof.to_dict(), "perturbations": perts}
    raise SpecError(f"no spec form for {dom!r}")


def spec_hash(doc: dict) -> str:
    return hashlib.sha256(dumps(doc).encode()).hexdigest()[:16]


def load_spec(path: str) -> tuple:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    doc = loads(text)
    return doc, parse_spec(doc)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def parse_k_range(text: str) -> list:
    """'7', '1..10' or '1,3,5'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            ks = list(range(int(a), int(b) + 1))
        else:
            ks = [int(t) for t in text.split(",")]
    except ValueError:
        raise SpecError(f"bad k range {text!r}") from None
    if not ks or min(ks) < 1:
        raise SpecError(f"k range {text!r} must contain positive integers")
    return ks


def parse_p_range(text: str) -> list:
    """'start:stop:step' inclusive of stop, or a single value."""
    try:
        parts = [float(t) for t in text.split(":")]
    except ValueError:
        raise SpecError(f"bad p range {text!r}") from None
    if len(parts) == 1:
        return parts
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise SpecError(f"p range must be start:stop:step, got {text!r}")
    n = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9))
    return [round(parts[0] + i * parts[2], 10) for i in range(n + 1)]


def threads() -> int:
    raw = os.environ.get("CAPAX_THREADS")
    if raw is None:
        return max(1, min(8, os.cpu_count() or 1))
    try:
        return max(1, int(raw))
    except ValueError:
        raise SpecError(f"CAPAX_THREADS must be an integer, got {raw!r}") from None


def fan_out(fn, items) -> list:
    """fn over items with at most CAPAX_THREADS workers; results in input order."""
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list, header: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.{SIG_DIGITS}g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _vec(v) -> str:
    return " ".join(f"{float(x):.{SIG_DIGITS}g}" if isinstance(x, float) else str(x) for x in v)


def _record(command: str, doc: dict, ks: list, **fields) -> dict:
    rec = {"version": __version__, "command": command, "spec_hash": spec_hash(doc), "k": ks}
    rec.update(fields)
    return rec


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _engine(dom: Domain, name: str):
    from . import ghcap

    if name == "general":
        return lambda k: ghcap.gh_general(dom, k)
    if name == "symmetric":
        return lambda k: ghcap.gh_symmetric(dom, k)
    if name == "graph":
        if not isinstance(dom, (GraphDomain, CurveDomain)):
            raise SpecError("the graph engine needs a graph or curve spec")
        if dom.symmetric:
            return lambda k: ghcap.gh_graph_symmetric(dom, k)
        if isinstance(dom, GraphDomain) and dom.convex:
            return lambda k: ghcap.gh_graph_convex(dom, k)
        raise SpecError("the graph engine needs a symmetric or convex graph")
    if name == "closed-form":
        if isinstance(dom, LpBall):
            return lambda k: ghcap.gh_lp_ball(dom.n, dom.p, k)
        if isinstance(dom, GraphDomain) and isinstance(dom.profile, PEllipse) and dom.profile.a >= 1 \
                and dom.profile.p >= 1:
            return lambda k: ghcap.gh_pellipsoid(dom.profile.p, dom.profile.a, k)
        if isinstance(dom, PolytopeDomain) and dom.convex and dom.symmetric:
            return lambda k: ghcap.gh_polytope(dom, k)
        raise SpecError("no closed form for this spec")
    if name == "auto":
        for cand in ("closed-form", "graph"):
            try:
                return _engine(dom, cand)
            except SpecError:
                pass
        if dom.symmetric and (dom.convex or dom.concave):
            return _engine(dom, "symmetric")
        return _engine(dom, "general")
    raise SpecError(f"unknown engine {name!r}")


def cmd_capacity(args) -> int:
    from .ghcap import CapacityError
    from .oracle import OracleError, brute_gh

    doc, dom = load_spec(args.spec)
    ks = parse_k_range(args.k)
    run = _engine(dom, args.engine)
    try:
        recs = fan_out(run, ks)
    except CapacityError as exc:
        raise SpecError(str(exc)) from None
    values = [r.value for r in recs]
    fields = {
        "engine": args.engine if args.engine != "auto" else recs[0].engine,
        "values": values,
        "carriers": [{"vector": list(r.carrier_vector), "point": list(r.carrier_point)} for r in recs],
        "tolerances": {"verify": args.tol},
    }
    status = EXIT_OK
    if args.verify:
        try:
            oracle = fan_out(lambda k: brute_gh(dom, k), ks)
        except OracleError as exc:
            raise SpecError(f"oracle not applicable: {exc}") from None
        diffs = [abs(a - o.value) for a, o in zip(values, oracle)]
        fields.update(oracle="brute_gh", oracle_values=[o.value for o in oracle], oracle_diff=diffs,
                      max_oracle_diff=max(diffs))
        if max(diffs) > args.tol:
            status = EXIT_VERIFY
    if args.format == "csv":
        rows = [(k, r.value, _vec(r.carrier_vector), _vec(r.carrier_point)) for k, r in zip(ks, recs)]
        header = ["k", "c_k", "carrier_vector", "carrier_point"]
        if args.verify:
            rows = [row + (o,) for row, o in zip(rows, fields["oracle_values"])]
            header.append("oracle")
        _emit(_csv(rows, header), args.out)
    else:
        _emit(dumps(_record("capacity", doc, ks, **fields)), args.out)
    if status == EXIT_VERIFY:
        print(f"engine and oracle disagree by {fields['max_oracle_diff']:.3g} > {args.tol:g}", file=sys.stderr)
    return status


def cmd_ech(args) -> int:
    from .echcap import ech_capacity_detail, weight_expansion

    doc, dom = load_spec(args.spec)
    ks = parse_k_range(args.k)
    try:
        exp = weight_expansion(dom, max(max(ks), args.weights or 0))
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    details = [ech_capacity_detail(dom, k, exp) for k in ks]
    fields = {
        "values": [d[0] for d in details],
        "d_vectors": [list(d[1]) for d in details],
    }
    if args.weights:
        fields["weights"] = [{"tau": t, "label": lab} for t, lab in exp.weights[:args.weights]]
    if args.format == "csv":
        rows = [(k, d[0], _vec(d[1])) for k, d in zip(ks, details)]
        _emit(_csv(rows, ["k", "c_k_ech", "d_vector"]), args.out)
    else:
        _emit(dumps(_record("ech", doc, ks, **fields)), args.out)
    return EXIT_OK


def _family_domains(args):
    from . import families as fam

    if args.name == "novolume":
        before = fam.novolume_base()
        return before, fam.family_novolume(before, args.j, args.delta), {"j": args.j, "delta": args.delta}
    if args.name == "mutual":
        before = fam.mutual_base(args.j)
        return before, fam.family_mutual(before, args.j, args.delta), {"j": args.j, "delta": args.delta}
    before, after = fam.family_blind(args.eps, args.delta)
    return CurveDomain(before.profile.curve), after, {"eps": args.eps, "delta": args.delta}


def cmd_family(args) -> int:
    from .families import FamilyError, verify_family

    if args.j is None:
        args.j = 3 if args.name == "novolume" else 2
    try:
        before, after, params = _family_domains(args)
        rep = verify_family(args.name, args.k_max, **params)
    except FamilyError as exc:
        raise SpecError(str(exc)) from None
    rep.tol, rep.ech_tol = args.tol, args.ech_tol
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.name}_before.json").write_text(dumps(spec_of(before)))
    (out / f"{args.name}_after.json").write_text(dumps(spec_of(after)))
    report = dict(rep.to_dict(), version=__version__)
    (out / f"{args.name}_report.json").write_text(dumps(report))
    if args.report:
        sys.stdout.write(dumps(report))
    else:
        state = "ok" if rep.ok else "FAILED"
        print(f"{args.name}: {state}; capacity residual {rep.capacity_residual:.3g}, "
              f"area residual {rep.area_residual:.3g}"
              + (f", ECH_9 residual {rep.ech_residual:.3g}" if rep.ech9 else "")
              + f"; files in {out}")
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _profile_arg(args):
    if args.spec:
        _, dom = load_spec(args.spec)
        if not isinstance(dom, (GraphDomain, CurveDomain)):
            raise SpecError("figure needs a planar graph or curve spec")
        return dom
    if args.profile == "circle":
        return GraphDomain(Circle())
    if args.profile.startswith("pellipse:"):
        try:
            return GraphDomain(PEllipse(float(args.profile.split(":", 1)[1])))
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    raise SpecError(f"unknown profile {args.profile!r}; use circle, pellipse:P or --spec")


def cmd_figure(args) -> int:
    from .ghcap import gh_graph_symmetric, gh_pellipsoid

    if args.name == "e2p":
        ps = parse_p_range(args.p)
        if min(ps) < 1:
            raise SpecError("p must be at least 1")
        vals = fan_out(lambda p: gh_pellipsoid(p, args.a, args.k).value, ps)
        _emit(_csv(list(zip(ps, vals)), ["p", f"c_{args.k}"]), args.out)
        return EXIT_OK
    dom = _profile_arg(args)
    if args.name == "ribcage":
        rows = []
        for k in range(1, args.k_max + 1, 2):
            x, y = gh_graph_symmetric(dom, k).carrier_point
            rows.append((k, float(x), float(y), "red"))
        xs = dom.fixed_point()
        rows.append(("even", float(xs), float(xs), "purple"))
        _emit(_csv(rows, ["k", "x_k", "f_x_k", "color"]), args.out)
        return EXIT_OK
    from .families import FamilyError, ivr_graph_bounds

    try:
        b = ivr_graph_bounds(dom, k_last=args.k_last, k_check=args.k_check)
    except FamilyError as exc:
        raise SpecError(str(exc)) from None
    if args.vertices:
        rows = [("lower", float(x), float(y)) for x, y in b.lower.vertices.tolist()]
        rows += [("upper", float(x), float(y)) for x, y in b.upper.vertices.tolist()]
        _emit(_csv(rows, ["polygon", "x", "y"]), args.out)
    else:
        rows = [("ratio", b.ratio), ("error", b.error), ("area_lower", b.lower.area()),
                ("area_upper", b.upper.area()), ("k_last", b.k_last),
                ("capacity_residual", b.capacity_residual)]
        _emit(_csv(rows, ["quantity", "value"]), args.out)
    return EXIT_OK


def cmd_verify_all(args) -> int:
    from . import acceptance

    overrides = {}
    for item in args.tolerance or []:
        name, _, val = item.partition("=")
        if name not in acceptance.TOLERANCES:
            raise SpecError(f"unknown tolerance {name!r}; known: {sorted(acceptance.TOLERANCES)}")
        try:
            overrides[name] = float(val)
        except ValueError:
            raise SpecError(f"bad tolerance value {val!r}") from None
    crits = acceptance.select(args.filter)
    if not crits:
        raise SpecError(f"no criterion matches {args.filter!r}")
    results = acceptance.run_all(args.filter, overrides, echo=lambda r: print(r.line(), flush=True))
    print()
    print(acceptance.table(results))
    if args.json:
        tol = dict(acceptance.TOLERANCES, **overrides)
        Path(args.json).write_text(dumps({
            "version": __version__, "tolerances": tol,
            "results": [r.to_dict() for r in results],
        }))
    passed = sum(r.passed for r in results)
    print(f"\n{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capax", description="Gutt-Hutchings and ECH capacities of toric domains.")
    ap.add_argument("--version", action="version", version=f"capax {__version__}")
    ap.add_argument("--timing", action="store_true", help="report wall time on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="Gutt-Hutchings capacities of a domain spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--k", default="1..10", help="k range: 7, 1..10 or 1,3,5")
    p.add_argument("--engine", default="auto", choices=["auto", "general", "symmetric", "graph", "closed-form"])
    p.add_argument("--verify", action="store_true", help="compare against the brute-force oracle")
    p.add_argument("--tol", type=float, default=1e-6, help="engine/oracle tolerance")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("ech", help="ECH capacities of a concave planar spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--k", default="1..10")
    p.add_argument("--weights", type=int, default=0, help="also list the m largest weights")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ech)

    p = sub.add_parser("family", help="build and verify a counterexample family")
    p.add_argument("name", choices=["novolume", "mutual", "blind"])
    p.add_argument("--j", type=int, help="capacity index (novolume: 3, mutual: 2)")
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--k-max", type=int, default=30)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--ech-tol", type=float, default=1e-5)
    p.add_argument("--out", default=".")
    p.add_argument("--report", action="store_true", help="print the full report")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("figure", help="CSV data for a figure")
    p.add_argument("name", choices=["e2p", "ribcage", "ivr"])
    p.add_argument("--a", type=float, default=math.e)
    p.add_argument("--k", type=int, default=123)
    p.add_argument("--p", default="1:8:0.05")
    p.add_argument("--k-max", type=int, default=21)
    p.add_argument("--profile", default="circle")
    p.add_argument("--spec")
    p.add_argument("--k-last", type=int, default=4001)
    p.add_argument("--k-check", type=int, default=25)
    p.add_argument("--vertices", action="store_true", help="ivr: emit polygon vertices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--filter", help="comma-separated criterion numbers or tags")
    p.add_argument("--tolerance", action="append", metavar="NAME=VALUE")
    p.add_argument("--json", help="write results here")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except SpecError as exc:
        print(f"capax: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    if args.timing:
        print(f"wall_time {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
