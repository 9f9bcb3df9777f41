"""Command-line interface.

Exit codes: 0 ok, 2 input error, 3 unsupported geometry, 4 falsification or
contradiction (also: a verify suite with failures), 5 resource budget.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .errors import CuspsyzError, MalformedInputError, ResourceBudgetError
from .geometry import DEFAULT_POINT_BUDGET, CurveSpec, construct_cuspidal
from .io import (
    bounds_csv,
    bounds_table,
    dumps,
    envelope,
    parse_json,
    points_from_json,
    read_bytes,
    text_table,
)
from .rank import analyze_curve
from .resolution import minimal_resolution
from .sequences import M_MODES, enumerate_admissible

DEFAULT_SEED = 0


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(args, *names):
    return {n: getattr(args, n) for n in names}


def cmd_resolve(args):
    data = read_bytes(args.points)
    fld, pts = points_from_json(parse_json(data, args.points))
    betti = minimal_resolution(pts)
    if args.format == "table":
        return text_table(["a", "b", "t", "points", "hilbert"], [betti.to_json()])
    return dumps(envelope("resolve", betti.to_json(), args.seed, {"points": data}))


def _rank_result(rep, curve, construction=None):
    res = rep.to_json()
    res["cusps"] = [q.to_json() for q in rep.cusps]
    res["nodes"] = [q.to_json() for q in rep.nodes]
    res["curve"] = curve.to_json()
    if construction is not None:
        res["construction"] = {"attempts": construction.attempts}
    return res


def cmd_analyze(args):
    if args.construct:
        k, p, seed = args.construct
        con = construct_cuspidal(k, p, seed, max_attempts=args.attempts, budget=args.budget_points)
        rep = analyze_curve(con.curve, args.budget_points, cusps=[c.point for c in con.cusps])
        result = _rank_result(rep, con.curve, con)
        return dumps(envelope("analyze", result, seed, {}, {"construct": [k, p, seed]}))
    if not args.curve:
        raise MalformedInputError("analyze needs a curve file or --construct K P SEED")
    data = read_bytes(args.curve)
    obj = parse_json(data, args.curve)
    if isinstance(obj, dict) and isinstance(obj.get("result"), dict) and "curve" in obj["result"]:
        obj = obj["result"]["curve"]  # output of `construct`
    curve = CurveSpec.from_json(obj)
    rep = analyze_curve(curve, args.budget_points)
    return dumps(envelope("analyze", _rank_result(rep, curve), args.seed, {"curve": data}))


def cmd_construct(args):
    if args.k is None or args.p is None:
        raise MalformedInputError("construct needs --k and --p")
    con = construct_cuspidal(args.k, args.p, args.seed, max_attempts=args.attempts, budget=args.budget_points)
    result = {
        "curve": con.curve.to_json(),
        "cusps": [c.point.to_json() for c in con.cusps],
        "attempts": con.attempts,
    }
    return dumps(envelope("construct", result, args.seed, {}, _params(args, "k", "p")))


def cmd_bounds(args):
    table = bounds_table(args.k_max, args.r_max, args.enumerate_k_max, args.m_mode, args.jobs)
    if args.format == "csv":
        return bounds_csv(table)
    if args.format == "table":
        return text_table(table["columns"], table["rows"])
    params = _params(args, "k_max", "r_max", "enumerate_k_max", "m_mode")
    return dumps(envelope("bounds", table, args.seed, {}, params))


def cmd_search(args):
    if args.k is None or args.r is None:
        raise MalformedInputError("search needs --k and --r")
    params = _params(args, "k", "r", "c_cap", "m_mode", "budget_nodes")
    params["strong"] = not args.all
    try:
        seqs = list(
            enumerate_admissible(
                args.k,
                args.r,
                args.c_cap,
                strong=not args.all,
                reduced=True,
                mode=args.m_mode,
                budget_nodes=args.budget_nodes,
                jobs=args.jobs,
            )
        )
    except ResourceBudgetError as exc:
        partial = [s.to_json() for s in exc.partial or []]
        _emit(dumps(envelope("search", {"partial": True, "sequences": partial}, args.seed, {}, params)), args.out)
        raise
    rows = [s.to_json() for s in seqs]
    if args.format == "table":
        return text_table(["t", "a", "b", "D0", "c"], [dict(r, t=len(r["b"])) for r in rows])
    if args.format == "csv":
        lines = ["t,a,b,D0,c"] + [f"{len(r['b'])},{' '.join(map(str, r['a']))},{' '.join(map(str, r['b']))},{r['D0']},{r['c']}" for r in rows]
        return "\n".join(lines) + "\n"
    result = {"partial": False, "count": len(rows), "sequences": rows}
    return dumps(envelope("search", result, args.seed, {}, params))


def cmd_verify(args):
    from .verify import run_suite

    only = set(args.only.split(",")) if args.only else None
    results = run_suite(only)
    if args.format == "json":
        text = dumps(envelope("verify", {"criteria": [r.to_json() for r in results]}, args.seed, {}, {"suite": args.suite}))
    else:
        text = "".join(r.line() + "\n" for r in results)
    failed = [r for r in results if not r.ok]
    return text, (4 if failed else 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime of the base field")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit seed for every random draw")
    common.add_argument("--k", type=int, help="curve degree is 6k")
    common.add_argument("--r", type=int, help="half of the Mordell-Weil rank")
    common.add_argument("--c-cap", type=int, dest="c_cap", help="upper bound on the cusp count c(a, b)")
    common.add_argument("--format", choices=("json", "csv", "table"), help="default json; table for verify")
    common.add_argument("--budget-nodes", type=int, dest="budget_nodes", default=5_000_000, help="search node budget")
    common.add_argument("--budget-points", type=int, dest="budget_points", default=DEFAULT_POINT_BUDGET, help="max plane points enumerated")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--m-mode", dest="m_mode", choices=M_MODES, default="langer", help="cusp-count bound M(6k)")

    ap = argparse.ArgumentParser(prog="cuspsyz", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"cuspsyz {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("resolve", parents=[common], help="minimal resolution of a point set")
    sp.add_argument("points", help="points JSON file")
    sp.set_defaults(fn=cmd_resolve)

    sp = sub.add_parser("analyze", parents=[common], help="Mordell-Weil rank of y^2 = x^3 + f")
    sp.add_argument("curve", nargs="?", help="curve JSON file")
    sp.add_argument("--construct", nargs=3, type=int, metavar=("K", "P", "SEED"))
    sp.add_argument("--attempts", type=int, default=60)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("construct", parents=[common], help="build f1^3 + f2^2 with rational cusps")
    sp.add_argument("--attempts", type=int, default=60)
    sp.set_defaults(fn=cmd_construct)

    sp = sub.add_parser("bounds", parents=[common], help="table of cusp and rank bounds")
    sp.add_argument("--k-max", type=int, dest="k_max", required=True)
    sp.add_argument("--r-max", type=int, dest="r_max", default=6)
    sp.add_argument("--enumerate-k-max", type=int, dest="enumerate_k_max", default=1)
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("search", parents=[common], help="enumerate admissible sequences")
    sp.add_argument("--all", action="store_true", help="include sequences that are not strongly admissible")
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("verify", parents=[common], help="run the regression suite")
    sp.add_argument("--suite", choices=("paper",), default="paper")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    sp.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.format is None:
        # parent-parser actions are shared, so per-command defaults live here
        args.format = "table" if args.command == "verify" else "json"
    try:
        out = args.fn(args)
    except CuspsyzError as exc:
        sys.stderr.write(f"cuspsyz: error: {exc}\n")
        return exc.exit_code
    code = 0
    if isinstance(out, tuple):
        out, code = out
    _emit(out, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
