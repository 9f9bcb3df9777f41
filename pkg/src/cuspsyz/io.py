"""Serialisation: points and curve files, output envelopes, bounds tables.

Outputs are canonical: fixed key order, no timestamps, ``\\n`` line ends,
so identical inputs and seeds give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import MalformedInputError
from .exact import Field, QuadSurd
from .poly import ProjPoint, check_distinct
from .sequences import (
    cusp_bound,
    enumerated_min_cusps,
    g_bound,
    limit_slope,
    min_cusps_formula,
)

TOOL = "cuspsyz"


def read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None


def parse_json(data: bytes, name: str = "input"):
    try:
        return json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"{name} is not valid JSON: {exc}") from None


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), indent=2, ensure_ascii=True) + "\n"


def to_plain(x):
    """Recursively convert exact values into JSON-friendly ones."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, QuadSurd):
        return surd_json(x)
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if hasattr(x, "to_json"):
        return to_plain(x.to_json())
    raise TypeError(f"cannot serialise {type(x).__name__}")


def surd_json(x: QuadSurd):
    """[u, v, floor] for u + v sqrt(d); the radicand is added when it is not 73."""
    u, v, fl = x.to_triple()
    out = [u, v, fl]
    if x.v and x.d != 73:
        out.append(x.d)
    return out


# points -------------------------------------------------------------------


def points_from_json(obj):
    if not isinstance(obj, dict) or "points" not in obj or "field" not in obj:
        raise MalformedInputError('points JSON needs "field" and "points"')
    fld = Field.from_json(obj["field"])
    raw = obj["points"]
    if not isinstance(raw, list):
        raise MalformedInputError('"points" must be a list')
    pts = []
    for q in raw:
        if not isinstance(q, list) or len(q) != 3:
            raise MalformedInputError(f"bad point {q!r}")
        pts.append(ProjPoint(fld, [fld.element_from_json(x) for x in q]))
    check_distinct(pts)
    return fld, pts


def points_to_json(fld: Field, points):
    return {"field": fld.to_json(), "points": [q.to_json() for q in sorted(points)]}


# envelopes ----------------------------------------------------------------


def envelope(command: str, result, seed=None, inputs=None, params=None):
    """Wrap a result with tool version, seed, parameters and input digests."""
    out = {"tool": TOOL, "version": __version__, "command": command, "seed": seed}
    out["inputs"] = {name: digest(data) for name, data in sorted((inputs or {}).items())}
    out["params"] = params or {}
    out["result"] = result
    return out


# bounds table ---------------------------------------------------------------

BOUNDS_COLUMNS = (
    "k",
    "r",
    "formula_lower_bound",
    "formula_exact",
    "enumerated_min",
    "g_half_rank_floor",
    "g_rank_floor",
    "M_used",
)
HALF_SLOPE_WINDOW = (Fraction(26, 10), Fraction(28, 10))
RANK_SLOPE_WINDOW = (Fraction(52, 10), Fraction(55, 10))


def _decimal(x: Fraction, places: int = 4) -> str:
    """Display-only rounding (toward -inf) of an exact rational."""
    q = 10**places
    n = (x.numerator * q) // x.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // q}.{n % q:0{places}d}"


def _surd_decimal(x: QuadSurd, places: int = 4) -> str:
    q = 10**places
    return _decimal(Fraction((x * q).floor(), q), places)


def bounds_table(k_max: int, r_max: int = 6, enumerate_k_max: int = 1, mode: str = "langer", jobs: int = 1):
    if not 1 <= k_max <= 1000:
        raise MalformedInputError("k_max must lie in [1, 1000]")
    rows = []
    for k in range(1, k_max + 1):
        g = g_bound(k)
        M = cusp_bound(6 * k, mode)
        for r in range(1, r_max + 1):
            f = min_cusps_formula(k, r)
            en = None
            if k <= enumerate_k_max:
                en = enumerated_min_cusps(k, r, mode=mode, jobs=jobs)
            rows.append(
                {
                    "k": k,
                    "r": r,
                    "formula_lower_bound": None if f is None else f.ceil(),
                    "formula_exact": None if f is None else surd_json(f),
                    "enumerated_min": en,
                    "g_half_rank_floor": g.half_rank_floor,
                    "g_rank_floor": g.rank_floor,
                    "M_used": M,
                }
            )
    g = g_bound(k_max)
    hs, rs = g.half_rank_slope, g.rank_slope
    lim_h, lim_r = limit_slope()
    summary = {
        "k": k_max,
        "half_rank_slope": [surd_json(hs[0]), surd_json(hs[1])],
        "rank_slope": [surd_json(rs[0]), surd_json(rs[1])],
        "half_rank_slope_display": [_surd_decimal(hs[0]), _surd_decimal(hs[1])],
        "rank_slope_display": [_surd_decimal(rs[0]), _surd_decimal(rs[1])],
        "half_rank_slope_in_window": HALF_SLOPE_WINDOW[0] <= hs[0] and hs[1] <= HALF_SLOPE_WINDOW[1],
        "rank_slope_in_window": RANK_SLOPE_WINDOW[0] <= rs[0] and rs[1] <= RANK_SLOPE_WINDOW[1],
        "limit_half_rank_slope": [surd_json(lim_h[0]), surd_json(lim_h[1])],
        "limit_rank_slope": [surd_json(lim_r[0]), surd_json(lim_r[1])],
        "limit_display": [_surd_decimal(lim_h[0]), _surd_decimal(lim_r[0])],
    }
    return {"columns": list(BOUNDS_COLUMNS), "rows": rows, "slope": summary, "M_mode": mode}


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return str(v)


def bounds_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table["columns"])
    for row in table["rows"]:
        w.writerow([_cell(row[c]) for c in table["columns"]])
    return buf.getvalue()


def text_table(columns, rows) -> str:
    cells = [[str(c) for c in columns]] + [[_cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "\n".join("  ".join(x.rjust(wd) for x, wd in zip(row, widths)) for row in cells) + "\n"
