"""From Betti degrees of the cusp ideal to the Mordell-Weil rank.

For a reduced degree-6k curve with only nodes and cusps, the rank of the
Mordell-Weil group of y^2 = x^3 + f equals twice the number of syzygy
degrees b_i equal to 5k. The same number is the defect of the cusps on
degree-(5k - 3) forms, and the exponent of t^2 - t + 1 in the Alexander
polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ContradictionError, UnsupportedCurveError
from .geometry import DEFAULT_POINT_BUDGET, CurveSpec, singular_points
from .poly import eval_matrix
from .resolution import BettiData, minimal_resolution
from .sequences import cusp_bound


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self):
        return {"name": self.name, "pass": self.passed, "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def defect(betti: BettiData, n: int) -> int:
    """#points minus h_{S/I}(n - 3), from the Betti degrees alone."""
    if n < 1:
        raise ValueError("n >= 1")
    tot = sum((x - n + 1) * (x - n + 2) for x in betti.b if x >= n)
    tot -= sum((x - n + 1) * (x - n + 2) for x in betti.a if x >= n)
    if tot % 2:
        raise ArithmeticError("odd defect numerator")
    return tot // 2


def direct_defect(points, n: int) -> int:
    """#points - rank of the evaluation map on degree-(n - 3) forms."""
    if n < 3:
        return len(points)
    return len(points) - eval_matrix(points, n - 3).rank()


@dataclass
class RankReport:
    k: int
    betti: BettiData | None
    defect_at_5k_minus_3: int
    mw_rank: int
    alexander_exponent: int
    checks: list = field(default_factory=list)
    cusps: list = field(default_factory=list)
    nodes: list = field(default_factory=list)

    def to_json(self):
        return {
            "k": self.k,
            "betti": None if self.betti is None else self.betti.to_json(),
            "defect": self.defect_at_5k_minus_3,
            "mw_rank": self.mw_rank,
            "alexander_exponent": self.alexander_exponent,
            "checks": [c.to_json() for c in self.checks],
        }


def bezout_cusp_check(betti: BettiData, d: int, mode: str = "langer") -> Check:
    """#cusps <= min(D0 d/2, M(d)), and the weaker min(D0, 5d/8 - 3/4) d/2."""
    N = betti.point_count
    D0 = betti.D0
    M = cusp_bound(d, mode)
    bound = Fraction(D0 * d, 2) if M is None else min(Fraction(D0 * d, 2), Fraction(M))
    display = min(Fraction(D0), Fraction(5 * d, 8) - Fraction(3, 4)) * Fraction(d, 2)
    ok = N <= bound and N <= display
    return Check(
        "bezout_cusp_count",
        ok,
        {"points": N, "bound": bound, "slack": bound - N, "display_bound": display, "display_slack": display - N},
    )


def nodal_component_check(betti: BettiData | None, d: int, c: int, strict: bool = True) -> Check:
    """b_i <= d and #{b_i = d} = c - 1 for the node ideal of a degree-d curve with c components."""
    if betti is None:
        top, over = 0, []
    else:
        top = sum(1 for x in betti.b if x == d)
        over = [x for x in betti.b if x > d]
    ok = not over and top == c - 1
    chk = Check("nodal_components", ok, {"degree": d, "components": c, "b_equal_d": top, "b_above_d": over})
    if strict and not ok:
        raise ContradictionError(f"node resolution inconsistent with {c} components: {chk.detail}")
    return chk


def mw_rank(betti: BettiData | None, k: int, mode: str = "langer") -> RankReport:
    if betti is None:
        return RankReport(k, None, 0, 0, 0, [Check("shioda_tate", True, {"rank": 0, "bound": 10 * k - 2})])
    top = 5 * k
    bad_b = [x for x in betti.b if x > top]
    bad_a = [x for x in betti.a if x >= top]
    if bad_b or bad_a:
        raise ContradictionError(
            f"not the cusp ideal of a degree-{6 * k} nodal-cuspidal curve: b above {top}: {bad_b}, a at least {top}: {bad_a}"
        )
    r = sum(1 for x in betti.b if x == top)
    dfct = defect(betti, top)
    checks = [
        Check("defect_matches_count", dfct == r, {"defect": dfct, "count_b_equal_5k": r}),
        Check("shioda_tate", 2 * r <= 10 * k - 2, {"rank": 2 * r, "bound": 10 * k - 2}),
        bezout_cusp_check(betti, 6 * k, mode),
    ]
    return RankReport(k, betti, dfct, 2 * r, r, checks)


def analyze_curve(curve: CurveSpec, budget: int = DEFAULT_POINT_BUDGET, cusps=None) -> RankReport:
    """Rank of y^2 = x^3 + f for a curve whose singular points are rational nodes and cusps.

    ``cusps`` may be supplied when they are known (e.g. from a construction);
    the rational singular points are still computed and classified.
    """
    sing = singular_points(curve, budget)
    worse = [s for s in sing if s.kind not in ("node", "cusp")]
    if worse:
        err = UnsupportedCurveError(
            "singularities worse than A2 at " + ", ".join(repr(s.point) for s in worse)
        )
        err.points = [s.point for s in worse]
        raise err
    found = [s.point for s in sing if s.kind == "cusp"]
    nodes = [s.point for s in sing if s.kind == "node"]
    if cusps is not None and set(cusps) != set(found):
        err = UnsupportedCurveError("supplied cusp list differs from the rational cusps found")
        err.points = sorted(set(cusps) ^ set(found))
        raise err
    k = curve.k
    betti = minimal_resolution(found) if found else None
    rep = mw_rank(betti, k)
    direct = direct_defect(found, 5 * k)
    rep.checks.append(
        Check("direct_cokernel", direct == rep.defect_at_5k_minus_3, {"direct": direct, "from_betti": rep.defect_at_5k_minus_3})
    )
    if nodes:
        rep.checks.append(nodal_component_check(minimal_resolution(nodes), curve.degree, len(curve.factors), strict=False))
    if getattr(sing, "warning", None):
        rep.checks.append(Check("characteristic", False, {"warning": sing.warning}))
    rep.cusps = found
    rep.nodes = nodes
    return rep
