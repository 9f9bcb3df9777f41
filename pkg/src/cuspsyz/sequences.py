"""Integer-sequence bounds engine.

An *admissible sequence* ``(a, b)`` abstracts the degrees of a minimal
resolution of the cusp ideal of a degree-6k curve: generator degrees ``a``
(length t+1), syzygy degrees ``b`` (length t), with ``c(a, b) =
(sum b^2 - sum a^2)/2`` cusps. This module evaluates the admissibility
clauses, reduces and normalises sequences, enumerates them exhaustively at
small k, evaluates the closed-form cusp bounds and the resulting rank bound,
and checks the numeric constraint system attached to non-strong sequences.

Irrational quantities are handled exactly with :class:`~cuspsyz.exact.QuadSurd`.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    FalsificationError,
    MalformedInputError,
    PreconditionError,
    ResourceBudgetError,
)
from .exact import QuadSurd, Surd73, isqrt_bracket

# ---------------------------------------------------------------------------
# cusp-count bounds M(d)
# ---------------------------------------------------------------------------

LANGER_QUADRATIC = Surd73(Fraction(125, 432), Fraction(1, 432))
LANGER_LINEAR = Surd73(Fraction(511, 1752), Fraction(11, 1752))
KNOWN_MAXIMA = {6: 9}  # the dual of a smooth cubic attains 9 cusps on a sextic

M_MODES = ("langer", "miyaoka", "none")


def langer_bound(d: int) -> Surd73:
    """(125 + sqrt73)/432 d^2 - (511 + 11 sqrt73)/1752 d, exactly."""
    return LANGER_QUADRATIC * (d * d) - LANGER_LINEAR * d


def langer_floor(d: int) -> int:
    return langer_bound(d).floor()


def cusp_bound(d: int, mode: str = "langer") -> int | None:
    """Upper bound for the number of cusps on a degree-d curve.

    ``langer``: floor of :func:`langer_bound` (clamped at 0, and 9 for
    sextics). ``miyaoka``: floor of 5d^2/16 - 3d/8, i.e. (45k^2 - 9k)/4 at
    d = 6k. ``none``: no bound (``None``).
    """
    if mode == "langer":
        if d in KNOWN_MAXIMA:
            return KNOWN_MAXIMA[d]
        return max(0, langer_floor(d))
    if mode == "miyaoka":
        return max(0, math.floor(Fraction(5 * d * d, 16) - Fraction(3 * d, 8)))
    if mode == "none":
        return None
    raise ValueError(f"unknown cusp bound mode {mode!r}")


def m_of(d: int, mode: str = "langer") -> int:
    """Smallest integer >= 2 M(d) / d."""
    M = cusp_bound(d, mode)
    if M is None:
        raise ValueError("m_of needs a finite cusp bound")
    return math.ceil(Fraction(2 * M, d))


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleSeq:
    k: int
    r: int
    a: tuple
    b: tuple

    def __init__(self, k: int, r: int, a, b):
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "a", tuple(int(x) for x in a))
        object.__setattr__(self, "b", tuple(int(x) for x in b))

    @property
    def t(self) -> int:
        return len(self.b)

    @property
    def D0(self) -> int:
        return self.a[-1]

    @property
    def c_value(self):
        c = Fraction(sum(x * x for x in self.b) - sum(x * x for x in self.a), 2)
        return int(c) if c.denominator == 1 else c

    def with_(self, a=None, b=None, r=None):
        return AdmissibleSeq(self.k, self.r if r is None else r, self.a if a is None else a, self.b if b is None else b)

    def to_json(self):
        return {"k": self.k, "r": self.r, "a": list(self.a), "b": list(self.b), "D0": self.D0, "c": self.c_value}


def _validate(seq: AdmissibleSeq) -> None:
    if len(seq.a) != len(seq.b) + 1:
        raise MalformedInputError("need len(a) == len(b) + 1")
    if any(x <= 0 for x in seq.a + seq.b):
        raise MalformedInputError("sequence entries must be positive")
    if list(seq.a) != sorted(seq.a, reverse=True) or list(seq.b) != sorted(seq.b, reverse=True):
        raise MalformedInputError("sequences must be descending")


CLAUSES = ("sum", "a_lt_b", "descending", "lowest_degree", "b_le_5k", "rank", "cusp_count")


@dataclass(frozen=True)
class AdmissibilityReport:
    clauses: dict
    strong: bool
    reduced: bool

    @property
    def admissible(self) -> bool:
        return all(self.clauses.values())

    @property
    def strongly_admissible(self) -> bool:
        return self.admissible and self.strong

    def __bool__(self):
        return self.admissible


def _c_limit(k: int, D0: int, mode: str) -> int:
    M = cusp_bound(6 * k, mode)
    lim = 3 * k * D0
    return lim if M is None else min(M, lim)


def is_admissible(seq: AdmissibleSeq, mode: str = "langer") -> AdmissibilityReport:
    """Evaluate the seven admissibility clauses literally."""
    _validate(seq)
    k, a, b = seq.k, seq.a, seq.b
    t = len(b)
    clauses = {
        "sum": sum(a) == sum(b),
        "a_lt_b": all(a[i] < b[i] for i in range(t)),
        "descending": True,  # enforced by _validate
        "lowest_degree": a[t] == seq.D0,
        "b_le_5k": all(x <= 5 * k for x in b),
        "rank": sum(1 for x in b if x == 5 * k) >= seq.r,
        "cusp_count": seq.c_value <= _c_limit(k, seq.D0, mode),
    }
    strong = all(a[i] <= b[i + 1] for i in range(t - 1))
    return AdmissibilityReport(clauses, strong, is_reduced(seq))


def is_strongly_admissible(seq: AdmissibleSeq, mode: str = "langer") -> bool:
    return is_admissible(seq, mode).strongly_admissible


def is_reduced(seq: AdmissibleSeq) -> bool:
    return not (set(seq.a) & set(seq.b))


def reduce(seq: AdmissibleSeq) -> AdmissibleSeq:
    """Cancel equal entries between a and b; c(a, b) is unchanged."""
    common = Counter(seq.a) & Counter(seq.b)
    if not common:
        return seq
    a = sorted((Counter(seq.a) - common).elements(), reverse=True)
    b = sorted((Counter(seq.b) - common).elements(), reverse=True)
    return seq.with_(a=a, b=b)


# ---------------------------------------------------------------------------
# normal forms of strongly admissible sequences
# ---------------------------------------------------------------------------


def shape_of(seq: AdmissibleSeq) -> int | None:
    """Which of the three normal-form shapes ``seq`` has (1, 2, 3) or None."""
    k, r, a, b = seq.k, seq.r, seq.a, seq.b
    t, D0 = len(b), seq.D0
    top, topa = 5 * k, 5 * k - 1
    if k == 1 and r == 3 and t == 3 and a == (4, 4, 4, 3):
        return 1
    if r < 1 or t < r or any(x != top for x in b[:r]):
        return None
    if t == r:
        for w in range(r):
            if (
                all(x == topa for x in a[:w])
                and (w == 0 or a[w - 1] > a[w])
                and a[w] >= a[w + 1]
                and all(x == D0 for x in a[w + 1 : r + 1])
            ):
                return 2
    for w in range(r):
        if (
            all(x == topa for x in a[:w])
            and all(x == D0 for x in a[w : r + 1])
            and all(b[i] == a[i] + 1 for i in range(r, t))
        ):
            return 3
    return None


def _sorted(seq, a, b):
    return reduce(seq.with_(a=sorted(a, reverse=True), b=sorted(b, reverse=True)))


def _normal_form_moves(seq: AdmissibleSeq):
    """Candidate successors under the c-lowering moves, in a fixed order."""
    k, r = seq.k, seq.r
    a, b = list(seq.a), list(seq.b)
    t, D0 = len(b), seq.D0
    top, topa = 5 * k, 5 * k - 1
    # indices below are 0-based; the comments use 1-based positions
    # move 1: raise the first a_i < 5k-1 (i < r) and lower a later a_j > D0
    i = next((n for n in range(t + 1) if a[n] < topa), None)
    if i is not None and i + 1 < r:
        for j in range(t, i, -1):
            if a[j] > D0:
                a2 = a[:]
                a2[i] += 1
                a2[j] -= 1
                yield "raise-a", a2, b
    # move 3: for r <= i < t with a_i > D0, lower a_i and b_{i+1}
    for i in range(max(r - 1, 0), t - 1):
        if a[i] > D0:
            a2, b2 = a[:], b[:]
            a2[i] -= 1
            b2[i + 1] -= 1
            yield "lower-pair", a2, b2
    # step-3 move: trade the last a_i = 5k-1 and last b_j = 5k for D0, D0+1
    if r >= 1 and a[r - 1] == topa:
        i = max(n for n in range(t + 1) if a[n] == topa)
        js = [n for n in range(t) if b[n] == top]
        if js:
            j = max(js)
            a2, b2 = a[:], b[:]
            a2[i] = D0
            b2[j] = D0 + 1
            yield "trade-top", a2, b2
    # lengthening: lower the last b_i != D0+1 (i > r) and append (D0, D0+1)
    idx = [n for n in range(t) if b[n] != D0 + 1]
    if idx and idx[-1] + 1 > r:
        i = idx[-1]
        b2 = b[:]
        b2[i] -= 1
        yield "lengthen", a + [D0], b2 + [D0 + 1]
    # move 2: for r < i < t with b_i - b_t >= 2 and b_i - a_{i-1} >= 2, shift one unit to b_t
    for i in range(r, t - 1):
        if b[i] - b[t - 1] >= 2 and i >= 1 and b[i] - a[i - 1] >= 2:
            b2 = b[:]
            b2[i] -= 1
            b2[t - 1] += 1
            yield "balance-b", a, b2


@dataclass
class NormalFormTrace:
    result: AdmissibleSeq
    steps: list = field(default_factory=list)
    used_search: bool = False


def strong_normal_form_trace(seq: AdmissibleSeq, mode: str = "langer") -> NormalFormTrace:
    if not is_strongly_admissible(seq, mode):
        raise PreconditionError("input is not strongly k-admissible")
    if seq.r < 1:
        raise PreconditionError("normal forms need r >= 1")
    cur = reduce(seq)
    D0 = seq.D0
    steps = []
    while shape_of(cur) is None:
        c0 = cur.c_value
        for name, a2, b2 in _normal_form_moves(cur):
            if min(a2) <= 0 or min(b2, default=1) <= 0:
                continue
            cand = _sorted(cur, a2, b2)
            if cand.D0 != D0 or cand.c_value >= c0:
                continue
            if is_strongly_admissible(cand, mode):
                steps.append((name, cand))
                cur = cand
                break
        else:
            # no move applies: fall back to the cheapest shaped sequence found by search
            pool = [
                s
                for s in enumerate_strongly_admissible(seq.k, seq.r, c0, mode=mode)
                if s.D0 == D0 and shape_of(s) is not None
            ]
            if not pool:
                raise FalsificationError(f"no shaped strongly admissible sequence below {cur}")
            best = min(pool, key=lambda s: (s.c_value, _canon_key(s)))
            return NormalFormTrace(best, steps, True)
    return NormalFormTrace(cur, steps, False)


def strong_normal_form(seq: AdmissibleSeq, mode: str = "langer") -> AdmissibleSeq:
    """A shaped strongly admissible sequence with the same (k, r, D0) and no larger c."""
    return strong_normal_form_trace(seq, mode).result


# ---------------------------------------------------------------------------
# minimum number of cusps for rank 2r
# ---------------------------------------------------------------------------


def _radicand(k: int, r: int) -> int:
    return 4 * k * k + 4 * k * r - r * r - 4 * k + 1


def min_cusps_formula(k: int, r: int) -> QuadSurd | None:
    """(3k/2)(r - 1 + 2k + sqrt(4k^2 + 4kr - r^2 - 4k + 1)); None when the radicand is negative."""
    R = _radicand(k, r)
    if R < 0:
        return None
    h = Fraction(3 * k, 2)
    return QuadSurd(h * (r - 1 + 2 * k), h, R)


def min_cusps_ceil(k: int, r: int) -> int | None:
    v = min_cusps_formula(k, r)
    return None if v is None else v.ceil()


def d0_min(k: int, r: int) -> QuadSurd | None:
    R = _radicand(k, r)
    if R < 0:
        return None
    return QuadSurd(Fraction(2 * k - 1 + r, 2), Fraction(1, 2), R)


def case2_min_value(k: int, r: int) -> Fraction:
    """c at D0 = (5k + r - 1)/2 for the t = r shape: (1 - 10k + 10rk + 25k^2 - r^2)/4."""
    return Fraction(1 - 10 * k + 10 * r * k + 25 * k * k - r * r, 4)


def case3_min_value(k: int, r: int) -> Fraction:
    """(25k^2 + 2rk - 10k - r^2 + 1)/4."""
    return Fraction(25 * k * k + 2 * r * k - 10 * k - r * r + 1, 4)


def asymptotic_min_cusps(k: int, r: int) -> Fraction:
    """6k^2 + 3(r-1)k + 3r(1-r)/4."""
    return Fraction(6 * k * k + 3 * (r - 1) * k) + Fraction(3 * r * (1 - r), 4)


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def _canon_key(s: AdmissibleSeq):
    return (s.t, s.b, s.a)


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise _BudgetHit


class _BudgetHit(Exception):
    pass


def _search_D0(k, r, D0, c_cap, strong, reduced, mode, budget, out):
    top = 5 * k
    cap = _c_limit(k, D0, mode)
    if c_cap is not None:
        cap = min(cap, c_cap)
    lo_pair = 2 * D0 + 1  # b + a >= 2 D0 + 1 for every pair
    for t in range(max(r, 1), D0 + 1):
        a, b = [], []

        def rec(i, rem, s2, prev_a, prev_b):
            budget.tick()
            if i == t:
                if rem:
                    return
                a_full = a + [D0]
                if reduced and set(a_full) & set(b):
                    return
                c2 = s2 - D0 * D0
                if c2 <= 2 * cap:
                    out.append(AdmissibleSeq(k, r, a_full, b))
                return
            left = t - i - 1
            b_hi = min(prev_b, top)
            b_lo = top if i < r else D0 + 1
            if strong and i > 0:
                b_lo = max(b_lo, prev_a)
            for bi in range(b_lo, b_hi + 1):
                a_hi = min(prev_a, bi - 1)
                for ai in range(D0, a_hi + 1):
                    e = bi - ai
                    r2 = rem - e
                    if r2 < left:
                        continue
                    s_new = s2 + bi * bi - ai * ai
                    if s_new + r2 * lo_pair - D0 * D0 > 2 * cap:
                        continue
                    a.append(ai)
                    b.append(bi)
                    rec(i + 1, r2, s_new, ai, bi)
                    a.pop()
                    b.pop()

        rec(0, D0, 0, 5 * k - 1, top)


def _search_worker(args):
    k, r, D0, c_cap, strong, reduced, mode, limit = args
    out = []
    budget = _Budget(limit)
    try:
        _search_D0(k, r, D0, c_cap, strong, reduced, mode, budget, out)
    except _BudgetHit:
        return out, budget.nodes, True
    return out, budget.nodes, False


def enumerate_admissible(
    k: int,
    r: int,
    c_cap: int | None = None,
    strong: bool = True,
    reduced: bool = True,
    mode: str = "langer",
    budget_nodes: int | None = 5_000_000,
    jobs: int = 1,
):
    """All (reduced) k-admissible sequences of rank 2r with c <= c_cap, in
    canonical order (t, then b lexicographically, then a).

    The search space is finite: b_i <= 5k, a_i >= D0, each pair contributes
    at least 1 to sum(b - a) = D0 < 5k, so t <= D0.
    """
    if k < 1 or r < 0:
        raise PreconditionError("need k >= 1 and r >= 0")
    tasks = [(k, r, D0, c_cap, strong, reduced, mode, budget_nodes) for D0 in range(1, 5 * k)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_search_worker, tasks))
    else:
        results = []
        spent = 0
        for task in tasks:
            limit = None if budget_nodes is None else budget_nodes - spent
            res = _search_worker(task[:-1] + (limit,))
            results.append(res)
            spent += res[1]
            if res[2]:
                break
    found = []
    hit = False
    for out, _, over in results:
        found.extend(out)
        hit = hit or over
    found.sort(key=_canon_key)
    if hit:
        raise ResourceBudgetError(
            f"enumeration budget of {budget_nodes} nodes exceeded", partial=found
        )
    return iter(found)


def enumerate_strongly_admissible(k: int, r: int, c_cap: int | None = None, mode: str = "langer", **kw):
    return enumerate_admissible(k, r, c_cap, strong=True, reduced=True, mode=mode, **kw)


def enumerated_min_cusps(k: int, r: int, mode: str = "langer", **kw) -> int | None:
    c = [s.c_value for s in enumerate_strongly_admissible(k, r, None, mode=mode, **kw)]
    return min(c) if c else None


# ---------------------------------------------------------------------------
# the exceptional family t = r, a_1 = ... = a_r = 5k - 1, a_{r+1} = r
# ---------------------------------------------------------------------------


def lemexcl_scan(k_max: int, mode: str = "langer"):
    """(k, r) with r <= 5k for which the exceptional family satisfies the cusp-count clause."""
    if k_max > 20:
        raise PreconditionError("k_max <= 20")
    out = []
    for k in range(1, k_max + 1):
        for r in range(1, 5 * k + 1):
            c = 5 * r * k - Fraction(r * (r + 1), 2)
            if c <= _c_limit(k, r, mode):
                out.append((k, r))
    return out


# ---------------------------------------------------------------------------
# rank bound g(k)
# ---------------------------------------------------------------------------

G_DENOMINATOR = 2628


def g_numerator(k: int) -> Surd73:
    return Surd73(-219, -33) + Surd73(9125, 73) * k


def g_alpha(k: int) -> Surd73:
    return Surd73(3325734, -14454) + Surd73(-11766432, 287328) * k + Surd73(12267358, -564874) * (k * k)


def _floor_of_difference(X: Surd73, alpha: Surd73, den: int, start: int) -> int:
    """Largest n with (X - sqrt(alpha))/den >= n, searching upward from ``start``."""

    def ok(n):
        y = X - den * n
        return y.sign() >= 0 and (y * y - alpha).sign() >= 0

    n = start
    while not ok(n):
        n -= 1
    while ok(n + 1):
        n += 1
    return n


@dataclass(frozen=True)
class GBound:
    k: int
    numerator: Surd73
    alpha: Surd73
    sqrt_alpha: tuple  # (lo, hi) rationals
    half_rank: tuple  # (lo, hi) Surd73 bracket of the bound on r
    rank: tuple  # (lo, hi) bracket of the bound on the MW rank
    half_rank_floor: int
    rank_floor: int

    @property
    def half_rank_slope(self):
        return (self.half_rank[0] / self.k, self.half_rank[1] / self.k)

    @property
    def rank_slope(self):
        return (self.rank[0] / self.k, self.rank[1] / self.k)


def g_bound(k: int, width=Fraction(1, 1000)) -> GBound:
    """Upper bound for r (half rank) and for the Mordell-Weil rank (twice it)."""
    if k < 1:
        raise PreconditionError("k >= 1")
    X, alpha = g_numerator(k), g_alpha(k)
    if alpha.sign() < 0:
        raise ArithmeticError("alpha < 0")
    # bracket sqrt(alpha) finely enough that the value bracket has the requested width
    lo, hi = isqrt_bracket(alpha, Fraction(width) * k)
    half = ((X - hi) / G_DENOMINATOR, (X - lo) / G_DENOMINATOR)
    rank = (half[0] * 2, half[1] * 2)
    hf = _floor_of_difference(X, alpha, G_DENOMINATOR, half[0].floor())
    rf = _floor_of_difference(X, alpha, G_DENOMINATOR // 2, rank[0].floor())
    return GBound(k, X, alpha, (lo, hi), half, rank, hf, rf)


def limit_slope(width=Fraction(1, 1000)):
    """Bracket of (125 + sqrt73 - sqrt(2302 - 106 sqrt73))/36 and of twice it."""
    inner = Surd73(2302, -106)
    lo, hi = isqrt_bracket(inner, width)
    base = Surd73(125, 1)
    half = ((base - hi) / 36, (base - lo) / 36)
    return half, (half[0] * 2, half[1] * 2)


# ---------------------------------------------------------------------------
# constraint system for non-strong sequences
# ---------------------------------------------------------------------------


class LinearPoly(NamedTuple):
    """slope * s + const."""

    slope: Fraction
    const: Fraction

    def __call__(self, s):
        return self.slope * s + self.const

    def __add__(self, o):
        return LinearPoly(self.slope + o.slope, self.const + o.const)

    def __sub__(self, o):
        return LinearPoly(self.slope - o.slope, self.const - o.const)


def _F(x) -> Fraction:
    return Fraction(x)


def B(s) -> Fraction:
    """(s + 1)(s + 2)/2, as a polynomial (also for negative s)."""
    return Fraction((s + 1) * (s + 2), 2)


@dataclass(frozen=True)
class ConstraintState:
    k: int
    r: int
    A: int
    D0: int
    D1: int
    D2: int
    w: int
    i0: int
    s0: int
    a: tuple | None = None
    b: tuple | None = None
    cs: tuple | None = None
    ds: tuple | None = None

    # closed forms --------------------------------------------------------
    def h1(self) -> LinearPoly:
        k, r, A, D2 = map(_F, (self.k, self.r, self.A, self.D2))
        const = (
            -r + 1 + 5 * k * r - r * A - D2 + D2 * A - Fraction(15, 2) * k + Fraction(3, 2) * A
            + A * A / 2 + Fraction(25, 2) * k * k - 5 * k * A
        )
        return LinearPoly(-D2, const)

    def h2a(self) -> LinearPoly:
        # B(s) - B(s - D0) + (D0 - D2)(B(s - D0 - 1) - B(s - D0)), expanded
        D0, D2 = _F(self.D0), _F(self.D2)
        return LinearPoly(D2, D0 * D0 / 2 + D0 / 2 - D2 * (D0 - 1))

    def h2b(self) -> LinearPoly:
        D1, D2, A = _F(self.D1), _F(self.D2), _F(self.A)
        return LinearPoly(D2, (D1 - D1 * D1) / 2 + D1 * A - D2 * (A - 1))

    def h3(self) -> LinearPoly:
        D1, D2, A = _F(self.D1), _F(self.D2), _F(self.A)
        return LinearPoly(D1 - D2, (D1 - D2) * (1 - A))

    def hC(self) -> LinearPoly:
        D1 = _F(self.D1)
        return LinearPoly(D1, -D1 * (D1 - 3) / 2)

    def h2(self, s) -> Fraction:
        return max(self.h2a()(s), self.h2b()(s))

    # sequences -----------------------------------------------------------
    def sequences(self):
        """Explicit (a, b, c, d); the canonical optimised ones unless given."""
        if self.a is not None:
            return self.a, self.b, self.cs or (), self.ds or ()
        k, r, A, D0, D2 = self.k, self.r, self.A, self.D0, self.D2
        w, i0 = self.w, self.i0
        head_a = [5 * k - 1] * w + [A] * max(i0 - w, 0)
        head_b = [5 * k] * r + [A + 1] * max(i0 - r, 0)
        tail = max(D0 - D2, 0)
        a = tuple(head_a + [D0] * tail + [D0])
        b = tuple(head_b + [D0 + 1] * tail)
        return a, b, (A,) * self.s0, (A + 1,) * self.s0


def h2a_plus_one_variant(state: ConstraintState) -> LinearPoly:
    """The h_{2,a} constant term with -D2(D0 + 1): D0^2/2 + D0/2 - D2(D0 + 1)."""
    D0, D2 = _F(state.D0), _F(state.D2)
    return LinearPoly(D2, D0 * D0 / 2 + D0 / 2 - D2 * (D0 + 1))


@dataclass(frozen=True)
class ConstraintReport:
    conditions: dict

    @property
    def all_hold(self) -> bool:
        return all(self.conditions.values())

    def failed(self):
        return [n for n, ok in self.conditions.items() if not ok]


def constraint_system(state: ConstraintState) -> ConstraintReport:
    """Evaluate the thirteen conditions on (a, b, c, d, i0, D0, D1, D2, A).

    With explicit sequences the h's are the B-sums over them; otherwise the
    closed forms of the optimised sequences are used.
    """
    k, r, A = state.k, state.r, state.A
    D0, D1, D2, i0 = state.D0, state.D1, state.D2, state.i0
    a, b, cs, ds = state.sequences()
    t = len(b)
    well = len(a) == t + 1 and 0 <= i0 <= t and len(cs) == len(ds)
    s = A - 1
    hC = state.hC()(s)
    if state.a is not None and well:
        h1, h2, h3 = h_from_sequences(state, s)
    else:
        h1, h3, h2 = state.h1()(s), state.h3()(s), state.h2(s)
    cond = {
        1: well and all(a[i] >= A for i in range(i0)),
        2: well and all(b[i] < A for i in range(i0, t)),
        3: well and all(D0 <= a[i] < b[i] <= 5 * k for i in range(t)),
        4: well and t >= r and all(b[i] == 5 * k for i in range(r)),
        5: well and D0 == a[t] == sum(b[i] - a[i] for i in range(t)),
        6: all(A <= c < d for c, d in zip(cs, ds)),
        7: well and all(a[i] < b[i + 1] for i in range(max(i0 - 1, 0))),
        8: well and D2 == sum(b[i] - a[i] for i in range(i0)),
        9: r <= D2 <= D1 <= D0 <= A <= 5 * k - 1,
        10: h1 + h2 <= 3 * k * D0,
        11: h1 + h2 <= Fraction(45 * k * k - 9 * k, 4),
        12: h1 - h3 + hC <= 3 * k * D1,
        13: h2 >= hC,
    }
    return ConstraintReport(cond)


def h_from_sequences(state: ConstraintState, s: int):
    """h1, h2, h3 evaluated directly as sums of B(s - degree) over the sequences."""
    a, b, cs, ds = state.sequences()
    i0, t = state.i0, len(b)
    h1 = sum((B(s - b[i]) - B(s - a[i]) for i in range(i0)), Fraction(0))
    h2 = B(s) - B(s - a[t]) + sum((B(s - b[i]) - B(s - a[i]) for i in range(i0, t)), Fraction(0))
    h3 = sum((B(s - c) - B(s - d) for c, d in zip(cs, ds)), Fraction(0))
    return h1, h2, h3


def first_violation(seq: AdmissibleSeq) -> int | None:
    """Smallest 1-based i0 with a_{i0} > b_{i0+1}, or None for strong sequences."""
    a, b = seq.a, seq.b
    return next((i + 1 for i in range(len(b) - 1) if a[i] > b[i + 1]), None)


def state_from_sequence(seq: AdmissibleSeq, D1: int) -> ConstraintState:
    """Parameters of a non-strong sequence, with c_j = A, d_j = A + 1 filling D1 - D2."""
    i0 = first_violation(seq)
    if i0 is None:
        raise PreconditionError("sequence is strongly admissible")
    A = seq.a[i0 - 1]
    D2 = sum(seq.b[i] - seq.a[i] for i in range(i0))
    s0 = max(D1 - D2, 0)
    w = sum(1 for x in seq.a[:i0] if x == 5 * seq.k - 1)
    return ConstraintState(
        seq.k, seq.r, A, seq.D0, D1, D2, w, i0, s0, seq.a, seq.b, (A,) * s0, (A + 1,) * s0
    )


def cusp_ideal_witness(seq: AdmissibleSeq):
    """A D1 for which the thirteen conditions hold, or None.

    For fixed D1 the choice c_j = A, d_j = A + 1 maximises h3, which makes
    condition (12) easiest to satisfy; the other conditions do not involve
    c and d beyond their count, so this choice decides feasibility.
    """
    seq = reduce(seq)
    i0 = first_violation(seq)
    if i0 is None:
        return None
    D2 = sum(seq.b[i] - seq.a[i] for i in range(i0))
    for D1 in range(D2, seq.D0 + 1):
        if constraint_system(state_from_sequence(seq, D1)).all_hold:
            return D1
    return None


# ---------------------------------------------------------------------------
# non-strong sequences
# ---------------------------------------------------------------------------


def non_strong_reduction(seq: AdmissibleSeq, mode: str = "langer", budget_nodes: int | None = 5_000_000):
    """A strongly admissible sequence of the same rank with c no larger than ``seq``'s.

    ``seq`` must be admissible, not strongly so, and satisfy the thirteen
    conditions for some D1 (a necessary condition for coming from the cusps
    of a curve; see :func:`cusp_ideal_witness`). The answer is found by
    exhaustive search and is the minimal-c one, ties broken by canonical
    order. An empty search result is a falsification event.
    """
    rep = is_admissible(seq, mode)
    if not rep.admissible:
        raise PreconditionError("input is not k-admissible")
    if rep.strong:
        raise PreconditionError("input is already strongly k-admissible")
    if is_strongly_admissible(reduce(seq), mode):
        return reduce(seq)
    if cusp_ideal_witness(seq) is None:
        raise PreconditionError(f"{seq} violates the cusp-ideal conditions for every D1")
    c = seq.c_value
    found = list(enumerate_strongly_admissible(seq.k, seq.r, c, mode=mode, budget_nodes=budget_nodes))
    if not found:
        raise FalsificationError(f"no strongly admissible sequence of rank {2 * seq.r} with c <= {c} for {seq}")
    return min(found, key=lambda s: (s.c_value, _canon_key(s)))
