"""Plane curves over prime fields: singular points, cusp/node classification,
the f1^3 + f2^2 construction and pullbacks of point sets along maps P^2 -> P^2.

Singular points are found by exhausting P^2(F_p). Point-wise evaluation is
vectorised with numpy on int64 residues, which stays exact because every
intermediate product is reduced below p^2.
"""

from __future__ import annotations

import itertools

import logging
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import (
    ConstructionFailedError,
    InvalidMapError,
    MalformedInputError,
    NotOnCurveError,
    PreconditionError,
    ResourceBudgetError,
)
from .exact import EchelonSpan, Field, GF, raw_kernel
from .poly import (
    HomogeneousPoly,
    ProjPoint,
    eval_rows,
    monomial_count,
    monomial_index,
    monomials,
)
from .rng import make_rng

log = logging.getLogger(__name__)

DEFAULT_POINT_BUDGET = 250_000
MAX_NUMPY_PRIME = 3_000_000_000


# ---------------------------------------------------------------------------
# enumeration of P^2(F_p)
# ---------------------------------------------------------------------------


def plane_size(p: int) -> int:
    return p * p + p + 1


def _check_budget(p: int, budget: int) -> None:
    if p > MAX_NUMPY_PRIME:
        raise ResourceBudgetError(f"p={p} too large for exhaustive enumeration")
    if plane_size(p) > budget:
        raise ResourceBudgetError(
            f"P^2(F_{p}) has {plane_size(p)} points, over the enumeration budget {budget}"
        )


def plane_points_array(p: int) -> np.ndarray:
    """All normalised points of P^2(F_p) in canonical order, shape (p^2+p+1, 3)."""
    r = np.arange(p, dtype=np.int64)
    yy, zz = np.meshgrid(r, r, indexing="ij")
    chart0 = np.stack([np.ones(p * p, dtype=np.int64), yy.ravel(), zz.ravel()], axis=1)
    chart1 = np.stack([np.zeros(p, dtype=np.int64), np.ones(p, dtype=np.int64), r], axis=1)
    chart2 = np.array([[0, 0, 1]], dtype=np.int64)
    return np.concatenate([chart0, chart1, chart2])


class _PowerTable:
    def __init__(self, pts: np.ndarray, p: int, max_deg: int):
        self.p = p
        self.pw = []
        for i in range(3):
            col = pts[:, i] % p
            table = [np.ones_like(col)]
            for _ in range(max_deg):
                table.append(table[-1] * col % p)
            self.pw.append(table)

    def eval(self, f: HomogeneousPoly) -> np.ndarray:
        p = self.p
        out = np.zeros_like(self.pw[0][0])
        for (a, b, c), coef in f.coeffs.items():
            term = self.pw[0][a] * self.pw[1][b] % p * self.pw[2][c] % p
            out = (out + int(coef) * term) % p
        return out


def _to_points(field: Field, arr: np.ndarray):
    return [ProjPoint(field, [int(x) for x in row]) for row in arr]


def rational_points(f: HomogeneousPoly, budget: int = DEFAULT_POINT_BUDGET):
    """F_p-rational points of Z(f), canonical order."""
    p = _prime_of(f.field)
    _check_budget(p, budget)
    pts = plane_points_array(p)
    vals = _PowerTable(pts, p, f.degree).eval(f)
    return _to_points(f.field, pts[vals == 0])


def _prime_of(field: Field) -> int:
    if field.p is None:
        raise PreconditionError("exhaustive point search needs a prime field")
    return field.p


# ---------------------------------------------------------------------------
# local classification
# ---------------------------------------------------------------------------


class SingularityType(NamedTuple):
    kind: str  # "smooth" | "node" | "cusp" | "other"
    tangent: HomogeneousPoly | None = None
    diagnostic: str = ""


@dataclass(frozen=True, order=True)
class SingularPoint:
    point: ProjPoint = dc_field(compare=False)
    kind: str = dc_field(compare=False)
    tangent: HomogeneousPoly | None = dc_field(default=None, compare=False)
    sort_index: tuple = dc_field(default=(), repr=False)

    @classmethod
    def make(cls, point: ProjPoint, kind: str, tangent=None):
        return cls(point, kind, tangent, point.sort_key())

    def to_json(self):
        return {"point": self.point.to_json(), "kind": self.kind}


def local_expansion(f: HomogeneousPoly, pt: ProjPoint, order: int = 3):
    """Taylor coefficients of ``f`` at ``pt`` in the affine chart of its leading coordinate.

    Returns ``(chart, others, coeffs)`` where ``coeffs[(a, b)]`` is the
    coefficient of ``u^a v^b`` with ``u = z_j/z_chart - pt_j`` and
    ``v = z_l/z_chart - pt_l``; only terms of total degree <= ``order``.
    """
    fld = f.field
    chart = next(i for i, x in enumerate(pt.coords) if x)
    j, l = [i for i in range(3) if i != chart]
    pj, pl = pt.coords[j], pt.coords[l]
    out = {}
    for e, c in f.coeffs.items():
        ej, el = e[j], e[l]
        for a in range(min(ej, order) + 1):
            ca = comb(ej, a) * pj ** (ej - a)
            for b in range(min(el, order - a) + 1):
                out[(a, b)] = out.get((a, b), 0) + c * ca * comb(el, b) * pl ** (el - b)
    return chart, (j, l), {key: fld.norm(fld(v) if not fld.contains(v) else v) for key, v in out.items()}


def classify_singularity(f: HomogeneousPoly, pt: ProjPoint) -> SingularityType:
    """Smooth / node (A1) / cusp (A2) / other, from the 3-jet at ``pt``.

    Node: nondegenerate quadratic part. Cusp: quadratic part is a unit times
    the square of a linear form that does not divide the cubic part.
    """
    fld = f.field
    if fld.characteristic in (2, 3):
        raise PreconditionError("classification needs characteristic 0 or > 3")
    chart, (j, l), loc = local_expansion(f, pt)
    g = lambda a, b: loc.get((a, b), fld.zero)  # noqa: E731
    if g(0, 0):
        raise NotOnCurveError(f"f does not vanish at {pt!r}")
    if g(1, 0) or g(0, 1):
        return SingularityType("smooth")
    a, b, c = g(2, 0), g(1, 1), g(0, 2)
    if not (a or b or c):
        return SingularityType("other", diagnostic="multiplicity >= 3")
    disc = fld.norm(b * b - 4 * a * c)
    if disc:
        return SingularityType("node")
    # rank-1 quadratic part: a*(u + beta v)^2, or c*v^2 when a == 0
    if a:
        beta = fld.norm(b * fld.inv(2 * a if fld.p is None else (2 * a) % fld.p))
        lam, mu = fld.one, beta
        direction = (fld.norm(-beta), fld.one)
    else:
        lam, mu = fld.zero, fld.one
        direction = (fld.one, fld.zero)
    du, dv = direction
    cubic = fld.norm(sum(g(i, 3 - i) * du**i * dv ** (3 - i) for i in range(4)))
    # projective tangent line: lam*(z_j - p_j z_chart) + mu*(z_l - p_l z_chart)
    coeffs = [fld.zero] * 3
    coeffs[j] = lam
    coeffs[l] = mu
    coeffs[chart] = fld.norm(-(lam * pt.coords[j] + mu * pt.coords[l]))
    tangent = HomogeneousPoly.linear(fld, *coeffs)
    if cubic:
        return SingularityType("cusp", tangent)
    return SingularityType("other", tangent, "tangent line divides the cubic part (worse than A2)")


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def _upoly_trim(a, p):
    while a and a[-1] % p == 0:
        a.pop()
    return [x % p for x in a]


def _upoly_mod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b) and a:
        q = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, x in enumerate(b):
            a[shift + i] = (a[shift + i] - q * x) % p
        a = _upoly_trim(a, p)
    return a


def _upoly_gcd_degree(a, b, p) -> int:
    a, b = _upoly_trim(list(a), p), _upoly_trim(list(b), p)
    while b:
        a, b = b, _upoly_mod(a, b, p)
    return len(a) - 1


def _restrict_to_line(f: HomogeneousPoly, P, Q, p: int):
    """Coefficients (low to high in s) of f(s*P + Q)."""
    lin = [[Q[i] % p, P[i] % p] for i in range(3)]

    def mul(x, y):
        out = [0] * (len(x) + len(y) - 1)
        for i, u in enumerate(x):
            if u:
                for j, w in enumerate(y):
                    out[i + j] = (out[i + j] + u * w) % p
        return out

    pw = [[[1]] for _ in range(3)]
    for i in range(3):
        for _ in range(f.degree):
            pw[i].append(mul(pw[i][-1], lin[i]))
    total = [0] * (f.degree + 1)
    for (a, b, c), coef in f.coeffs.items():
        term = mul(mul(pw[0][a], pw[1][b]), pw[2][c])
        for i, x in enumerate(term):
            total[i] = (total[i] + coef * x) % p
    return total


def is_squarefree(f: HomogeneousPoly, tries: int = 24, seed: int = 0) -> bool:
    """Certify that ``f`` is squarefree over the algebraic closure.

    If the restriction of ``f`` to some line is a squarefree binary form of
    full degree then ``f`` is squarefree; ``False`` means no certificate was
    found within ``tries`` random lines.
    """
    p = _prime_of(f.field)
    d = f.degree
    if f.is_zero():
        return False
    if d <= 1:
        return True
    rng = make_rng(seed, "squarefree", p, d)
    for _ in range(tries):
        P = [rng.randrange(p) for _ in range(3)]
        Q = [rng.randrange(p) for _ in range(3)]
        uni = _upoly_trim(_restrict_to_line(f, P, Q, p), p)
        deg = len(uni) - 1
        if deg < d - 1:
            continue  # t^2 divides the binary form (or line inside the curve)
        der = _upoly_trim([(i * x) % p for i, x in enumerate(uni)][1:], p)
        if not der:
            continue
        if _upoly_gcd_degree(uni, der, p) == 0:
            return True
    return False


def product(polys):
    polys = list(polys)
    out = polys[0]
    for g in polys[1:]:
        out = out * g
    return out


@dataclass
class CurveSpec:
    p: int
    k: int
    factors: tuple
    provenance: dict | None = None
    check: bool = True

    def __post_init__(self):
        self.factors = tuple(self.factors)
        if not self.factors:
            raise MalformedInputError("curve needs at least one factor")
        fld = GF(self.p)
        for g in self.factors:
            if g.field != fld:
                raise MalformedInputError("factor not over GF(p)")
        if self.poly.degree != 6 * self.k:
            raise MalformedInputError(f"curve degree {self.poly.degree} != 6k = {6 * self.k}")
        if self.check and not is_squarefree(self.poly):
            raise MalformedInputError("curve equation is not (certifiably) squarefree")

    @property
    def field(self) -> Field:
        return GF(self.p)

    @property
    def poly(self) -> HomogeneousPoly:
        return product(self.factors)

    @property
    def degree(self) -> int:
        return 6 * self.k

    def to_json(self):
        out = {"p": self.p, "k": self.k, "factors": [g.to_json() for g in self.factors]}
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise MalformedInputError("curve JSON must be an object")
        try:
            p, k, factors = obj["p"], obj["k"], obj["factors"]
        except KeyError as exc:
            raise MalformedInputError(f"curve JSON missing {exc}") from None
        if type(p) is not int or type(k) is not int or k < 1 or not isinstance(factors, list):
            raise MalformedInputError("curve JSON has bad p/k/factors")
        fld = GF(p)
        polys = tuple(HomogeneousPoly.from_json(fld, g) for g in factors)
        return cls(p, k, polys, obj.get("provenance"))


class SingularPointList(list):
    """List of :class:`SingularPoint` with a ``warning`` string (empty when none)."""

    warning: str = ""


def singular_points(curve, budget: int = DEFAULT_POINT_BUDGET) -> SingularPointList:
    """All F_p-rational singular points of the curve, classified, in canonical order."""
    f = curve.poly if isinstance(curve, CurveSpec) else curve
    p = _prime_of(f.field)
    _check_budget(p, budget)
    pts = plane_points_array(p)
    table = _PowerTable(pts, p, f.degree)
    mask = table.eval(f) == 0
    for g in f.gradient():
        mask &= table.eval(g) == 0
    out = SingularPointList()
    if f.degree % p == 0:
        out.warning = f"degree {f.degree} divisible by p={p}; partial derivatives may degenerate"
        log.warning(out.warning)
    for pt in _to_points(f.field, pts[mask]):
        t = classify_singularity(f, pt)
        out.append(SingularPoint.make(pt, t.kind, t.tangent))
    return out


# ---------------------------------------------------------------------------
# f1^3 + f2^2
# ---------------------------------------------------------------------------


@dataclass
class Construction:
    curve: CurveSpec
    cusps: list
    attempts: int
    diagnostics: list


def vet_cuspidal_candidate(f1, f2, intersection, budget=DEFAULT_POINT_BUDGET):
    """Problems with ``f1^3 + f2^2`` as a curve whose singularities are exactly
    the rational cusps at ``intersection``; empty list means accepted."""
    f = f1**3 + f2**2
    problems = []
    for q in intersection:
        kind = classify_singularity(f, q).kind
        if kind != "cusp":
            problems.append(f"{q!r} is {kind}, expected cusp")
    if problems:
        return problems
    if not is_squarefree(f):
        return ["f1^3 + f2^2 not certifiably squarefree"]
    sing = singular_points(f, budget)
    found = {s.point for s in sing}
    extra = found - set(intersection)
    if extra:
        problems.append(f"unexpected singular points {sorted(extra)}")
    missing = set(intersection) - found
    if missing:
        problems.append(f"intersection points not singular {sorted(missing)}")
    return problems


def _multiples_span(f1: HomogeneousPoly, k: int) -> EchelonSpan:
    deg = f1.degree + k
    span = EchelonSpan(f1.field, monomial_count(deg))
    for m in monomials(k):
        span.add((f1 * HomogeneousPoly(f1.field, k, {m: f1.field.one})).to_vector())
    return span


def _pick_f2(fld, f1, reps, multiples, on_f1, total, rng, budget, diagnostics, attempt, max_members=400):
    """Scan members of the linear system spanned by ``reps`` (modulo f1) for one
    meeting Z(f1) in exactly ``total`` rational points and passing the vetting."""
    p = fld.p
    ev = np.array([[int(HomogeneousPoly.from_vector(fld, 3 * (f1.degree // 2), v)(q)) for q in on_f1] for v in reps], dtype=object)
    m = len(reps)
    members = _projective_coefficients(m, p, rng, max_members)
    tried = 0
    for c in members:
        vals = [sum(ci * int(e) for ci, e in zip(c, col)) % p for col in ev.T]
        inter = [q for q, x in zip(on_f1, vals) if x == 0]
        if len(inter) != total:
            continue
        tried += 1
        vec = [0] * len(reps[0])
        for ci, v in zip(c, reps):
            vec = [(x + ci * y) % p for x, y in zip(vec, v)]
        for v in multiples:
            r = rng.randrange(p)
            vec = [(x + r * y) % p for x, y in zip(vec, v)]
        f2 = HomogeneousPoly.from_vector(fld, f1.degree * 3 // 2, vec)
        if f2.is_zero() or any(f2(q) for q in inter) or sum(1 for q in on_f1 if not f2(q)) != total:
            continue
        problems = vet_cuspidal_candidate(f1, f2, inter, budget)
        if not problems:
            return f2, inter
        diagnostics.append(f"attempt {attempt}: " + "; ".join(problems))
        if tried >= 4:
            break
    if not tried:
        diagnostics.append(f"attempt {attempt}: no member of the system meets Z(f1) in {total} rational points")
    return None, None


def _projective_coefficients(m, p, rng, limit):
    """Up to ``limit`` distinct points of P^{m-1}(F_p), in random order."""
    if m == 1:
        return [(1,)]
    size = (p**m - 1) // (p - 1)
    if size <= limit:
        out = []
        for lead in range(m):
            for tail in itertools.product(range(p), repeat=m - lead - 1):
                out.append((0,) * lead + (1,) + tail)
        rng.shuffle(out)
        return out
    seen = set()
    while len(seen) < limit:
        c = [rng.randrange(p) for _ in range(m)]
        if any(c):
            lead = next(x for x in c if x)
            inv = pow(lead, -1, p)
            seen.add(tuple(x * inv % p for x in c))
    return sorted(seen, key=lambda _: rng.random())


def construct_cuspidal(
    k: int,
    p: int,
    seed: int,
    n_rational_cusps: int | None = None,
    max_attempts: int = 60,
    budget: int = DEFAULT_POINT_BUDGET,
) -> Construction:
    """Build ``f = f1^3 + f2^2`` of degree 6k with 6k^2 rational cusps on Z(f1).

    f1 is a random degree-2k form with no rational singular point. For k = 1
    f2 is a cubic through six random rational points of Z(f1). For larger k
    not every point can be prescribed: f2 is made to pass through
    dim S_3k - dim S_k - 3 of them, and the remaining net of choices modulo
    (f1) is scanned for members meeting Z(f1) in 6k^2 rational points. A
    candidate is kept only when the intersection is transversal and the curve
    has no further rational singularity.
    """
    fld = GF(p)
    if p <= 3:
        raise PreconditionError("need p > 3")
    if (6 * k) % p == 0:
        raise PreconditionError(f"p={p} divides 6k={6 * k}")
    if k < 1:
        raise PreconditionError("k must be positive")
    _check_budget(p, budget)
    total = 6 * k * k
    target = total if n_rational_cusps is None else n_rational_cusps
    if not 0 < target <= total:
        raise PreconditionError(f"target cusp count must lie in [1, {total}]")
    # leave a net (3 free directions) of f2 modulo f1 when not every point can be prescribed
    room = monomial_count(3 * k) - monomial_count(k)
    n_free = total if room > total else room - 3
    rng = make_rng(seed, "construct_cuspidal", k, p)
    diagnostics = []
    f1 = None
    for attempt in range(1, max_attempts + 1):
        if f1 is None or attempt % 8 == 0:
            f1 = HomogeneousPoly.random(fld, 2 * k, rng)
            if f1.is_zero() or singular_points(f1, budget) or not is_squarefree(f1):
                diagnostics.append(f"attempt {attempt}: f1 singular at a rational point")
                f1 = None
                continue
            on_f1 = rational_points(f1, budget)
            if len(on_f1) < total:
                diagnostics.append(
                    f"attempt {attempt}: Z(f1) has only {len(on_f1)} rational points (< {total}); try a larger p"
                )
                f1 = None
                continue
            span = _multiples_span(f1, k)
        chosen = rng.sample(on_f1, n_free)
        kern = raw_kernel(eval_rows(chosen, 3 * k), monomial_count(3 * k), fld)
        # kern contains f1 * S_k; keep representatives of the quotient
        quotient = EchelonSpan(fld, monomial_count(3 * k))
        for v in span._rows.values():
            quotient.add(v)
        reps = [v for v in kern if quotient.add(v)]
        if not reps:
            diagnostics.append(f"attempt {attempt}: only multiples of f1 pass through the chosen points")
            continue
        multiples = list(span._rows.values())
        f2, inter = _pick_f2(fld, f1, reps, multiples, on_f1, total, rng, budget, diagnostics, attempt)
        if f2 is None:
            continue
        if len(inter) < target:
            continue
        f = f1**3 + f2**2
        provenance = {"f1": f1.to_json(), "f2": f2.to_json(), "seed": seed, "attempt": attempt}
        curve = CurveSpec(p, k, (f,), provenance)
        cusps = [SingularPoint.make(q, "cusp", classify_singularity(f, q).tangent) for q in sorted(inter)]
        return Construction(curve, cusps, attempt, diagnostics)
    raise ConstructionFailedError(
        f"no admissible f1^3 + f2^2 for k={k}, p={p}, seed={seed} after {max_attempts} attempts",
        diagnostics,
    )


# ---------------------------------------------------------------------------
# pullbacks along (g0 : g1 : g2)
# ---------------------------------------------------------------------------


def _normalise_rows(arr: np.ndarray, p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    inv[1:] = [pow(i, -1, p) for i in range(1, p)]
    a0, a1, a2 = arr[:, 0], arr[:, 1], arr[:, 2]
    s = np.where(a0 != 0, inv[a0], np.where(a1 != 0, inv[a1], inv[a2]))
    return arr * s[:, None] % p


def _keys(arr: np.ndarray, p: int) -> np.ndarray:
    return (arr[:, 0] * p + arr[:, 1]) * p + arr[:, 2]


def base_locus(maps, budget: int = DEFAULT_POINT_BUDGET):
    p = _prime_of(maps[0].field)
    _check_budget(p, budget)
    pts = plane_points_array(p)
    table = _PowerTable(pts, p, max(g.degree for g in maps))
    mask = np.ones(len(pts), dtype=bool)
    for g in maps:
        mask &= table.eval(g) == 0
    return _to_points(maps[0].field, pts[mask])


def pullback_points(g0, g1, g2, points, p: int | None = None, budget: int = DEFAULT_POINT_BUDGET):
    """All F_p-rational preimages of ``points`` under z -> (g0(z) : g1(z) : g2(z))."""
    maps = (g0, g1, g2)
    fld = g0.field
    if p is not None and fld.p != p:
        raise MalformedInputError("map and prime disagree")
    p = _prime_of(fld)
    if len({g.degree for g in maps}) != 1:
        raise InvalidMapError("map components must share a degree")
    _check_budget(p, budget)
    pts = plane_points_array(p)
    table = _PowerTable(pts, p, g0.degree)
    img = np.stack([table.eval(g) for g in maps], axis=1)
    zero = ~img.any(axis=1)
    if zero.any():
        bad = _to_points(fld, pts[zero])
        raise InvalidMapError(f"map has rational base points {bad[:5]}")
    img = _normalise_rows(img, p)
    targets = np.array([[int(x) for x in q.coords] for q in points], dtype=np.int64).reshape(-1, 3)
    hit = np.isin(_keys(img, p), _keys(targets, p))
    return _to_points(fld, pts[hit])


def power_map(field: Field, w: int, outer, inner):
    """Components of z -> outer . (x^w : y^w : z^w) . inner z, for 3x3 matrices."""
    lin = [HomogeneousPoly.linear(field, *row) for row in inner]
    powers = [g**w for g in lin]
    comps = []
    for row in outer:
        acc = HomogeneousPoly(field, w)
        for c, g in zip(row, powers):
            acc = acc + g.scale(c)
        comps.append(acc)
    return comps


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def dual_fermat_sextic(p: int) -> HomogeneousPoly:
    """Dual curve of x^3 + y^3 + z^3: a sextic with 9 cusps (rational when p = 1 mod 3)."""
    fld = GF(p)
    c = {}
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 6
        c[tuple(e)] = 1
    for i, j in ((0, 1), (1, 2), (0, 2)):
        e = [0, 0, 0]
        e[i] = e[j] = 3
        c[tuple(e)] = -2
    return HomogeneousPoly(fld, 6, c)


def lines_through(field: Field, lines) -> HomogeneousPoly:
    return product([HomogeneousPoly.linear(field, *l) for l in lines])


__all__ = [
    "CurveSpec",
    "Construction",
    "SingularPoint",
    "SingularityType",
    "base_locus",
    "classify_singularity",
    "construct_cuspidal",
    "dual_fermat_sextic",
    "is_squarefree",
    "local_expansion",
    "monomial_index",
    "plane_points_array",
    "power_map",
    "pullback_points",
    "rational_points",
    "singular_points",
    "vet_cuspidal_candidate",
]
