"""Minimal graded free resolutions of ideals of points in the plane.

For a finite reduced point set the ideal I has a resolution
``0 -> sum S(-b_i) -> sum S(-a_i) -> S -> S/I -> 0``. It is computed one
degree at a time with exact linear algebra only. I_d is the kernel of the
evaluation map. Minimal generators in degree d complement S_1 * I_{d-1}.
Syzygies of the chosen generators in degree d form a kernel, and the minimal
ones complement S_1 * Syz_{d-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalError, InvalidMapError, MalformedInputError, PreconditionError
from .exact import EchelonSpan, GF, Field, _kernel_from_rref, _rref
from .poly import (
    HomogeneousPoly,
    ProjPoint,
    check_distinct,
    common_field,
    eval_matrix,
    eval_rows,
    invert3,
    monomial_count,
    monomial_index,
    monomials,
    random_invertible,
    shift_maps,
)
from .rng import make_rng


def B(s: int) -> int:
    """(s+1)(s+2)/2 as a polynomial in s (so B(-1) = B(-2) = 0, B(-3) = 1)."""
    return (s + 1) * (s + 2) // 2


def B_trunc(s: int) -> int:
    return monomial_count(s)


@dataclass(frozen=True)
class BettiData:
    a: tuple
    b: tuple
    point_count: int
    hilbert: tuple = ()
    certificate: tuple = ()  # (d, dim I_d, dim S1*I_{d-1}, dim Syz_d, dim S1*Syz_{d-1})

    def __init__(self, a, b, point_count=None, hilbert=(), certificate=()):
        a = tuple(sorted((int(x) for x in a), reverse=True))
        b = tuple(sorted((int(x) for x in b), reverse=True))
        if point_count is None:
            point_count = Fraction(sum(x * x for x in b) - sum(x * x for x in a), 2)
            if point_count.denominator != 1:
                raise MalformedInputError("sum b^2 - sum a^2 must be even")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "point_count", int(point_count))
        object.__setattr__(self, "hilbert", tuple(hilbert))
        object.__setattr__(self, "certificate", tuple(certificate))

    @property
    def t(self) -> int:
        return len(self.b)

    @property
    def D0(self) -> int:
        return self.a[-1]

    def hilbert_from_betti(self, d: int) -> int:
        """Truncated alternating sum; equals h_{S/I}(d) for every d >= 0."""
        return B_trunc(d) - sum(B_trunc(d - x) for x in self.a) + sum(B_trunc(d - x) for x in self.b)

    def hilbert_polynomial_at(self, d: int) -> int:
        """Same sum with the polynomial B; equals point_count identically."""
        return B(d) - sum(B(d - x) for x in self.a) + sum(B(d - x) for x in self.b)

    def violations(self) -> list:
        out = []
        a, b = self.a, self.b
        if len(a) != len(b) + 1:
            out.append("len(a) != len(b) + 1")
        if any(x <= 0 for x in a + b):
            out.append("nonpositive degree")
        if sum(a) != sum(b):
            out.append("sum a != sum b")
        if len(a) == len(b) + 1 and any(a[i] >= b[i] for i in range(len(b))):
            out.append("a_i >= b_i for some i")
        if 2 * self.point_count != sum(x * x for x in b) - sum(x * x for x in a):
            out.append("point count != (sum b^2 - sum a^2)/2")
        for d, h in enumerate(self.hilbert):
            if self.hilbert_from_betti(d) != h:
                out.append(f"Hilbert function mismatch at degree {d}")
                break
        return out

    def to_json(self):
        return {
            "a": list(self.a),
            "b": list(self.b),
            "t": self.t,
            "points": self.point_count,
            "hilbert": list(self.hilbert),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["a"], obj["b"], obj.get("points"), obj.get("hilbert", ()))
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad resolution record: {exc}") from exc


@dataclass(frozen=True)
class GradedPiece:
    degree: int
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)


def _prepare(points):
    points = list(points)
    check_distinct(points)
    return points, common_field(points)


def hilbert_function(points, d: int) -> int:
    return eval_matrix(points, d).rank()


def ideal_piece(points, d: int) -> GradedPiece:
    m = eval_matrix(points, d)
    fld = m.field
    red, piv = m.rref()
    kern = _kernel_from_rref(red, piv, m.ncols, fld)
    return GradedPiece(d, tuple(HomogeneousPoly.from_vector(fld, d, v) for v in kern))


def _times_monomial(vec, deg, mono, field_p, size):
    """Coefficient vector of mono * g in S_{deg + |mono|}, for g given by ``vec`` in S_deg."""
    idx = monomial_index(deg + sum(mono))
    out = [0] * size
    for c, e in zip(vec, monomials(deg)):
        if c:
            out[idx[(e[0] + mono[0], e[1] + mono[1], e[2] + mono[2])]] = c
    return out


def _shift(vec, smap, size, zero):
    out = [zero] * size
    for c, j in zip(vec, smap):
        if c:
            out[j] = c
    return out


def minimal_resolution(points) -> BettiData:
    """Betti degrees of the ideal of a nonempty set of distinct points."""
    points, fld = _prepare(points)
    N = len(points)
    if N == 0:
        raise PreconditionError("need at least one point")
    zero = fld.zero
    cap = N + 2
    hilbert = []
    cert = []
    gens = []  # (degree, coefficient vector)
    a_deg, b_deg = [], []
    prev_I = []
    prev_syz = []  # vectors in the block layout of degree d-1
    prev_layout = []  # list of (gen index, block degree) at d-1
    stable_at = None
    d = 0
    while True:
        if d > cap:
            raise InternalError(f"resolution did not stabilise by degree {cap}")
        n = monomial_count(d)
        red, piv = _rref(eval_rows(points, d), n, fld)
        hilbert.append(len(piv))
        I_d = _kernel_from_rref(red, piv, n, fld)

        prod_dim = 0
        if d >= 1 and I_d:
            span = EchelonSpan(fld, n)
            maps = shift_maps(d)
            for v in prev_I:
                for smap in maps:
                    span.add(_shift(v, smap, n, zero))
            prod_dim = span.dim
            new = [v for v in I_d if span.add(v)]
            if len(new) != len(I_d) - prod_dim:
                raise InternalError("generator count disagrees with dimension count")
            gens.extend((d, v) for v in new)
            a_deg.extend([d] * len(new))

        # syzygies among the chosen generators in degree d
        layout = [(gi, d - gd) for gi, (gd, _) in enumerate(gens) if d - gd >= 0]
        cols = []
        for gi, e in layout:
            gd, gv = gens[gi]
            for mono in monomials(e):
                cols.append(_times_monomial(gv, gd, mono, fld.p, n))
        ncols = len(cols)
        syz = []
        lift_dim = 0
        if ncols:
            rows = [[cols[j][i] for j in range(ncols)] for i in range(n)]
            red2, piv2 = _rref(rows, ncols, fld)
            syz = _kernel_from_rref(red2, piv2, ncols, fld)
            if syz:
                offsets = {}
                pos = 0
                for gi, e in layout:
                    offsets[gi] = (pos, e)
                    pos += monomial_count(e)
                lifted = EchelonSpan(fld, ncols)
                for s in prev_syz:
                    ppos = 0
                    blocks = []
                    for gi, e in prev_layout:
                        size = monomial_count(e)
                        blocks.append((gi, e, s[ppos : ppos + size]))
                        ppos += size
                    for var in range(3):
                        v = [zero] * ncols
                        for gi, e, blk in blocks:
                            start, e2 = offsets[gi]
                            smap = shift_maps(e2)[var]
                            for c, j in zip(blk, smap):
                                if c:
                                    v[start + j] = c
                        lifted.add(v)
                lift_dim = lifted.dim
                count = len(syz) - lift_dim
                b_deg.extend([d] * count)
        cert.append((d, len(I_d), prod_dim, len(syz), lift_dim))
        prev_I, prev_syz, prev_layout = I_d, syz, layout

        if stable_at is None and hilbert[-1] == N:
            stable_at = d
        if stable_at is not None and d >= stable_at + 2:
            break
        d += 1

    out = BettiData(a_deg, b_deg, N, hilbert, cert)
    bad = out.violations()
    if bad:
        raise InternalError(f"resolution invariants failed: {bad}")
    return out


# ---------------------------------------------------------------------------
# pulling back along degree-w maps
# ---------------------------------------------------------------------------


def _general_position(pts) -> bool:
    from .exact import raw_rank

    fld = pts[0].field
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for l in range(j + 1, len(pts)):
                if raw_rank([pts[i].coords, pts[j].coords, pts[l].coords], 3, fld) < 3:
                    return False
    return True


def _frame_matrix(fld: Field, pts):
    """Columns P with P e_i ~ pts[i] (i < 3) and P (1,1,1) ~ pts[3]."""
    cols = [list(q.coords) for q in pts[:3]]
    M = [[cols[j][i] for j in range(3)] for i in range(3)]
    lam = _solve3(fld, M, list(pts[3].coords))
    p = fld.p
    out = [[M[i][j] * lam[j] for j in range(3)] for i in range(3)]
    return out if p is None else [[x % p for x in r] for r in out]


def _solve3(fld, M, v):
    inv = invert3(fld, M)
    p = fld.p
    out = [sum(a * b for a, b in zip(row, v)) for row in inv]
    return out if p is None else [x % p for x in out]


def _matmul(fld, A, Bm):
    p = fld.p
    out = [[sum(A[i][l] * Bm[l][j] for l in range(3)) for j in range(3)] for i in range(3)]
    return out if p is None else [[x % p for x in r] for r in out]


def draw_power_map(points, w: int, fld: Field, rng):
    """z -> L((A z)^w) with L chosen so some of the targets pull back rationally.

    L^{-1} sends a frame built from up to four of the points to points whose
    coordinates are nonzero w-th powers, so their fibres under z -> z^w are
    rational; A is a random invertible matrix.
    """
    pts = list(points)
    rng.shuffle(pts)
    frame = []
    for q in pts:
        if len(frame) == 4:
            break
        if _general_position(frame + [q]):
            frame.append(q)
    while len(frame) < 4:
        q = ProjPoint(fld, [fld.random_element(rng) for _ in range(3)])
        if any(q.coords) and _general_position(frame + [q]):
            frame.append(q)
    while True:
        tg = [ProjPoint(fld, [pow(fld.random_element(rng, nonzero=True), w, fld.p) for _ in range(3)]) for _ in range(4)]
        if _general_position(tg):
            break
    T = _matmul(fld, _frame_matrix(fld, tg), invert3(fld, _frame_matrix(fld, frame)))
    L = invert3(fld, T)
    A = random_invertible(fld, rng)
    return tuple(_power_map(fld, w, L, A))


def _power_map(fld, w, L, A):
    from .geometry import power_map

    return power_map(fld, w, L, A)


def draw_generic_map(points, w: int, fld: Field, rng):
    return tuple(HomogeneousPoly.random(fld, w, rng) for _ in range(3))


MAP_FAMILIES = {"power": draw_power_map, "generic": draw_generic_map}


@dataclass
class ScaledCheckReport:
    w: int
    p: int
    expected_a: tuple
    expected_b: tuple
    trials: list = field(default_factory=list)

    @property
    def status(self) -> str:
        outcomes = [t["outcome"] for t in self.trials]
        if "mismatch" in outcomes:
            return "falsified"
        if "success" in outcomes:
            return "success"
        return "inconclusive"

    def to_json(self):
        return {
            "w": self.w,
            "p": self.p,
            "expected": {"a": list(self.expected_a), "b": list(self.expected_b)},
            "status": self.status,
            "trials": self.trials,
        }


def scaled_resolution_check(points, w: int, p: int, trials: int = 20, seed: int = 0, family="power", stop_on_success=True):
    """Pull the points back along random degree-w maps and compare resolutions.

    A draw counts only if it has no rational base point and the preimage has
    exactly w^2 * #points rational points; otherwise it is logged and skipped.
    """
    from .geometry import pullback_points

    points, fld = _prepare(points)
    if fld.p != p:
        raise MalformedInputError(f"points are not over GF({p})")
    if w < 1:
        raise PreconditionError("w >= 1")
    base = minimal_resolution(points)
    draw = MAP_FAMILIES[family] if isinstance(family, str) else family
    rep = ScaledCheckReport(w, p, tuple(w * x for x in base.a), tuple(w * x for x in base.b))
    N = len(points)
    for trial in range(trials):
        rng = make_rng(seed, "scaled", w, p, trial)
        maps = draw(points, w, fld, rng)
        try:
            pre = pullback_points(*maps, points)
        except InvalidMapError as exc:
            rep.trials.append({"trial": trial, "outcome": "rejected", "reason": str(exc)})
            continue
        if len(pre) != w * w * N:
            rep.trials.append(
                {"trial": trial, "outcome": "rejected", "reason": f"{len(pre)} rational preimages, need {w * w * N}"}
            )
            continue
        got = minimal_resolution(pre)
        ok = got.a == rep.expected_a and got.b == rep.expected_b
        rep.trials.append(
            {"trial": trial, "outcome": "success" if ok else "mismatch", "a": list(got.a), "b": list(got.b)}
        )
        if ok and stop_on_success:
            break
    return rep
