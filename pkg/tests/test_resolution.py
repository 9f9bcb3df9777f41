import itertools

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspsyz.errors import DuplicatePointError, MalformedInputError, PreconditionError
from cuspsyz.exact import GF, QQ
from cuspsyz.geometry import dual_fermat_sextic, singular_points
from cuspsyz.poly import HomogeneousPoly, ProjPoint, monomials, random_invertible
from cuspsyz.resolution import (
    B,
    BettiData,
    hilbert_function,
    ideal_piece,
    minimal_resolution,
    scaled_resolution_check,
)
from cuspsyz.rng import make_rng

X, Y, Z = sympy.symbols("x y z")


def qpts(triples):
    return [ProjPoint(QQ, t) for t in triples]


def oracle_betti(points):
    """Generator degrees from sympy products, syzygy degrees from the Hilbert series.

    The alternating sum 1 - sum t^a + sum t^b equals (1 - t)^3 times the
    Hilbert series, so once the a-degrees are known the b-degrees follow.
    """
    coords = [tuple(sympy.Rational(c) for c in q.coords) for q in points]

    def piece(d):
        ms = monomials(d)
        M = sympy.Matrix([[x**m[0] * y**m[1] * z**m[2] for m in ms] for x, y, z in coords])
        return [sum(c * X**m[0] * Y**m[1] * Z**m[2] for c, m in zip(v, ms)) for v in M.nullspace()], M.rank()

    def coeff_rank(polys, d):
        if not polys:
            return 0
        ms = monomials(d)
        rows = [[sympy.Poly(f, X, Y, Z).coeff_monomial(X**m[0] * Y**m[1] * Z**m[2]) for m in ms] for f in polys]
        return sympy.Matrix(rows).rank()

    # generators live in degrees at most one past the point where h reaches #points
    a, h = [], []
    prev = []
    d = 0
    while len(h) < 2 or h[-2] != len(points):
        I_d, rk = piece(d)
        h.append(rk)
        prod = [sympy.expand(v * g) for g in prev for v in (X, Y, Z)]
        a += [d] * (len(I_d) - coeff_rank(prod, d))
        prev = I_d
        d += 1
    top = d - 1
    hs = h + [h[-1]] * 4
    b = []
    for d in range(top + 4):
        c = sum(sympy.binomial(3, i) * (-1) ** i * (hs[d - i] if d - i >= 0 else 0) for i in range(4))
        nb = c - (1 if d == 0 else 0) + a.count(d)
        assert nb >= 0
        b += [d] * int(nb)
    return tuple(sorted(a, reverse=True)), tuple(sorted(b, reverse=True))


# known resolutions ---------------------------------------------------------


def test_single_point():
    r = minimal_resolution(qpts([(1, 2, 3)]))
    assert (r.a, r.b, r.point_count) == ((1, 1), (2,), 1)


def test_three_general_points():
    r = minimal_resolution(qpts([(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert (r.a, r.b) == ((2, 2, 2), (3, 3))


def test_six_points_on_a_conic():
    pts = qpts([(1, t, t * t) for t in range(6)])
    r = minimal_resolution(pts)
    assert (r.a, r.b) == ((3, 2), (5,))
    assert [hilbert_function(pts, d) for d in range(5)] == [1, 3, 5, 6, 6]
    assert ideal_piece(pts, 2).dim == 1


@pytest.mark.parametrize("p", [13, 31, 43])
def test_nine_cusps_of_dual_cubic(p):
    pts = [s.point for s in singular_points(dual_fermat_sextic(p))]
    r = minimal_resolution(pts)
    assert (r.a, r.b) == ((4, 4, 4, 3), (5, 5, 5))
    assert hilbert_function(pts, 2) == 6


def test_ideal_piece_small_cases():
    assert ideal_piece(qpts([(1, 0, 0), (0, 1, 0)]), 1).dim == 1
    assert ideal_piece(qpts([(1, 0, 0), (0, 1, 0), (0, 0, 1)]), 1).dim == 0
    pts = qpts([(1, 0, 0), (0, 1, 0)])
    line = ideal_piece(pts, 1).basis[0]
    assert all(line(q) == 0 for q in pts)


def test_errors():
    with pytest.raises(PreconditionError):
        minimal_resolution([])
    with pytest.raises(DuplicatePointError):
        minimal_resolution(qpts([(1, 1, 1), (2, 2, 2)]))
    with pytest.raises(MalformedInputError):
        BettiData((2, 2), (3,))  # 9 - 8 is odd


def test_json_round_trip():
    r = minimal_resolution(qpts([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]))
    assert list(r.to_json()) == ["a", "b", "t", "points", "hilbert"]
    assert BettiData.from_json(r.to_json()) == BettiData(r.a, r.b, r.point_count, r.hilbert)


# independent oracle ----------------------------------------------------------

SPECIAL = [
    [(1, t, t * t) for t in range(7)],  # seven on a conic
    [(1, t, 0) for t in range(4)] + [(0, 0, 1)],  # four on a line plus one
    [(1, t, 0) for t in range(5)],  # five collinear
    [(1, i, j) for i in range(3) for j in range(3)],  # 3x3 grid
    [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3)],
]


@pytest.mark.parametrize("triples", SPECIAL)
def test_matches_sympy_oracle_special_position(triples):
    pts = qpts(triples)
    r = minimal_resolution(pts)
    assert (r.a, r.b) == oracle_betti(pts)


@settings(max_examples=15)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 2)), min_size=1, max_size=8))
def test_matches_sympy_oracle_random(triples):
    pts = list(dict.fromkeys(ProjPoint(QQ, t) for t in triples))
    r = minimal_resolution(pts)
    assert (r.a, r.b) == oracle_betti(pts)


# invariants -------------------------------------------------------------------


def _random_points(seed, n, p=101):
    rng = make_rng(seed, "pts")
    F = GF(p)
    out = {}
    while len(out) < n:
        if rng.random() < 0.7:
            c = [rng.randrange(p) for _ in range(3)]
            if not any(c):
                continue
            q = ProjPoint(F, c)
        else:
            q = ProjPoint(F, [1, rng.randrange(3), rng.randrange(3)])  # special position
        out[q] = None
    return list(out)


@given(st.integers(0, 2**32), st.integers(1, 14))
def test_identities_and_hilbert_polynomial(seed, n):
    pts = _random_points(seed, n)
    r = minimal_resolution(pts)
    assert r.violations() == []
    assert r.point_count == n
    assert sum(r.a) == sum(r.b)
    for d in range(max(r.b) - 2, max(r.b) + 4):
        assert r.hilbert_polynomial_at(d) == n
    for d in range(max(r.b) + 3):
        assert r.hilbert_from_betti(d) == hilbert_function(pts, d)


@given(st.integers(0, 2**32), st.integers(1, 12), st.randoms(use_true_random=False))
def test_order_independence(seed, n, rnd):
    pts = _random_points(seed, n)
    r = minimal_resolution(pts)
    rnd.shuffle(pts)
    r2 = minimal_resolution(pts)
    assert (r2.a, r2.b) == (r.a, r.b)


@given(st.integers(0, 2**32), st.integers(1, 12))
def test_invariant_under_linear_change(seed, n):
    F = GF(101)
    pts = _random_points(seed, n)
    M = random_invertible(F, make_rng(seed, "lin"))
    moved = [q.transform(M) for q in pts]
    r1, r2 = minimal_resolution(pts), minimal_resolution(moved)
    assert (r1.a, r1.b) == (r2.a, r2.b)


def test_B_polynomial_values():
    assert [B(s) for s in (-3, -2, -1, 0, 1, 2)] == [1, 0, 0, 1, 3, 6]


# scaled check -----------------------------------------------------------------


def three_points(p):
    F = GF(p)
    return [ProjPoint(F, c) for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]


def test_scaled_w1_is_identity():
    rep = scaled_resolution_check(three_points(101), 1, 101, trials=3)
    assert rep.status == "success"
    assert rep.expected_a == (2, 2, 2)


def test_scaled_w2_three_points():
    rep = scaled_resolution_check(three_points(101), 2, 101, trials=20, seed=1)
    assert rep.status == "success"
    ok = [t for t in rep.trials if t["outcome"] == "success"][0]
    assert (tuple(ok["a"]), tuple(ok["b"])) == ((4, 4, 4), (6, 6))


def test_scaled_w2_six_on_conic():
    F = GF(101)
    pts = [ProjPoint(F, [1, t, t * t]) for t in range(1, 7)]
    rep = scaled_resolution_check(pts, 2, 101, trials=200, seed=2)
    assert rep.status == "success"
    assert (rep.expected_a, rep.expected_b) == ((6, 4), (10,))


def test_base_point_draws_are_rejected():
    def with_base_point(points, w, fld, rng):
        x, y, z = (HomogeneousPoly.variable(fld, i) for i in range(3))
        return x * x, x * y, x * z

    rep = scaled_resolution_check(three_points(31), 2, 31, trials=2, family=with_base_point)
    assert rep.status == "inconclusive"
    assert all(t["outcome"] == "rejected" for t in rep.trials)


def test_generic_draws_may_be_inconclusive_but_never_falsify():
    rep = scaled_resolution_check(three_points(31), 2, 31, trials=3, family="generic")
    assert rep.status in ("success", "inconclusive")


def test_wrong_field_rejected():
    with pytest.raises(MalformedInputError):
        scaled_resolution_check(three_points(31), 2, 101)
