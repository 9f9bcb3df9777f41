from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cuspsyz.errors import DuplicatePointError, MalformedInputError
from cuspsyz.exact import GF, QQ
from cuspsyz.poly import (
    HomogeneousPoly,
    ProjPoint,
    eval_matrix,
    invert3,
    monomial_count,
    monomials,
    random_invertible,
)
from cuspsyz.rng import make_rng

X, Y, Z = sympy.symbols("x y z")


def to_sympy(f):
    return sum(sympy.Rational(c) * X**i * Y**j * Z**l for (i, j, l), c in f.coeffs.items())


def test_monomial_basis_size_and_order():
    for d in range(8):
        ms = monomials(d)
        assert len(ms) == monomial_count(d) == (d + 1) * (d + 2) // 2
        assert list(ms) == sorted(ms, reverse=True)
    assert monomial_count(-1) == 0


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**32))
def test_product_and_sum_match_sympy(d1, d2, seed):
    rng = make_rng(seed, "poly")
    f = HomogeneousPoly.random(QQ, d1, rng)
    g = HomogeneousPoly.random(QQ, d2, rng)
    assert sympy.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    h = HomogeneousPoly.random(QQ, d1, rng)
    assert sympy.expand(to_sympy(f + h) - to_sympy(f) - to_sympy(h)) == 0
    assert sympy.expand(to_sympy(f**2) - to_sympy(f) ** 2) == 0


@given(st.integers(1, 4), st.integers(0, 2**32))
def test_partials_match_sympy(d, seed):
    f = HomogeneousPoly.random(QQ, d, make_rng(seed, "partial"))
    for i, v in enumerate((X, Y, Z)):
        assert sympy.expand(to_sympy(f.partial(i)) - sympy.diff(to_sympy(f), v)) == 0


@given(st.integers(1, 3), st.integers(0, 2**32))
def test_transform_is_substitution(d, seed):
    rng = make_rng(seed, "transform")
    f = HomogeneousPoly.random(QQ, d, rng)
    M = [[QQ(rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
    lin = [M[i][0] * X + M[i][1] * Y + M[i][2] * Z for i in range(3)]
    expected = to_sympy(f).subs({X: lin[0], Y: lin[1], Z: lin[2]}, simultaneous=True)
    assert sympy.expand(to_sympy(f.transform(M)) - expected) == 0


def test_json_round_trip_and_validation():
    F = GF(31)
    f = HomogeneousPoly.random(F, 4, make_rng(1, "json"))
    assert HomogeneousPoly.from_json(F, f.to_json()) == f
    with pytest.raises(MalformedInputError):
        HomogeneousPoly.from_json(F, [[1, [1, 0, 0]], [1, [2, 0, 0]]])
    with pytest.raises(MalformedInputError):
        HomogeneousPoly.from_json(F, [[1, [1, -1, 1]]])


def test_points_are_normalised():
    F = GF(7)
    assert ProjPoint(F, [2, 4, 6]) == ProjPoint(F, [1, 2, 3])
    assert ProjPoint(QQ, [0, 2, 1]).coords == (0, 1, Fraction(1, 2))
    with pytest.raises(MalformedInputError):
        ProjPoint(F, [0, 7, 0])


def test_eval_matrix_rejects_duplicates():
    F = GF(7)
    with pytest.raises(DuplicatePointError):
        eval_matrix([ProjPoint(F, [1, 1, 1]), ProjPoint(F, [2, 2, 2])], 2)


def test_eval_matrix_rank_for_points_on_a_conic():
    pts = [ProjPoint(QQ, [1, t, t * t]) for t in range(6)]
    assert [eval_matrix(pts, d).rank() for d in range(4)] == [1, 3, 5, 6]


def test_invert3():
    F = GF(101)
    M = random_invertible(F, make_rng(2, "inv"))
    I = invert3(F, M)
    prod = [[sum(M[i][k] * I[k][j] for k in range(3)) % 101 for j in range(3)] for i in range(3)]
    assert prod == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
