import itertools
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspsyz.errors import MalformedInputError, PreconditionError, ResourceBudgetError
from cuspsyz.exact import Surd73
from cuspsyz.sequences import (
    B,
    AdmissibleSeq,
    ConstraintState,
    asymptotic_min_cusps,
    case2_min_value,
    case3_min_value,
    cusp_bound,
    cusp_ideal_witness,
    d0_min,
    enumerate_admissible,
    enumerate_strongly_admissible,
    enumerated_min_cusps,
    g_bound,
    h2a_plus_one_variant,
    is_admissible,
    is_reduced,
    is_strongly_admissible,
    langer_bound,
    langer_floor,
    lemexcl_scan,
    limit_slope,
    m_of,
    min_cusps_ceil,
    min_cusps_formula,
    non_strong_reduction,
    reduce,
    shape_of,
    strong_normal_form,
    strong_normal_form_trace,
)

R73 = sympy.sqrt(73)


def surd_to_sympy(x):
    return sympy.Rational(x.u) + sympy.Rational(x.v) * sympy.sqrt(x.d)


# cusp bounds -----------------------------------------------------------------


def test_langer_values():
    assert langer_floor(6) == 9
    assert langer_floor(12) == 40
    assert langer_floor(0) == 0
    for d in range(1, 60):
        exact = (125 + R73) / 432 * d**2 - (511 + 11 * R73) / 1752 * d
        assert sympy.floor(exact) == langer_floor(d)
        assert sympy.simplify(surd_to_sympy(langer_bound(d)) - exact) == 0


def test_cusp_bound_modes():
    assert cusp_bound(6) == 9
    assert cusp_bound(1) == 0  # clamped
    assert cusp_bound(6, "miyaoka") == 9  # (45 - 9)/4
    assert cusp_bound(12, "miyaoka") == (45 * 4 - 18) // 4
    assert cusp_bound(6, "none") is None


def test_m_of():
    assert m_of(6) == 3
    assert m_of(12) == 7
    assert m_of(1) == 0


# admissibility -----------------------------------------------------------------


def test_admissibility_examples():
    nine = AdmissibleSeq(1, 3, (4, 4, 4, 3), (5, 5, 5))
    rep = is_admissible(nine)
    assert rep.admissible and rep.strong and rep.reduced
    conic = AdmissibleSeq(1, 1, (3, 2), (5,))
    assert conic.c_value == 6 and is_strongly_admissible(conic) and is_reduced(conic)
    bad = is_admissible(AdmissibleSeq(1, 2, (3, 3, 2), (5, 5)))
    assert not bad.admissible and not bad.clauses["sum"]


def test_non_descending_input_is_malformed():
    with pytest.raises(MalformedInputError):
        is_admissible(AdmissibleSeq(1, 1, (2, 3), (5,)))


def test_reduce_examples():
    assert reduce(AdmissibleSeq(1, 1, (4, 4, 3), (5, 4))) == AdmissibleSeq(1, 1, (4, 3), (5,))
    s = AdmissibleSeq(1, 1, (4, 3), (5,))
    assert reduce(s) == s
    big = AdmissibleSeq(1, 1, (5, 4, 4, 3), (5, 5, 4))
    assert reduce(big) == AdmissibleSeq(1, 1, (4, 3), (5,))
    assert reduce(big).c_value == big.c_value


@st.composite
def unreduced_sequences(draw):
    """A sequence over k = 1 or 2 with extra cancelling pairs mixed in."""
    k = draw(st.integers(1, 2))
    base = draw(st.sampled_from(list(enumerate_admissible(k, 0, None, strong=False, budget_nodes=None))[:400]))
    extra = draw(st.lists(st.integers(1, 5 * k), max_size=3))
    a = sorted(base.a + tuple(x for x in extra if x > base.D0), reverse=True)
    b = sorted(base.b + tuple(x for x in extra if x > base.D0), reverse=True)
    return AdmissibleSeq(k, draw(st.integers(0, 2)), a, b)


@settings(max_examples=80)
@given(unreduced_sequences())
def test_reduce_preserves_c_and_clauses(seq):
    red = reduce(seq)
    assert red.c_value == seq.c_value
    assert is_reduced(red)
    assert reduce(red) == red
    before, after = is_admissible(seq).clauses, is_admissible(red).clauses
    for name in ("sum", "lowest_degree", "cusp_count", "b_le_5k"):
        assert before[name] == after[name]
    if before["a_lt_b"]:
        assert after["a_lt_b"]
    if before["rank"] and 5 * seq.k not in seq.a:
        assert after["rank"]


# normal forms -----------------------------------------------------------------


def test_normal_form_fixed_points():
    nine = AdmissibleSeq(1, 3, (4, 4, 4, 3), (5, 5, 5))
    assert shape_of(nine) == 1 and strong_normal_form(nine) == nine
    s = AdmissibleSeq(1, 2, (4, 3, 3), (5, 5))
    assert is_strongly_admissible(s)
    out = strong_normal_form(s)
    assert out.b == (5, 5) and shape_of(out) == 2


def test_normal_form_preconditions():
    with pytest.raises(PreconditionError):
        strong_normal_form(AdmissibleSeq(1, 2, (4, 4, 2), (5, 5)))  # c = 7 > 3 D0
    with pytest.raises(PreconditionError):
        strong_normal_form(AdmissibleSeq(1, 0, (2, 2, 2), (3, 3)))


def _all_strong(k, r_max):
    out = []
    for r in range(1, r_max + 1):
        out += list(enumerate_strongly_admissible(k, r, None, mode="none", budget_nodes=None))
    return out


STRONG_K12 = _all_strong(1, 4) + _all_strong(2, 3)


@pytest.mark.parametrize("mode", ["langer", "none"])
def test_normal_form_properties_exhaustive(mode):
    checked = 0
    for s in STRONG_K12:
        if not is_strongly_admissible(s, mode):
            continue
        tr = strong_normal_form_trace(s, mode)
        out = tr.result
        assert (out.k, out.r, out.D0) == (s.k, s.r, s.D0)
        assert out.c_value <= s.c_value
        assert is_strongly_admissible(out, mode)
        assert shape_of(out) is not None
        assert len(tr.steps) <= sum(s.b)
        assert strong_normal_form(out, mode) == out
        checked += 1
    assert checked > 50


# closed forms -----------------------------------------------------------------


def test_min_cusps_examples():
    assert min_cusps_ceil(1, 1) == 6
    assert min_cusps_ceil(1, 2) == 8
    assert min_cusps_ceil(1, 3) == 9
    assert min_cusps_ceil(2, 1) == 24
    assert min_cusps_ceil(1, 4) == 9


def test_min_cusps_matches_sympy():
    for k in range(1, 8):
        for r in range(1, 6):
            f = min_cusps_formula(k, r)
            rad = -(r**2) + 4 * k * r + 1 - 4 * k + 4 * k * k
            if rad < 0:
                assert f is None and d0_min(k, r) is None
                continue
            exact = sympy.Rational(3 * k, 2) * (r - 1 + 2 * k + sympy.sqrt(rad))
            assert sympy.simplify(surd_to_sympy(f) - exact) == 0
            assert f.ceil() == sympy.ceiling(exact)
            d0 = sympy.Rational(1, 2) * (2 * k - 1 + r + sympy.sqrt(rad))
            assert sympy.simplify(surd_to_sympy(d0_min(k, r)) - d0) == 0


def test_conic_family_is_6k_squared():
    for k in range(1, 51):
        assert min_cusps_formula(k, 1) == 6 * k * k


def test_case_formulas():
    for k in range(1, 10):
        for r in range(1, 6):
            assert case2_min_value(k, r) == Fraction(1 - 10 * k + 10 * r * k + 25 * k * k - r * r, 4)
            assert case3_min_value(k, r) == Fraction(25 * k * k + 2 * r * k - 10 * k - r * r + 1, 4)


def test_asymptotic_expansion():
    # the next term is of order r^3 / k; C = r^3 covers it generously for r <= 5
    for r in range(1, 6):
        for k in range(10, 101):
            gap = abs(surd_to_sympy(min_cusps_formula(k, r)) - asymptotic_min_cusps(k, r))
            assert gap <= sympy.Rational(r**3, k)


# enumeration -----------------------------------------------------------------


def naive_sequences(k, r, strong, c_cap=None, mode="langer"):
    """Brute force over every pair of descending tuples within the degree bounds."""
    M = cusp_bound(6 * k, mode)
    out = []
    for t in range(0, 5 * k):
        for b in itertools.combinations_with_replacement(range(5 * k, 0, -1), t):
            for a in itertools.combinations_with_replacement(range(5 * k - 1, 0, -1), t + 1):
                if sum(a) != sum(b) or any(a[i] >= b[i] for i in range(t)):
                    continue
                if sum(1 for x in b if x == 5 * k) < r or set(a) & set(b):
                    continue
                c = Fraction(sum(x * x for x in b) - sum(x * x for x in a), 2)
                lim = 3 * k * a[-1] if M is None else min(M, 3 * k * a[-1])
                if c > lim or (c_cap is not None and c > c_cap):
                    continue
                if strong and any(a[i] > b[i + 1] for i in range(t - 1)):
                    continue
                out.append((t, b, a))
    return sorted(out)


@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("strong", [True, False])
def test_enumeration_matches_brute_force_k1(r, strong):
    got = [(s.t, s.b, s.a) for s in enumerate_admissible(1, r, None, strong=strong)]
    assert got == naive_sequences(1, r, strong)


def test_enumeration_matches_brute_force_k1_without_bound():
    got = [(s.t, s.b, s.a) for s in enumerate_admissible(1, 4, None, strong=True, mode="none")]
    assert got == naive_sequences(1, 4, True, mode="none")


def test_enumeration_examples():
    assert list(enumerate_strongly_admissible(1, 4, 9)) == []
    assert list(enumerate_strongly_admissible(1, 1, 5)) == []
    assert min(s.c_value for s in enumerate_strongly_admissible(1, 1, 6)) == 6
    assert AdmissibleSeq(1, 3, (4, 4, 4, 3), (5, 5, 5)) in list(enumerate_strongly_admissible(1, 3, 9))


def test_small_rank_table_k1():
    assert [enumerated_min_cusps(1, r) for r in (1, 2, 3, 4)] == [6, 8, 9, None]
    assert enumerated_min_cusps(1, 4, mode="none") == 10


def test_rank_bounded_by_m6_at_k1():
    for r in range(1, 6):
        for s in enumerate_strongly_admissible(1, r, None):
            assert sum(1 for x in s.b if x == 5) <= m_of(6)


def test_enumeration_budget_reports_partial():
    with pytest.raises(ResourceBudgetError) as err:
        list(enumerate_admissible(2, 0, None, strong=False, budget_nodes=50))
    assert err.value.partial is not None


def test_enumeration_parallel_matches_serial():
    serial = list(enumerate_admissible(2, 1, None))
    assert list(enumerate_admissible(2, 1, None, jobs=2)) == serial


def test_lemexcl_scan():
    assert lemexcl_scan(5) == [(1, 3)]
    assert 5 * 3 * 1 - Fraction(3 * 4, 2) == 9 <= cusp_bound(6)
    assert all(k != 2 for k, _ in lemexcl_scan(5))


# g bound -----------------------------------------------------------------------


def g_sympy(k):
    alpha = (
        3325734 - 14454 * R73 + (-11766432 + 287328 * R73) * k + (12267358 - 564874 * R73) * k**2
    )
    return (-219 - 33 * R73 + (9125 + 73 * R73) * k - sympy.sqrt(alpha)) / 2628


def test_g_bound_against_sympy():
    for k in (1, 2, 3, 7, 20, 100):
        g = g_bound(k)
        val = g_sympy(k)
        lo, hi = (surd_to_sympy(x) for x in g.half_rank)
        assert lo <= val <= hi
        assert hi - lo <= sympy.Rational(1, 1000)
        assert g.half_rank_floor == sympy.floor(val)
        assert g.rank_floor == sympy.floor(2 * val)


def test_g_bound_k2():
    g = g_bound(2)
    assert g.half_rank_floor == 5
    assert abs(float(g_sympy(2)) - 5.79) < 0.01


def test_g_floors_monotone():
    prev = (-1, -1)
    for k in range(1, 101):
        g = g_bound(k)
        assert g.half_rank_floor >= prev[0] and g.rank_floor >= prev[1]
        assert g.rank[0] == 2 * g.half_rank[0]
        prev = (g.half_rank_floor, g.rank_floor)


def test_limit_slope():
    half, rank = limit_slope()
    exact = (125 + R73 - sympy.sqrt(2302 - 106 * R73)) / 36
    assert surd_to_sympy(half[0]) <= exact <= surd_to_sympy(half[1])
    assert 2.67 < float(exact) < 2.68
    assert surd_to_sympy(rank[0]) <= 2 * exact <= surd_to_sympy(rank[1])


# constraint system ---------------------------------------------------------------

k, r, A, D0, D1, D2, s = sympy.symbols("k r A D0 D1 D2 s")


def Bs(x):
    return (x + 1) * (x + 2) / sympy.Integer(2)


H2A = D2 * s + D0**2 / 2 + D0 / 2 - D2 * (D0 - 1)
H2A_PLUS_ONE = D2 * s + D0**2 / 2 + D0 / 2 - D2 * (D0 + 1)
H2B = D2 * s + (D1 - D1**2) / 2 + D1 * A - D2 * (A - 1)
H3 = (D1 - D2) * s + (D1 - D2) * (1 - A)
HC = D1 * s - D1 * (D1 - 3) / 2


def test_h2b_is_hC_minus_h3():
    assert sympy.expand(H2B - (HC - H3)) == 0


def test_h2a_from_its_defining_sum():
    defining = Bs(s) - Bs(s - D0) + (D0 - D2) * (Bs(s - D0 - 1) - Bs(s - D0))
    assert sympy.expand(defining - H2A) == 0
    assert sympy.expand(defining - H2A_PLUS_ONE) != 0


def test_h2a_closed_form_in_code():
    for vals in itertools.product(range(1, 5), range(1, 5), range(-2, 6)):
        d0, d2, x = vals
        st_ = ConstraintState(1, 1, 4, d0, d2, d2, 0, 1, 0)
        assert st_.h2a()(x) == B(x) - B(x - d0) + (d0 - d2) * (B(x - d0 - 1) - B(x - d0))
        assert h2a_plus_one_variant(st_)(x) == st_.h2a()(x) - 2 * d2


def test_h2a_h2b_locus_factorisation():
    sub = {D1: D0, A: 5 * k + r - 1 - D2}
    diff = sympy.expand((H2A - H2B).subs(sub))
    assert sympy.expand(diff - (D0 - D2) * (D0 + 1 - r - 5 * k + D2)) == 0
    with_d1 = (D0 - D2) * (D0 + 1 - r - 5 * k + D1)
    assert sympy.expand(diff - with_d1.subs(sub)) != 0


def test_h1_closed_form_matches_its_sequence():
    # w = r - 1 and i0 = D2 + A + 1 - 5k: the optimised head of the sequence
    for kk in (1, 2, 3):
        for rr in range(1, 5 * kk):
            for AA in range(rr, 5 * kk):
                for dd2 in range(rr, 5 * kk):
                    i0 = dd2 + AA + 1 - 5 * kk
                    if i0 < rr:
                        continue
                    st_ = ConstraintState(kk, rr, AA, dd2, dd2, dd2, rr - 1, i0, 0)
                    a, b, _, _ = st_.sequences()
                    assert sum(b[i] - a[i] for i in range(i0)) == dd2
                    for x in (-2, 0, AA - 1, 3 * AA):
                        direct = sum(B(x - b[i]) - B(x - a[i]) for i in range(i0))
                        assert st_.h1()(x) == direct


def test_D2_equal_r_branch():
    for kk in range(1, 7):
        for rr in range(1, 5 * kk):
            for d0 in range(rr, 5 * kk):
                st_ = ConstraintState(kk, rr, 5 * kk - 1, d0, d0, rr, rr - 1, rr, d0 - rr)
                x = st_.A - 1
                total = st_.h1()(x) + st_.h2b()(x)
                assert total == 5 * kk * d0 - Fraction(d0 * (d0 + 1), 2)
                assert (total <= 3 * kk * d0) == (d0 >= 4 * kk - 1)
                if total <= 3 * kk * d0 and total <= Fraction(45 * kk * kk - 9 * kk, 4):
                    assert kk == 1 and d0 >= 3


def test_cusp_ideal_witness_and_reduction_errors():
    strong = AdmissibleSeq(1, 1, (3, 2), (5,))
    with pytest.raises(PreconditionError):
        non_strong_reduction(strong)
    bad = AdmissibleSeq(1, 1, (4, 2, 2), (5, 3))
    assert is_admissible(bad).admissible and not is_admissible(bad).strong
    assert cusp_ideal_witness(bad) is None
    with pytest.raises(PreconditionError):
        non_strong_reduction(bad)


def test_non_strong_k1_literal_claim_has_a_counterexample():
    # c = 5 but every strongly admissible sequence of rank 2 has c >= 6
    bad = AdmissibleSeq(1, 1, (4, 2, 2), (5, 3))
    assert bad.c_value == 5
    assert min(x.c_value for x in enumerate_strongly_admissible(1, 1, None)) == 6


def test_non_strong_reduction_on_feasible_instances():
    feasible = []
    for kk in (1, 2):
        for rr in range(0, 4):
            for seq in enumerate_admissible(kk, rr, cusp_bound(6 * kk), strong=False):
                if not is_admissible(seq).strong and cusp_ideal_witness(seq) is not None:
                    feasible.append(seq)
    assert feasible
    for seq in feasible:
        out = non_strong_reduction(seq)
        best = min(x.c_value for x in enumerate_strongly_admissible(seq.k, seq.r, None))
        assert is_strongly_admissible(out) and out.r == seq.r
        assert out.c_value == best <= seq.c_value
