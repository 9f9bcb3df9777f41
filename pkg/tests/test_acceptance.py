"""Acceptance criteria, one test per reported line.

Every threshold below is pinned here and passed to the verify functions.
Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary by ``conftest.py``.
"""

from fractions import Fraction

import pytest

from cuspsyz import verify

# criterion 1
NINE_CUSP_PRIMES = (13, 31, 43)  # p = 1 mod 3, p >= 13
LIMIT_1 = 1.0
# criterion 2
K1_PRIMES = (31, 61, 101)
K1_SEEDS = range(5)
K2_PRIMES = (31, 101)
K2_SEEDS = range(2)
LIMIT_2 = 60.0
# criterion 3
DEFECT_SAMPLES = 200
DEFECT_PRIME = 101
DEFECT_SIZES = (1, 25)
LIMIT_3 = 120.0
# criterion 5
LINE_COUNTS = (2, 3, 4)
LINE_PRIME = 101
LIMIT_5 = 10.0
# criterion 6
R4_CUSP_CAP = 9
K1_TABLE = ((1, 6), (2, 8), (3, 9))
LIMIT_6 = 30.0
# criterion 7
LEMEXCL_K_MAX = 5
LEMEXCL_EXPECTED = ((1, 3),)
LIMIT_7 = 5.0
# criterion 8
SLOPE_K = 100
HALF_RANK_WINDOW = (Fraction(26, 10), Fraction(28, 10))
RANK_WINDOW = (Fraction(52, 10), Fraction(55, 10))
BISECTION_WIDTH = Fraction(1, 1000)
FORMULA_K_MAX = 50
LIMIT_8 = 5.0
# criterion 9
NON_STRONG_K = 1
NON_STRONG_CAP = 9
LIMIT_9 = 60.0
# criterion 10
SCALED_PRIME = 101
SCALED_W = 2
SCALED_TRIALS = 20
LIMIT_10 = 120.0

LINES = []


@pytest.fixture(scope="module")
def results():
    verify._SEEN.clear()
    out = []
    out += verify.criterion_1(primes=NINE_CUSP_PRIMES, limit=LIMIT_1)
    out += verify.criterion_2(primes=K1_PRIMES, seeds=K1_SEEDS, k2_primes=K2_PRIMES, k2_seeds=K2_SEEDS, limit=LIMIT_2)
    out += verify.criterion_3(samples=DEFECT_SAMPLES, p=DEFECT_PRIME, sizes=DEFECT_SIZES, limit=LIMIT_3)
    out += verify.criterion_4()
    out += verify.criterion_5(counts=LINE_COUNTS, p=LINE_PRIME, limit=LIMIT_5)
    out += verify.criterion_6(c_cap_r4=R4_CUSP_CAP, expected=K1_TABLE, limit=LIMIT_6)
    out += verify.criterion_7(k_max=LEMEXCL_K_MAX, expected=LEMEXCL_EXPECTED, limit=LIMIT_7)
    out += verify.criterion_8(
        k_slope=SLOPE_K,
        half_window=HALF_RANK_WINDOW,
        rank_window=RANK_WINDOW,
        width=BISECTION_WIDTH,
        k_formula=FORMULA_K_MAX,
        limit=LIMIT_8,
    )
    out += verify.criterion_9(c_cap=NON_STRONG_CAP, k=NON_STRONG_K, limit=LIMIT_9)
    out += verify.criterion_10(p=SCALED_PRIME, w=SCALED_W, trials=SCALED_TRIALS, limit=LIMIT_10)
    return {r.criterion: r for r in out}


def _check(results, key):
    r = results[key]
    line = r.line()
    LINES.append(line)
    print(line)
    assert r.passed, r.detail
    assert r.within_time, f"{r.seconds:.2f}s over the {r.limit}s limit"


@pytest.mark.parametrize("key", ["1", "2", "3", "4", "5", "6", "6n", "7", "8", "9a", "9b", "9c", "9d", "9e", "10"])
def test_criterion(results, key):
    _check(results, key)
