from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bqke import closed_forms as cf
from bqke.closed_forms import (
    F_bruteforce,
    F_closed,
    HypothesisError,
    P120_C2_PRINTED,
    c2_closed,
    c_closed_qd,
    crt_residue,
    parity_poly,
    root_combination,
    series_oracle,
    solve_crt,
)


@pytest.mark.parametrize("N, r, value", [
    (1, 1, Fraction(0)),
    (2, 1, Fraction(-1, 16)),
    (4, 4, Fraction(-7, 16)),
])
def test_f_closed_examples(N, r, value):
    assert F_closed(N, r) == value


def test_f_closed_scaled_example():
    assert 720 * F_closed(12, 3) == 17875
    assert F_bruteforce(12, 3) == F_closed(12, 3)


@pytest.mark.parametrize("N, r, value", [(2, 1, Fraction(-1, 16)), (4, 1, Fraction(-1, 16)), (1, 1, 0)])
def test_f_bruteforce_examples(N, r, value):
    assert F_bruteforce(N, r) == value


def test_series_oracle_examples():
    assert series_oracle(2, 1, 4) == Fraction(-1, 16)
    assert series_oracle(4, 4, 4) == Fraction(-7, 16)
    # sum of 1/(1 - xi) over the nontrivial cube roots is 1
    assert series_oracle(3, 3, 1) == 1
    assert F_bruteforce(3, 3) == series_oracle(3, 3, 4)


@pytest.mark.parametrize("r, value", [(0, -251), (1, 19), (8, -36731)])
def test_parity_poly_examples(r, value):
    assert parity_poly(r) == value


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.integers(-100, 100))
def test_f_closed_is_periodic_and_matches_bruteforce(N, r):
    assert F_closed(N, r) == F_closed(N, r + N)
    assert F_closed(N, r) == F_bruteforce(N, r)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300))
def test_parity_congruence(N, r):
    r = (r - 1) % N + 1
    scaled = 720 * F_closed(N, r)
    assert scaled.denominator == 1
    assert (scaled.numerator - parity_poly(r)) % N == 0


def test_crt_examples():
    assert crt_residue("P48", 5).r == 32
    assert crt_residue("P120", 7).r == 30
    q = crt_residue("Q", 3, n=1)
    assert (q.N, q.r) == (12, 8)
    with pytest.raises(HypothesisError):
        solve_crt(4, 6)


@settings(max_examples=60)
@given(st.integers(1, 50), st.integers(1, 50), st.integers(-20, 20), st.integers(-20, 20))
def test_crt_solution_properties(m1, m2, t1, t2):
    import math

    if math.gcd(m1, m2) != 1:
        return
    res = solve_crt(m1, m2, t1, t2)
    assert 0 <= res.r < m1 * m2
    assert (res.r - t1) % m1 == 0 and (res.r - t2) % m2 == 0


def test_c2_closed_examples():
    assert c2_closed("P48", 1) == Fraction(-2097, 144)
    assert c2_closed("P120", 1) == Fraction(-265, 9) - 20 + Fraction(25, 18) - Fraction(1, 144)
    assert c2_closed("Pprime", 1, m=1) == Fraction(207, 144)


def test_printed_p120_classes_disagree_with_root_sums():
    # the classes 3 and 4 mod 5 only fit the root sums with the corrected coefficients
    for p in (13, 23, 43, 53):
        assert cf._quartic(P120_C2_PRINTED[3], p) != c2_closed("P120", p)
        res = crt_residue("P120", p)
        assert c2_closed("P120", p) == root_combination(res.N, res.r)
    for p in (19, 29, 49):
        assert cf._quartic(P120_C2_PRINTED[4], p) != c2_closed("P120", p)


def test_c_closed_qd_examples():
    assert c_closed_qd("Q", 1, 3) == Fraction(124555, 720)
    assert c_closed_qd("scalar", 1, 2) == Fraction(-1, 16)
    assert c_closed_qd("scalar", 1, 2) == -3 * F_closed(2, 2) - 2 * F_closed(2, 3)
    with pytest.raises(HypothesisError):
        c_closed_qd("Q", 1, 1)
    with pytest.raises(HypothesisError):
        c_closed_qd("Q", 1, 4)


def test_argument_errors():
    with pytest.raises(ValueError):
        F_closed(0, 1)
    with pytest.raises(ValueError):
        series_oracle(3, 4)
    with pytest.raises(ValueError):
        F_bruteforce(cf.BRUTEFORCE_CAP + 1, 1)
