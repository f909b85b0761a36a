from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from bqke.cyclotomic import (
    CyclotomicNumber,
    conjugate,
    cyclotomic_polynomial,
    embed,
    format_exact,
    invert,
    parse_exact,
    primitive_root,
    totient,
)


def zeta(n, k=1):
    return CyclotomicNumber.root_of_unity(n, k)


@pytest.mark.parametrize("n, expected", [
    (1, (-1, 1)),
    (8, (1, 0, 0, 0, 1)),
    (12, (1, 0, -1, 0, 1)),
])
def test_cyclotomic_polynomial_examples(n, expected):
    assert cyclotomic_polynomial(n) == expected


def test_cyclotomic_polynomial_degree_and_root():
    for n in range(1, 201):
        poly = cyclotomic_polynomial(n)
        assert len(poly) - 1 == totient(n)
        value = sum(c * zeta(n, i) for i, c in enumerate(poly))
        assert value.is_zero(), n


def test_primitive_root_examples():
    z4 = primitive_root(4, 1)
    assert embed(z4) == mpmath.mpc(0, 1)
    assert primitive_root(8, 3) == zeta(8) ** 3
    with pytest.raises(ValueError):
        primitive_root(6, 2)


def test_invert_examples():
    assert invert(zeta(8)) == zeta(8, 7)
    assert invert(1 - zeta(4)) == (1 + zeta(4)) / 2
    with pytest.raises(ZeroDivisionError):
        invert(CyclotomicNumber.rational(0, 4))


def test_conjugate_examples():
    assert conjugate(zeta(4)) == zeta(4, 3)
    q = CyclotomicNumber.rational(Fraction(3, 4))
    assert conjugate(q) == q
    r = zeta(8) + zeta(8, -1)
    assert conjugate(r) == r


def test_embed_examples():
    with mpmath.workdps(40):
        assert abs(embed(zeta(4), 30) - mpmath.mpc(0, 1)) < mpmath.mpf(10) ** -30
        assert abs(embed(zeta(8) + zeta(8, -1), 30) - mpmath.sqrt(2)) < mpmath.mpf(10) ** -30
    assert embed(CyclotomicNumber.rational(Fraction(3, 4)), 20) == mpmath.mpc(0.75, 0)


def test_embed_rejects_low_precision():
    with pytest.raises(ValueError):
        embed(zeta(3), 5)


def test_canonical_form_and_lifting():
    # zeta_6 = zeta_12^2 after lifting, and sums across conductors land in the lcm
    assert zeta(6).lift(12) == zeta(12, 2)
    s = zeta(4) + zeta(3)
    assert s.conductor == 12
    assert s == zeta(12, 3) + zeta(12, 4)
    assert len(s.coeffs) == totient(12)


def test_exact_round_trip():
    for z in (CyclotomicNumber.rational(Fraction(-425, 16)), zeta(8) / 3 + Fraction(1, 7)):
        assert parse_exact(format_exact(z)) == z
    assert format_exact(CyclotomicNumber.rational(Fraction(124555, 720))) == "24911/144"


conductors = st.sampled_from([1, 3, 4, 5, 8, 12, 15, 24])


@st.composite
def elements(draw):
    n = draw(conductors)
    coeffs = draw(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=20),
                           min_size=totient(n), max_size=totient(n)))
    return CyclotomicNumber(n, coeffs)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == 1


@settings(max_examples=40, deadline=None)
@given(elements(), elements())
def test_embedding_is_a_homomorphism(a, b):
    with mpmath.workdps(40):
        tol = mpmath.mpf(10) ** -20 * (1 + abs(embed(a, 30)) * abs(embed(b, 30)))
        assert abs(embed(a * b, 30) - embed(a, 30) * embed(b, 30)) < tol
        assert abs(embed(a + b, 30) - embed(a, 30) - embed(b, 30)) < tol
        assert abs(embed(conjugate(a), 30) - mpmath.conj(embed(a, 30))) < tol


@settings(max_examples=40, deadline=None)
@given(elements())
def test_abs2_is_real_and_nonnegative(a):
    m = a.abs2()
    assert m == m.conjugate()
    assert embed(m, 20).real >= 0
