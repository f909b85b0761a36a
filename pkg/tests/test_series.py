import random
from fractions import Fraction

import pytest

from bqke.cyclotomic import CyclotomicNumber
from bqke.groups import CapExceeded, GroupSpec, UnitaryMatrix, enumerate_elements
from bqke.obstruction import compute_c
from bqke.series import (
    Poly,
    RationalFunctionQx,
    det_A,
    f_rational,
    ke_identity_check,
    ke_residual,
    laurent_at_one,
    phi_rational,
)

R = RationalFunctionQx


def test_phi_rational_examples():
    assert phi_rational(GroupSpec("trivial")) == R.term(1, 1, 3, 1)
    z2 = phi_rational(GroupSpec("trivial", p=2))
    assert z2 == R.term(1, 1, 3, 1) + R.term(1, -1, 3, 1)
    assert phi_rational(GroupSpec("Q", n=1))(0) == 8


def test_det_a_examples():
    ident = UnitaryMatrix.identity(4)
    assert det_A(ident, ident, ident) == R.constant(1, 4)
    X = UnitaryMatrix.of([[0, 1], [-1, 0]], 4)
    expected = R(Poly([0, 4 * X.e21.conjugate() * X.e12.conjugate()], 4), {}, 4)
    assert det_A(ident, ident, X) == expected


def test_det_a_pole_order_at_most_two():
    elements = [e.matrix for e in enumerate_elements(GroupSpec("Q", n=1, p=3))]
    rng = random.Random(7)
    for _ in range(40):
        triple = [rng.choice(elements) for _ in range(3)]
        coeffs = laurent_at_one(det_A(*triple), -6, 0)
        assert coeffs.pole_order() <= 2


def test_f_rational_trivial():
    assert f_rational(GroupSpec("trivial")) == R.term(1, 1, 12, 1)


def test_triple_route_matches_columns():
    for spec in (GroupSpec("trivial", p=2), GroupSpec("Q", n=1)):
        assert f_rational(spec, route="triple") == f_rational(spec)


def test_laurent_at_one_examples():
    c = laurent_at_one(R.term(1, 1, 3, 1), -5, 2)
    assert c[-3] == -1
    assert c.nonzero_orders() == [-3]
    alpha = CyclotomicNumber.root_of_unity(5)
    c = laurent_at_one(R.term(1, alpha, 1, 5), -2, 0)
    assert c[0] == (1 - alpha).inverse()
    assert c[-1].is_zero()
    partial = R(Poly([0, 1], 1), {1: 1, -1: 1}, 1)  # x / ((1 - x)(1 + x))
    assert laurent_at_one(partial, -2, 0)[-1] == Fraction(-1, 2)


def test_ke_residual_examples():
    assert not ke_residual(GroupSpec("trivial")).nonzero_orders()
    z2 = ke_residual(GroupSpec("trivial", p=2))
    assert z2[-8] == Fraction(-1, 16)
    assert all(z2[k].is_zero() for k in range(-12, -8))
    q1 = ke_residual(GroupSpec("Q", n=1))
    assert q1[-8] == Fraction(-425, 16)
    assert q1.pole_order() == 8


@pytest.mark.parametrize("spec", [GroupSpec("D", m=3, n=1), GroupSpec("Pprime", m=1), GroupSpec("Q", n=2, p=5)])
def test_ke_residual_matches_compute_c(spec):
    assert ke_residual(spec, check=False)[-8] == compute_c(spec).c_exact


def test_ke_identity_check_examples():
    assert ke_identity_check(GroupSpec("trivial"))
    assert not ke_identity_check(GroupSpec("trivial", p=2))
    assert not ke_identity_check(GroupSpec("Q", n=1))


def test_series_cap():
    with pytest.raises(CapExceeded):
        phi_rational(GroupSpec("P120", p=7), series_cap=200)
    with pytest.raises(CapExceeded):
        ke_residual(GroupSpec("P48", p=5))


def test_rational_function_arithmetic():
    a = R.term(2, 1, 2, 1)
    b = R.term(Fraction(1, 3), -1, 1, 1)
    assert (a + b) - b == a
    assert (a * b)(Fraction(1, 2)) == a(Fraction(1, 2)) * b(Fraction(1, 2))
    assert a**2 == a * a
