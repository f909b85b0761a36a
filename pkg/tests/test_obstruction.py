import math
from fractions import Fraction

import mpmath
import pytest

from bqke.cyclotomic import CyclotomicNumber, embed
from bqke.groups import GroupSpec, UnitaryMatrix, enumerate_elements
from bqke.obstruction import (
    PoleError,
    UnsupportedFamily,
    c1_bound,
    c1_bound_check,
    compute_c,
    derive_threshold,
    parity_certificate,
    psi,
    psi_float,
    split_c1_c2,
    threshold,
)


def test_psi_examples():
    assert psi(UnitaryMatrix.of([[-1, 0], [0, -1]], 1)) == Fraction(-1, 16)
    assert psi(UnitaryMatrix.of([[0, 1], [-1, 0]], 1)) == -7
    with pytest.raises(PoleError):
        psi(UnitaryMatrix.identity(4))


def _float_c(spec):
    """C by summing psi in double precision over the enumerated group."""
    total = 0j
    for e in enumerate_elements(spec)[1:]:
        total += psi_float(*(complex(embed(x, 20)) for x in e.matrix.entries()))
    return total


@pytest.mark.parametrize("spec", [
    GroupSpec("Q", n=2, p=3), GroupSpec("D", m=3, n=1, p=5), GroupSpec("P48"), GroupSpec("Pprime", m=1, p=5),
])
def test_exact_c_matches_floating_point_sum(spec):
    exact = complex(embed(compute_c(spec).c_exact, 20))
    approx = _float_c(spec)
    assert abs(exact - approx) <= 1e-8 * max(1.0, abs(exact))


@pytest.mark.parametrize("spec, value", [
    (GroupSpec("trivial"), Fraction(0)),
    (GroupSpec("trivial", p=2), Fraction(-1, 16)),
    (GroupSpec("Q", n=1), Fraction(-425, 16)),
    (GroupSpec("Q", n=1, p=3), Fraction(124555, 720)),
])
def test_compute_c_exact_examples(spec, value):
    assert compute_c(spec).c_rational() == value


def test_compute_c_verdicts():
    assert compute_c(GroupSpec("trivial")).verdict == "KE_possible"
    assert compute_c(GroupSpec("Q", n=1, p=3)).verdict == "Obstructed_by_C"
    assert compute_c(GroupSpec("Q", n=1)).verdict == "Obstructed_by_both"


@pytest.mark.parametrize("spec, value", [
    (GroupSpec("P48"), -5968.348737366),
    (GroupSpec("P120", p=7), 179826.7366816),
])
def test_compute_c_reference_values(spec, value):
    report = compute_c(spec)
    assert float(report.c_float.real) == pytest.approx(value, rel=1e-12)
    assert report.c_exact == report.c_exact.conjugate()
    assert report.c_exact == report.c1 + report.c2


@pytest.mark.parametrize("spec", [
    GroupSpec("P48", p=5), GroupSpec("P120", p=7), GroupSpec("Pprime", m=2, p=5), GroupSpec("Q", n=3, p=5),
    GroupSpec("D", m=2, n=2, p=7),
])
def test_coset_route_matches_direct(spec):
    assert split_c1_c2(spec, "coset", families=None) == split_c1_c2(spec, "direct", families=None)


def test_split_examples():
    s = split_c1_c2(GroupSpec("P48"))
    assert s.c2 == Fraction(-2097, 144)
    assert s.unit_corner_count == 8
    s = split_c1_c2(GroupSpec("Pprime", m=1))
    assert s.c2 == Fraction(207, 144)
    with pytest.raises(UnsupportedFamily):
        split_c1_c2(GroupSpec("Q", n=1))


def test_c_is_independent_of_root_choices():
    base = compute_c(GroupSpec("P48", p=5)).c_exact
    for kw in ({"root_a": 3}, {"root_u": 2}, {"root_a": 5, "root_u": 4}):
        assert compute_c(GroupSpec("P48", p=5, **kw)).c_exact == base


def test_parity_examples():
    rec = parity_certificate(GroupSpec("Q", n=1, p=3))
    assert rec.value_720c == 124555 and rec.odd
    assert (rec.residue, rec.modulus) == (7, 12)
    assert rec.residue == rec.predicted_residue
    rec = parity_certificate(GroupSpec("Q", n=1))
    assert rec.value_720c == -19125 and rec.odd
    rec = parity_certificate(GroupSpec("D", m=2, n=1, p=5))
    assert rec.is_integer and rec.odd


def test_bound_constants():
    assert c1_bound("P48", 5) == pytest.approx(2.445e5)
    assert c1_bound("Pprime", 1) == pytest.approx(30553.5, abs=0.1)
    with mpmath.workdps(30):
        assert c1_bound("Pprime", 1) == pytest.approx(float(80 * (135 * mpmath.sqrt(2) + 191)))


def test_bound_records():
    rec = c1_bound_check(GroupSpec("P48", p=5))
    assert rec.ok and rec.c1_abs < rec.bound
    rec = c1_bound_check(GroupSpec("P120"))
    assert rec.entry_bound_holds
    assert rec.max_offsplit_abs2 <= 1 / (2 * math.sin(math.pi / 5)) ** 2 + 1e-12
    rec = c1_bound_check(GroupSpec("Q", n=1, p=3))
    assert rec["antidiagonal_cancels"]


def test_thresholds():
    assert [threshold(f) for f in ("P48", "P120", "Pprime")] == [26, 46, 24]
    assert derive_threshold("P48") == 26
    assert derive_threshold("P120") <= 46
    assert derive_threshold("Pprime") == 24
    with pytest.raises(UnsupportedFamily):
        threshold("Q")


def test_pole_error_is_a_zero_division():
    with pytest.raises(ZeroDivisionError):
        psi(UnitaryMatrix.scalar(CyclotomicNumber.rational(1, 3)))


def test_float_route_keeps_requested_precision():
    from bqke.obstruction import c_float

    spec = GroupSpec("P120", p=7)
    with mpmath.workdps(50):
        approx = c_float(spec, 40)
        exact = embed(compute_c(spec).c_exact, 40)
        assert abs(approx - exact) < mpmath.mpf(10) ** -30 * abs(exact)
