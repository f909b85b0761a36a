import cmath
import math

import pytest

from bqke.cyclotomic import CyclotomicNumber, embed
from bqke.groups import (
    GroupSpec,
    InvalidGroupSpec,
    UnitaryMatrix,
    base_generators,
    build_generators,
    enumerate_elements,
    phi_at_zero,
    relations,
    validate_group,
)


def zeta(n, k=1):
    return CyclotomicNumber.root_of_unity(n, k)


def test_q1_generators():
    X, Y = build_generators(GroupSpec("Q", n=1))
    n = X.conductor
    assert X == UnitaryMatrix.of([[0, 1], [-1, 0]], n)
    assert Y == UnitaryMatrix.of([[zeta(4), 0], [0, zeta(4, -1)]], n)


def test_p48_generators():
    X, _ = base_generators(GroupSpec("P48"))
    a = zeta(8)
    c = (a - a.conjugate()).inverse()
    assert X.e11 == c.lift(X.conductor)
    assert X.e12 * X.e12 == 1 + c * c
    cz = complex(embed(X.e11, 20))
    dz = complex(embed(X.e12, 20))
    assert cz == pytest.approx(-0.7071067811865476j)
    assert dz == pytest.approx(0.7071067811865476)


def test_pprime_generator_z():
    _, _, Z = base_generators(GroupSpec("Pprime", m=1))
    n = Z.conductor
    i = zeta(4).lift(n)
    k = zeta(3).lift(n) / (i - 1)
    assert Z == UnitaryMatrix.of([[k, -k * i], [-k, -k * i]], n)
    assert Z.is_unitary()


@pytest.mark.parametrize("spec, order", [
    (GroupSpec("Q", n=1), 8),
    (GroupSpec("P120"), 120),
    (GroupSpec("Pprime", m=2), 72),
    (GroupSpec("P48"), 48),
    (GroupSpec("D", m=2, n=1), 12),
    (GroupSpec("Q", n=2, p=3), 48),
])
def test_element_counts(spec, order):
    elements = enumerate_elements(spec)
    assert len(elements) == order == spec.order
    assert elements[0].matrix.is_identity()
    assert len({e.matrix.key() for e in elements}) == order
    assert len({e.word for e in elements}) == order


def test_words_reproduce_matrices_q():
    spec = GroupSpec("Q", n=2, p=3)
    X, Y, U = build_generators(spec)
    for e in enumerate_elements(spec):
        j, k, l = e.word
        assert U**j * Y**k * X**l == e.matrix


def test_invalid_specs():
    with pytest.raises(InvalidGroupSpec):
        GroupSpec("Q", n=1, p=2)
    with pytest.raises(InvalidGroupSpec):
        GroupSpec("D", m=1, n=1)
    with pytest.raises(InvalidGroupSpec):
        GroupSpec("D", m=2, n=1, p=3)
    with pytest.raises(InvalidGroupSpec):
        GroupSpec("P48", root_a=2)
    with pytest.raises(InvalidGroupSpec):
        GroupSpec("E8")
    assert GroupSpec("p48").family == "P48"


def test_validation_trivial_and_q1():
    assert validate_group(GroupSpec("trivial")).ok
    report = validate_group(GroupSpec("Q", n=1))
    assert report.ok
    assert report.checks["fixed_point_free"]


def _numeric_fixed_points(spec):
    """Count non-identity elements with eigenvalue 1, in floating point."""
    count = 0
    for e in enumerate_elements(spec)[1:]:
        a, b, c, d = (complex(embed(x, 20)) for x in e.matrix.entries())
        if abs((a - 1) * (d - 1) - b * c) < 1e-9:
            count += 1
    return count


def test_pprime1_is_not_fixed_point_free():
    spec = GroupSpec("Pprime", m=1)
    report = validate_group(spec, method="direct")
    assert not report.checks["fixed_point_free"]
    assert _numeric_fixed_points(spec) == 8
    # every other relation still holds
    assert all(ok for name, ok in report.checks.items() if name != "fixed_point_free")


@pytest.mark.parametrize("spec", [
    GroupSpec("Pprime", m=2), GroupSpec("P48", p=5), GroupSpec("D", m=3, n=1, p=5), GroupSpec("Q", n=3, p=5),
])
def test_fixed_point_free_matches_numeric_oracle(spec):
    assert validate_group(spec).checks["fixed_point_free"]
    assert _numeric_fixed_points(spec) == 0


@pytest.mark.parametrize("spec", [
    GroupSpec("P48", p=5), GroupSpec("Pprime", m=1, p=5), GroupSpec("Pprime", m=2, p=5),
    GroupSpec("P120", p=7), GroupSpec("Q", n=2, p=5),
])
def test_factored_validation_agrees_with_direct(spec):
    direct = validate_group(spec, method="direct")
    factored = validate_group(spec, method="factored")
    assert direct.ok == factored.ok
    assert direct.checks["fixed_point_free"] == factored.checks["fixed_point_free"]


def test_relations_hold():
    for spec in (GroupSpec("Q", n=3), GroupSpec("D", m=3, n=2), GroupSpec("P48"), GroupSpec("P120"),
                 GroupSpec("Pprime", m=2)):
        for name, (lhs, rhs) in relations(spec).items():
            assert lhs == rhs, (spec.label, name)


@pytest.mark.parametrize("spec, value", [
    (GroupSpec("Q", n=1), 8),
    (GroupSpec("P48"), 48),
    (GroupSpec("Q", n=1, p=3), 0),
    (GroupSpec("trivial"), 1),
])
def test_phi_at_zero(spec, value):
    assert phi_at_zero(spec) == value


def test_phi_at_zero_matches_direct_sum():
    spec = GroupSpec("D", m=3, n=1, p=5)
    direct = sum((e.matrix.det().conjugate() for e in enumerate_elements(spec)),
                 CyclotomicNumber.rational(0, spec.conductor))
    assert phi_at_zero(spec) == direct


def test_determinants_have_unit_modulus():
    for e in enumerate_elements(GroupSpec("Pprime", m=2, p=5)):
        d = complex(embed(e.matrix.det(), 20))
        assert math.isclose(abs(d), 1.0, rel_tol=1e-12)
        assert cmath.isfinite(d)
