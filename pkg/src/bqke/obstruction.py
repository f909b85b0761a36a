"""The obstruction C(Gamma) = sum of psi(gamma) over non-identity elements.

    psi(g) = det g / (1 - g11)^4 * (1 - 3 tr g + 4 (tr g - det g - 1) / (1 - g11))

Two exact summation routes are provided:

direct
    enumerate every element in the full field Q(zeta_N) and add psi.
coset
    write each element as y * g with y in the cyclic scalar subgroup
    (order s) and g a base-group coset representative. The fiber sum over
    all s-th roots y of psi(y g) is a rational function of g11, tr g and
    det g alone, so the whole computation stays in the small base field
    regardless of p. This is what makes large products like P120 x Z/43
    cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import mpmath

from . import closed_forms
from .cyclotomic import CyclotomicNumber, default_digits, embed
from .groups import (
    DEFAULT_ELEMENT_CAP,
    GroupSpec,
    UnitaryMatrix,
    base_elements,
    base_generators,
    enumerate_elements,
    phi_at_zero,
    scalar_cosets,
)

# order * phi(N) below this uses the direct route under method="auto"
DIRECT_WORK_LIMIT = 4000

P_FAMILIES = ("P48", "P120", "Pprime")

VERDICTS = ("KE_possible", "Obstructed_by_C", "Obstructed_by_phi0", "Obstructed_by_both")


class PoleError(ZeroDivisionError):
    """psi is undefined at matrices with g11 = 1."""


class UnsupportedFamily(ValueError):
    pass


# -- psi --------------------------------------------------------------------


def psi(gamma: UnitaryMatrix, inv_one_minus_g11: CyclotomicNumber | None = None) -> CyclotomicNumber:
    """Exact psi(gamma). The optional second argument lets callers reuse 1/(1 - g11)."""
    g11 = gamma.e11
    if inv_one_minus_g11 is None:
        if g11 == 1:
            raise PoleError("psi has a pole at g11 = 1 (the identity must be excluded)")
        inv_one_minus_g11 = (1 - g11).inverse()
    det = gamma.det()
    tr = gamma.trace()
    w = inv_one_minus_g11
    w2 = w * w
    return det * w2 * w2 * (1 - 3 * tr + 4 * (tr - det - 1) * w)


def psi_float(e11, e12, e21, e22):
    """psi on complex entries (mpmath or builtin complex)."""
    det = e11 * e22 - e12 * e21
    tr = e11 + e22
    w = 1 / (1 - e11)
    return det * w**4 * (1 - 3 * tr + 4 * (tr - det - 1) * w)


# -- summation routes -------------------------------------------------------


class Split(NamedTuple):
    c1: CyclotomicNumber
    c2: CyclotomicNumber
    unit_corner_count: int


def _direct_split(spec: GroupSpec, element_cap: int) -> Split:
    n = spec.conductor
    zero = CyclotomicNumber.rational(0, n)
    c1, c2 = zero, zero
    count = 1  # the identity has |g11| = 1
    inv_cache: dict = {}
    abs_cache: dict = {}
    for e in enumerate_elements(spec, element_cap)[1:]:
        g = e.matrix
        key = (g.e11._num, g.e11._den)
        if key not in inv_cache:
            if g.e11 == 1:
                raise PoleError(f"non-identity element {e.word} has g11 = 1")
            inv_cache[key] = (1 - g.e11).inverse()
            abs_cache[key] = g.e11.abs2() == 1
        value = psi(g, inv_cache[key])
        if abs_cache[key]:
            c2 = c2 + value
            count += 1
        else:
            c1 = c1 + value
    return Split(c1, c2, count)


def _binom4(x: int) -> int:
    return (x + 1) * (x + 2) * (x + 3) * (x + 4) // 24


def _geometric_kernel(alpha: CyclotomicNumber, s: int, m: int, x: CyclotomicNumber,
                      inv_den: CyclotomicNumber) -> CyclotomicNumber:
    """Sum over t >= 0 of binom(m + t s + 4, 4) alpha^(m + t s), i.e. the
    coefficient of y^m in (1 - alpha y)^-5 reduced mod y^s - 1.

    inv_den is 1 / (1 - alpha^s)^5 and x is alpha^s.
    """
    q = [_binom4(m + t * s) for t in range(5)]
    diffs = []
    row = q
    for _ in range(5):
        diffs.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    one_minus_x = 1 - x
    acc = CyclotomicNumber.rational(0, alpha.conductor)
    for i, d in enumerate(diffs):
        if d:
            acc = acc + d * x**i * one_minus_x ** (4 - i)
    return alpha**m * acc * inv_den


def fiber_sum(alpha: CyclotomicNumber, tau: CyclotomicNumber, delta: CyclotomicNumber,
              s: int) -> CyclotomicNumber:
    """Sum of psi(y g) over all s-th roots of unity y, for g with
    g11 = alpha, tr g = tau, det g = delta and alpha^s != 1.
    """
    # psi(y g) = P(y) / (1 - alpha y)^5 with P(y) = P2 y^2 + P3 y^3 + P4 y^4
    poly = {
        2: -3 * delta,
        3: delta * (tau - alpha),
        4: delta * (3 * alpha * tau - 4 * delta),
    }
    total = CyclotomicNumber.rational(0, alpha.conductor)
    if alpha.is_zero():
        for i, c in poly.items():
            if i % s == 0:
                total = total + c
        return total * s
    x = alpha**s
    if x == 1:
        raise PoleError("a scalar multiple of this element has g11 = 1")
    inv_den = ((1 - x) ** 5).inverse()
    for i, c in poly.items():
        total = total + c * _geometric_kernel(alpha, s, (-i) % s, x, inv_den)
    return total * s


def scalar_subgroup_sum(s: int) -> Fraction:
    """Sum of psi(y id) = y^2 (-3 - 2y) / (1 - y)^4 over s-th roots y != 1.

    Uses 1/(1 - y) = -(1/s) sum_k k y^k, valid for y^s = 1, y != 1, and
    works with integer polynomials modulo y^s - 1.
    """
    if s == 1:
        return Fraction(0)

    def cyc_mul(a, b):
        out = [0] * s
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % s] += x * y
        return out

    L = list(range(s))
    L2 = cyc_mul(L, L)
    L4 = cyc_mul(L2, L2)
    P = [0] * s
    P[2 % s] += -3
    P[3 % s] += -2
    T = cyc_mul(P, L4)
    # sum over all roots minus the value at y = 1
    return Fraction(s * T[0] - sum(T), s**4)


def _coset_split(spec: GroupSpec, element_cap: int) -> Split:
    data = scalar_cosets(spec, element_cap)
    s = data.scalar_order
    n0 = spec.base_conductor
    c1 = CyclotomicNumber.rational(0, n0)
    c2 = CyclotomicNumber.rational(scalar_subgroup_sum(s), n0)
    count = s
    for rep in data.representatives[1:]:
        g = rep.matrix
        value = fiber_sum(g.e11, g.trace(), g.det(), s)
        if g.e11.abs2() == 1:
            c2 = c2 + value
            count += s
        else:
            c1 = c1 + value
    return Split(c1, c2, count)


def _choose_method(spec: GroupSpec, method: str) -> str:
    if method not in ("auto", "direct", "coset"):
        raise ValueError(f"unknown method {method!r}")
    if method != "auto":
        return method
    from .cyclotomic import totient

    return "direct" if spec.order * totient(spec.conductor) <= DIRECT_WORK_LIMIT else "coset"


def split_c1_c2(spec: GroupSpec, method: str = "auto", element_cap: int = DEFAULT_ELEMENT_CAP,
                families: tuple[str, ...] | None = P_FAMILIES) -> Split:
    """(C1, C2, count): C2 sums psi over elements with |g11| = 1, C1 over the rest.

    count is the number of elements (identity included) with |g11| = 1. For
    Q and D families the same test separates diagonal from anti-diagonal
    elements, so passing ``families=None`` allows every family.
    """
    if families is not None and spec.family not in families:
        raise UnsupportedFamily(f"split is defined for {families}, not {spec.family}")
    if _choose_method(spec, method) == "direct":
        return _direct_split(spec, element_cap)
    return _coset_split(spec, element_cap)


def c_float(spec: GroupSpec, digits: int | None = None, element_cap: int = DEFAULT_ELEMENT_CAP) -> mpmath.mpc:
    """C(Gamma) by floating-point summation of psi at the given precision."""
    digits = digits or default_digits()
    data = scalar_cosets(spec, element_cap)
    s = data.scalar_order
    with mpmath.workdps(digits + 10):
        ys = [mpmath.expjpi(mpmath.mpf(2 * k) / s) for k in range(s)]
        total = mpmath.mpc(0)
        for idx, rep in enumerate(data.representatives):
            e = [embed(x, digits) for x in rep.matrix.entries()]
            for k, y in enumerate(ys):
                if idx == 0 and k == 0:
                    continue
                total += psi_float(*(y * v for v in e))
        return total


# -- reports ------------------------------------------------------------------


@dataclass
class ParityRecord:
    value_720c: Fraction
    is_integer: bool
    odd: bool
    modulus: int
    residue: int | None
    predicted_residue: int | None = None


@dataclass
class ObstructionReport:
    spec: GroupSpec
    c_exact: CyclotomicNumber
    c_float: complex
    c1: CyclotomicNumber
    c2: CyclotomicNumber
    unit_corner_count: int
    phi0: CyclotomicNumber
    verdict: str
    paper_hypothesis_met: bool
    parity: ParityRecord | None = None
    method: str = "direct"
    notes: list[str] = field(default_factory=list)

    @property
    def su2_phi0(self) -> CyclotomicNumber:
        return self.phi0

    @property
    def c_is_zero(self) -> bool:
        return self.c_exact.is_zero()

    def c_rational(self) -> Fraction | None:
        return self.c_exact.to_fraction() if self.c_exact.is_rational() else None


def hypothesis_met(spec: GroupSpec) -> bool:
    """Whether the parameters satisfy the hypotheses under which nonvanishing is proved.

    Q and D are proved for p >= 2 with the anti-diagonal cancellation, which
    needs odd p >= 3; the other families are stated for every coprime p.
    """
    if spec.family in ("Q", "D"):
        return spec.p >= 3
    return True


def verdict(c: CyclotomicNumber, phi0: CyclotomicNumber, spec: GroupSpec) -> str:
    """Necessary-condition verdict. phi(0) counts only for non-trivial groups:
    for the trivial group it is the ball itself, where phi(0) = 1 is expected.
    """
    by_c = not c.is_zero()
    by_phi = spec.order > 1 and not phi0.is_zero()
    if by_c and by_phi:
        return "Obstructed_by_both"
    if by_c:
        return "Obstructed_by_C"
    if by_phi:
        return "Obstructed_by_phi0"
    return "KE_possible"


def parity_modulus(spec: GroupSpec) -> int:
    if spec.family == "Q":
        return 4 * spec.n * spec.p
    if spec.family == "D":
        return 2 ** (spec.m - 1) * spec.p * (2 * spec.n + 1)
    raise UnsupportedFamily("parity certificates are defined for Q and D")


def _parity_record(spec: GroupSpec, c: CyclotomicNumber) -> ParityRecord:
    if not c.is_rational():
        raise ArithmeticError(f"C({spec.label}) is not rational")
    v = 720 * c.to_fraction()
    N = parity_modulus(spec)
    is_int = v.denominator == 1
    predicted = None
    if hypothesis_met(spec) and spec.p % 2 == 1:
        res = closed_forms.qd_residue(spec.family, spec.n, spec.p, spec.m)
        predicted = closed_forms.parity_residue(res.N, res.r)
    return ParityRecord(
        value_720c=v,
        is_integer=is_int,
        odd=is_int and v.numerator % 2 == 1,
        modulus=N,
        residue=v.numerator % N if is_int else None,
        predicted_residue=predicted,
    )


def compute_c(spec: GroupSpec, method: str = "auto", element_cap: int = DEFAULT_ELEMENT_CAP,
              digits: int | None = None) -> ObstructionReport:
    """Exact C(Gamma) with its split, phi(0), verdict and (for Q, D) parity."""
    chosen = _choose_method(spec, method)
    split = split_c1_c2(spec, chosen, element_cap, families=None)
    c = split.c1 + split.c2
    if c != c.conjugate():
        raise ArithmeticError(f"C({spec.label}) is not self-conjugate")
    phi0 = phi_at_zero(spec, element_cap)
    report = ObstructionReport(
        spec=spec,
        c_exact=c,
        c_float=complex(embed(c, digits or default_digits())),
        c1=split.c1,
        c2=split.c2,
        unit_corner_count=split.unit_corner_count,
        phi0=phi0,
        verdict=verdict(c, phi0, spec),
        paper_hypothesis_met=hypothesis_met(spec),
        method=chosen,
    )
    if spec.family in ("Q", "D"):
        report.parity = _parity_record(spec, c)
        if report.paper_hypothesis_met and not (report.parity.is_integer and report.parity.odd):
            raise ArithmeticError(f"720 C({spec.label}) = {report.parity.value_720c} is not an odd integer")
    if not report.paper_hypothesis_met:
        report.notes.append("parameters lie outside the hypotheses under which nonvanishing is proved")
    return report


def parity_certificate(spec: GroupSpec, method: str = "auto") -> ParityRecord:
    """720 C as an exact rational, with oddness and residue mod N."""
    if spec.family not in ("Q", "D"):
        raise UnsupportedFamily("parity certificates are defined for Q and D")
    rec = compute_c(spec, method).parity
    if spec.p > 1 and not rec.is_integer:
        raise ArithmeticError(f"720 C({spec.label}) = {rec.value_720c} is not an integer")
    return rec


# -- bounds and thresholds ---------------------------------------------------

THRESHOLDS = {"P48": 26, "P120": 46, "Pprime": 24}

# constant multiplying p (P48, P120) or p * 3^(m-1) (Pprime) in the C1 bounds
BOUND_CONSTANTS = {
    "P48": 4.89e4,
    "P120": 2.68e6,
    "Pprime": 80 * (135 * math.sqrt(2) + 191),
}


def threshold(family: str) -> int:
    """Published threshold: p > 26 (P48), p > 46 (P120), p * 3^(m-1) >= 24 (Pprime)."""
    if family not in THRESHOLDS:
        raise UnsupportedFamily(f"no threshold for {family}")
    return THRESHOLDS[family]


def c1_bound(family: str, p: int, m: int = 1) -> float:
    if family not in BOUND_CONSTANTS:
        raise UnsupportedFamily(f"no C1 bound for {family}")
    scale = p * 3 ** (m - 1) if family == "Pprime" else p
    return BOUND_CONSTANTS[family] * scale


def _c2_quartics(family: str):
    if family == "P48":
        return list(closed_forms._P48_C2.values())
    if family == "P120":
        return list(closed_forms._P120_C2.values())
    if family == "Pprime":
        return [closed_forms._PPRIME_C2]
    raise UnsupportedFamily(f"no C2 quartic for {family}")


def derive_threshold(family: str, search_limit: int = 2000) -> int:
    """Recompute the threshold from the C2 quartics and the C1 bound constant.

    Finds the largest integer x <= search_limit where some branch quartic
    has |C2(x)| <= bound * x, ignoring coprimality (so the answer is
    conservative). Returns it in the published convention: the T of
    "p > T" for P48/P120 and of "p * 3^(m-1) >= T" for Pprime.
    """
    const = BOUND_CONSTANTS[family] if family in BOUND_CONSTANTS else None
    if const is None:
        raise UnsupportedFamily(f"no threshold for {family}")
    quartics = _c2_quartics(family)
    worst = 0
    for x in range(1, search_limit + 1):
        if any(abs(float(closed_forms._quartic(q, x))) <= const * x for q in quartics):
            worst = x
    # beyond the limit the quartic term dominates; confirm the margin grows
    for q in quartics:
        a4, a3, a2, a0 = (abs(float(c)) for c in q)
        x = search_limit
        if a4 * x**3 <= a3 * x**2 + a2 * x + a0 + const:
            raise ArithmeticError("search limit too small to certify the threshold")
    return worst + 1 if family == "Pprime" else worst


def offsplit_modulus_bound(spec: GroupSpec) -> CyclotomicNumber:
    """|c|^2 for the family: |X_11|^2 for P48/P120, 1/2 for Pprime."""
    if spec.family in ("P48", "P120"):
        return base_generators(spec)[0].e11.abs2()
    if spec.family == "Pprime":
        return CyclotomicNumber.rational(Fraction(1, 2), spec.base_conductor)
    raise UnsupportedFamily(f"no entry bound for {spec.family}")


def _real_sign(z: CyclotomicNumber) -> int:
    """Sign of a nonzero totally real z, read off a high-precision embedding."""
    if z.is_zero():
        return 0
    v = embed(z, 60).real
    return 1 if v > 0 else -1


@dataclass
class BoundRecord:
    spec: GroupSpec
    c_abs2: CyclotomicNumber
    offsplit_elements: int
    entry_bound_holds: bool
    max_offsplit_abs2: float
    c1_abs: float
    bound: float
    elementwise_bound: float
    c1_within_bound: bool
    antidiagonal_sum: CyclotomicNumber | None = None
    antidiagonal_cancels: bool | None = None

    @property
    def ok(self) -> bool:
        checks = [self.entry_bound_holds, self.c1_within_bound]
        if self.antidiagonal_cancels is not None:
            checks.append(self.antidiagonal_cancels)
        return all(checks)


def c1_bound_check(spec: GroupSpec, method: str = "auto") -> BoundRecord | dict:
    """Exhaustive entry bound |g11|^2 <= |c|^2 off the split plus |C1| <= bound.

    Scalar multiples preserve |g11|, so checking every base-group element
    covers every element of the product group. For Q and D the record
    instead reports the anti-diagonal sum, which must vanish for p >= 3.
    """
    if spec.family in ("Q", "D"):
        split = split_c1_c2(spec, method, families=None)
        cancels = split.c1.is_zero()
        return {
            "spec": spec,
            "antidiagonal_sum": split.c1,
            "antidiagonal_cancels": cancels,
            "ok": cancels if spec.p >= 3 else True,
        }
    c_abs2 = offsplit_modulus_bound(spec)
    holds = True
    worst = 0.0
    off = 0
    for e in base_elements(spec):
        a2 = e.matrix.e11.abs2()
        if a2 == 1:
            continue
        off += 1
        worst = max(worst, float(embed(a2, 20).real))
        if _real_sign(c_abs2 - a2) < 0:
            holds = False
    off *= spec.p
    split = split_c1_c2(spec, method)
    c1_abs = float(abs(embed(split.c1, 30)))
    bound = c1_bound(spec.family, spec.p, spec.m)
    c_mod = math.sqrt(float(embed(c_abs2, 20).real))
    elementwise = off * (7 + 6 * c_mod) / (1 - c_mod) ** 4
    return BoundRecord(
        spec=spec,
        c_abs2=c_abs2,
        offsplit_elements=off,
        entry_bound_holds=holds,
        max_offsplit_abs2=worst,
        c1_abs=c1_abs,
        bound=bound,
        elementwise_bound=elementwise,
        c1_within_bound=c1_abs <= bound,
    )
