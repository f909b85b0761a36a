"""The Monge-Ampere side as exact rational functions of x = |z1|^2.

On the slice z = (z1, 0) the Kaehler-Einstein condition for the Bergman
metric of the quotient reads f(x) = phi(x)^4 with

    phi(x) = sum_g det(gb) / (1 - gb11 x)^3
    f(x)   = sum_{g0, g1, g2} det A(gb0, gb1, gb2) prod_i det(gbi) / (1 - gbi11 x)^4

where gb is the entrywise conjugate of g. Since det A is linear in each of
its columns and column i depends on g_i only, the triple sum collapses to
the determinant of three column sums. That is what keeps the Laurent
expansion at x = 1 linear in the group order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cyclotomic import CyclotomicNumber
from .groups import CapExceeded, GroupSpec, UnitaryMatrix, enumerate_elements
from .obstruction import compute_c

DEFAULT_SERIES_CAP = 200
TRIPLE_SUM_CAP = 60
WINDOW = (-12, 0)


class LaurentStructureError(AssertionError):
    """The expansion of f - phi^4 at x = 1 does not have the expected shape."""


# -- polynomials over one cyclotomic field --------------------------------


class Poly:
    """Dense polynomial in x with CyclotomicNumber coefficients, lowest degree first."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, coeffs: Iterable, conductor: int):
        self.conductor = conductor
        cs = [_as_cn(c, conductor) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @classmethod
    def constant(cls, c, conductor: int) -> "Poly":
        return cls([c], conductor)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out, self.conductor)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.conductor)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs], self.conductor)
        if self.is_zero() or other.is_zero():
            return Poly([], self.conductor)
        zero = CyclotomicNumber.rational(0, self.conductor)
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return Poly(out, self.conductor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __call__(self, x):
        acc = CyclotomicNumber.rational(0, self.conductor)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift_to_one(self) -> list[CyclotomicNumber]:
        """Coefficients of p(1 + t) in t."""
        n = len(self.coeffs)
        out = [CyclotomicNumber.rational(0, self.conductor) for _ in range(n)]
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            for j in range(k + 1):
                out[j] = out[j] + c * math.comb(k, j)
        return out

    def divide_linear(self, alpha: CyclotomicNumber) -> "Poly | None":
        """p / (1 - alpha x) if it divides exactly, else None."""
        # (1 - alpha x) q = p  =>  q_k = p_k + alpha q_{k-1}
        if self.is_zero():
            return self
        q = []
        prev = CyclotomicNumber.rational(0, self.conductor)
        for k in range(len(self.coeffs) - 1):
            prev = self.coeffs[k] + alpha * prev
            q.append(prev)
        remainder = self.coeffs[-1] + alpha * prev
        if not remainder.is_zero():
            return None
        return Poly(q, self.conductor)

    def __repr__(self) -> str:
        return f"Poly({self.coeffs!r})"


def _as_cn(c, conductor: int) -> CyclotomicNumber:
    if isinstance(c, CyclotomicNumber):
        return c if c.conductor == conductor else c.lift(conductor)
    return CyclotomicNumber.rational(c, conductor)


def _linear_power(alpha: CyclotomicNumber, e: int, conductor: int) -> Poly:
    base = Poly([1, -alpha], conductor)
    out = Poly([1], conductor)
    for _ in range(e):
        out = out * base
    return out


# -- rational functions -----------------------------------------------------


class RationalFunctionQx:
    """numerator(x) / prod_alpha (1 - alpha x)^e.

    The denominator is kept factored and normalized to constant term 1;
    factors with alpha = 0 are dropped. All coefficients share one
    conductor.
    """

    __slots__ = ("conductor", "numerator", "factors")

    def __init__(self, numerator: Poly, factors: dict | None = None, conductor: int | None = None):
        conductor = conductor or numerator.conductor
        self.conductor = conductor
        self.numerator = numerator if numerator.conductor == conductor else Poly(numerator.coeffs, conductor)
        fac: dict = {}
        for alpha, e in (factors or {}).items():
            alpha = _as_cn(alpha, conductor)
            if e and not alpha.is_zero():
                fac[alpha] = fac.get(alpha, 0) + e
        self.factors = fac

    @classmethod
    def term(cls, coeff, alpha, power: int, conductor: int, x_power: int = 0) -> "RationalFunctionQx":
        """coeff * x^x_power / (1 - alpha x)^power."""
        num = Poly([0] * x_power + [coeff], conductor)
        return cls(num, {_as_cn(alpha, conductor): power}, conductor)

    @classmethod
    def constant(cls, c, conductor: int) -> "RationalFunctionQx":
        return cls(Poly([c], conductor), {}, conductor)

    def denominator(self) -> Poly:
        out = Poly([1], self.conductor)
        for alpha, e in self.factors.items():
            out = out * _linear_power(alpha, e, self.conductor)
        return out

    def _rescale(self, target: dict) -> Poly:
        """Numerator over the larger factored denominator ``target``."""
        num = self.numerator
        for alpha, e in target.items():
            extra = e - self.factors.get(alpha, 0)
            if extra:
                num = num * _linear_power(alpha, extra, self.conductor)
        return num

    def _common(self, other: "RationalFunctionQx") -> dict:
        out = dict(self.factors)
        for alpha, e in other.factors.items():
            out[alpha] = max(out.get(alpha, 0), e)
        return out

    def _coerce(self, other) -> "RationalFunctionQx":
        if isinstance(other, RationalFunctionQx):
            if other.conductor != self.conductor:
                raise ValueError("rational functions over different conductors")
            return other
        return RationalFunctionQx.constant(other, self.conductor)

    def __add__(self, other) -> "RationalFunctionQx":
        other = self._coerce(other)
        common = self._common(other)
        return RationalFunctionQx(self._rescale(common) + other._rescale(common), common, self.conductor)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunctionQx":
        return RationalFunctionQx(-self.numerator, self.factors, self.conductor)

    def __sub__(self, other) -> "RationalFunctionQx":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunctionQx":
        return (-self) + other

    def __mul__(self, other) -> "RationalFunctionQx":
        if not isinstance(other, RationalFunctionQx):
            return RationalFunctionQx(self.numerator * _as_cn(other, self.conductor), self.factors, self.conductor)
        other = self._coerce(other)
        fac = dict(self.factors)
        for alpha, e in other.factors.items():
            fac[alpha] = fac.get(alpha, 0) + e
        return RationalFunctionQx(self.numerator * other.numerator, fac, self.conductor)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RationalFunctionQx":
        if k < 0:
            raise ValueError("only non-negative powers")
        out = RationalFunctionQx.constant(1, self.conductor)
        for _ in range(k):
            out = out * self
        return out

    def reduced(self) -> "RationalFunctionQx":
        """Cancel every (1 - alpha x) factor that divides the numerator."""
        num = self.numerator
        fac = dict(self.factors)
        for alpha in list(fac):
            while fac[alpha]:
                q = num.divide_linear(alpha)
                if q is None:
                    break
                num = q
                fac[alpha] -= 1
        return RationalFunctionQx(num, fac, self.conductor)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunctionQx):
            other = RationalFunctionQx.constant(other, self.conductor)
        elif other.conductor != self.conductor:
            n = math.lcm(self.conductor, other.conductor)
            return self.lift(n) == other.lift(n)
        # cross-multiplication over the common factored denominator
        common = self._common(other)
        return self._rescale(common) == other._rescale(common)

    __hash__ = None

    def lift(self, conductor: int) -> "RationalFunctionQx":
        return RationalFunctionQx(
            Poly([c.lift(conductor) for c in self.numerator.coeffs], conductor),
            {a.lift(conductor): e for a, e in self.factors.items()},
            conductor,
        )

    def __call__(self, x):
        den = self.denominator()(x)
        if den.is_zero():
            raise ZeroDivisionError("pole")
        return self.numerator(x) / den

    def laurent(self, low: int, high: int) -> "LaurentCoefficients":
        return laurent_at_one(self, low, high)

    def __repr__(self) -> str:
        fac = ", ".join(f"{a!r}^{e}" for a, e in self.factors.items())
        return f"RationalFunctionQx({self.numerator!r} / [{fac}])"


# -- Laurent series at x = 1 -------------------------------------------------


class LaurentSeries:
    """Truncated Laurent series in t = x - 1.

    Holds coefficients for orders low .. low + len(coeffs) - 1; every order
    below ``prec`` is exact (orders below ``low`` are zero), orders from
    ``prec`` on are unknown.
    """

    __slots__ = ("conductor", "low", "coeffs", "prec")

    def __init__(self, low: int, coeffs: Sequence, prec: int, conductor: int):
        self.conductor = conductor
        cs = [_as_cn(c, conductor) for c in coeffs][: max(prec - low, 0)]
        self.low = low
        self.coeffs = cs
        self.prec = prec

    @classmethod
    def zero(cls, prec: int, conductor: int) -> "LaurentSeries":
        return cls(prec, [], prec, conductor)

    def __getitem__(self, k: int) -> CyclotomicNumber:
        if k >= self.prec:
            raise IndexError(f"order {k} is beyond the known precision {self.prec}")
        i = k - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return CyclotomicNumber.rational(0, self.conductor)

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return self.low + i
        return None

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        prec = min(self.prec, other.prec)
        low = min(self.low, other.low)
        coeffs = [self[k] + other[k] for k in range(low, prec)]
        return LaurentSeries(low, coeffs, prec, self.conductor)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.low, [-c for c in self.coeffs], self.prec, self.conductor)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, c) -> "LaurentSeries":
        c = _as_cn(c, self.conductor)
        return LaurentSeries(self.low, [c * x for x in self.coeffs], self.prec, self.conductor)

    def __mul__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        va = self.valuation()
        vb = other.valuation()
        if va is None or vb is None:
            # a known-zero stretch times anything is zero up to the combined precision
            prec = min(self.prec + (other.low if vb is not None else other.prec),
                       other.prec + (self.low if va is not None else self.prec))
            return LaurentSeries.zero(prec, self.conductor)
        prec = min(va + other.prec, vb + self.prec)
        low = va + vb
        zero = CyclotomicNumber.rational(0, self.conductor)
        out = [zero] * max(prec - low, 0)
        for i in range(va, self.low + len(self.coeffs)):
            a = self[i]
            if a.is_zero():
                continue
            for j in range(vb, min(other.low + len(other.coeffs), prec - i)):
                b = other[j]
                if not b.is_zero():
                    out[i + j - low] = out[i + j - low] + a * b
        return LaurentSeries(low, out, prec, self.conductor)

    __rmul__ = __mul__

    def window(self, low: int, high: int) -> "LaurentCoefficients":
        if high >= self.prec:
            raise LaurentStructureError(f"order {high} requested but precision ends at {self.prec}")
        return LaurentCoefficients(low, high, {k: self[k] for k in range(low, high + 1)})


@dataclass
class LaurentCoefficients:
    """Coefficients at x = 1 for orders low .. high; everything below low is zero."""

    low: int
    high: int
    coeffs: dict[int, CyclotomicNumber] = field(default_factory=dict)

    def __getitem__(self, k: int) -> CyclotomicNumber:
        return self.coeffs[k]

    def nonzero_orders(self) -> list[int]:
        return [k for k, c in sorted(self.coeffs.items()) if not c.is_zero()]

    def pole_order(self) -> int:
        nz = self.nonzero_orders()
        return -nz[0] if nz and nz[0] < 0 else 0


def pole_expansion(alpha: CyclotomicNumber, k: int, prec: int, conductor: int) -> LaurentSeries:
    """1 / (1 - alpha x)^k at x = 1 + t, known for orders below prec."""
    alpha = _as_cn(alpha, conductor)
    if alpha == 1:
        # (1 - x)^-k = (-t)^-k
        return LaurentSeries(-k, [(-1) ** k], prec, conductor)
    inv = (1 - alpha).inverse()
    beta = alpha * inv
    lead = inv**k
    coeffs = []
    bp = CyclotomicNumber.rational(1, conductor)
    for n in range(max(prec, 0)):
        coeffs.append(lead * bp * math.comb(n + k - 1, k - 1))
        bp = bp * beta
    return LaurentSeries(0, coeffs, prec, conductor)


def laurent_at_one(r: RationalFunctionQx, low: int, high: int) -> LaurentCoefficients:
    """Coefficients of r at x = 1 for orders low .. high."""
    if low > high:
        raise ValueError("low must not exceed high")
    if r.is_zero():
        return LaurentCoefficients(low, high, {k: CyclotomicNumber.rational(0, r.conductor) for k in range(low, high + 1)})
    pole = sum(e for a, e in r.factors.items() if a == 1)
    # numerator is a polynomial, exact in every order; factors need high + pole + 1 terms
    num = LaurentSeries(0, r.numerator.shift_to_one(), 10**9, r.conductor)
    series = num
    for alpha, e in r.factors.items():
        series = series * pole_expansion(alpha, e, high + pole + 1, r.conductor)
    return series.window(low, high)


# -- phi, det A and f ----------------------------------------------------------


def _conj_entries(g: UnitaryMatrix):
    return tuple(x.conjugate() for x in g.entries())


def _check_cap(spec: GroupSpec, cap: int) -> None:
    if spec.order > cap:
        raise CapExceeded(f"|{spec.label}| = {spec.order} exceeds the series cap {cap}")


def phi_rational(spec: GroupSpec, series_cap: int = DEFAULT_SERIES_CAP) -> RationalFunctionQx:
    """phi(x) = sum over the group of det(gb) / (1 - gb11 x)^3."""
    _check_cap(spec, series_cap)
    n = spec.conductor
    weights: dict = {}
    for e in enumerate_elements(spec):
        a, b, c, d = _conj_entries(e.matrix)
        weights[a] = weights.get(a, 0) + (a * d - b * c)
    out = RationalFunctionQx.constant(0, n)
    for a, w in weights.items():
        out = out + RationalFunctionQx.term(w, a, 3, n)
    return out


def det_A(g0: UnitaryMatrix, g1: UnitaryMatrix, g2: UnitaryMatrix) -> RationalFunctionQx:
    """The 3x3 determinant pairing the three columns, with conjugated entries."""
    n = math.lcm(g0.conductor, g1.conductor, g2.conductor)
    a0, _, c0, _ = (x.lift(n) for x in _conj_entries(g0))
    a1, _, c1, _ = (x.lift(n) for x in _conj_entries(g1))
    a2, b2, c2, d2 = (x.lift(n) for x in _conj_entries(g2))
    R = RationalFunctionQx
    col0 = [R(Poly([1, -a0], n)), R(Poly([0, 3 * a0], n)), R(Poly([0, 3 * c0], n))]
    col1 = [
        R.constant(a1, n),
        R.term(a1, a1, 1, n) + R.term(3 * a1 * a1, a1, 1, n, x_power=1),
        R.term(c1, a1, 1, n) + R.term(3 * a1 * c1, a1, 1, n, x_power=1),
    ]
    col2 = [
        R.constant(b2, n),
        R.term(b2, a2, 1, n) + R.term(3 * a2 * b2, a2, 1, n, x_power=1),
        R.constant(d2, n) + R.term(4 * c2 * b2, a2, 1, n, x_power=1),
    ]
    return _det3([col0, col1, col2]).reduced()


def _det3(cols):
    (a, d, g), (b, e, h), (c, f, i) = cols
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


@dataclass
class _Weights:
    """Per distinct value a = gb11, the sums of det(gb) times entry monomials."""

    delta: object
    c: object
    b: object
    d: object
    bc: object


def _aggregate(spec: GroupSpec) -> dict:
    n = spec.conductor
    zero = CyclotomicNumber.rational(0, n)
    table: dict = {}
    for e in enumerate_elements(spec):
        a, b, c, d = _conj_entries(e.matrix)
        delta = a * d - b * c
        w = table.get(a)
        if w is None:
            w = table[a] = _Weights(zero, zero, zero, zero, zero)
        w.delta = w.delta + delta
        w.c = w.c + c * delta
        w.b = w.b + b * delta
        w.d = w.d + d * delta
        w.bc = w.bc + b * c * delta
    return table


def _column_sums_rational(spec: GroupSpec):
    """The three summed columns as rational functions."""
    n = spec.conductor
    R = RationalFunctionQx
    entries = [[R.constant(0, n) for _ in range(3)] for _ in range(3)]
    for a, w in _aggregate(spec).items():
        t = lambda coeff, k, xp=0: R.term(coeff, a, k, n, x_power=xp)
        col0 = [t(w.delta, 3), t(3 * a * w.delta, 4, 1), t(3 * w.c, 4, 1)]
        col1 = [t(a * w.delta, 4), t(a * w.delta, 4) + t(4 * a * a * w.delta, 5, 1),
                t(w.c, 4) + t(4 * a * w.c, 5, 1)]
        col2 = [t(w.b, 4), t(w.b, 4) + t(4 * a * w.b, 5, 1), t(w.d, 4) + t(4 * w.bc, 5, 1)]
        for j, col in enumerate((col0, col1, col2)):
            for i in range(3):
                entries[j][i] = entries[j][i] + col[i]
    return entries


def f_rational(spec: GroupSpec, route: str = "columns", series_cap: int = DEFAULT_SERIES_CAP) -> RationalFunctionQx:
    """f(x) as one exact rational function.

    route="columns" uses multilinearity (determinant of summed columns);
    route="triple" adds det A times the weights over every ordered triple
    and is limited to TRIPLE_SUM_CAP elements.
    """
    if route == "columns":
        _check_cap(spec, series_cap)
        return _det3(_column_sums_rational(spec))
    if route != "triple":
        raise ValueError(f"unknown route {route!r}")
    _check_cap(spec, min(series_cap, TRIPLE_SUM_CAP))
    n = spec.conductor
    mats = [e.matrix for e in enumerate_elements(spec)]
    weights = []
    for g in mats:
        a, b, c, d = _conj_entries(g)
        weights.append(RationalFunctionQx.term(a * d - b * c, a, 4, n))
    total = RationalFunctionQx.constant(0, n)
    for i0, g0 in enumerate(mats):
        for i1, g1 in enumerate(mats):
            w01 = weights[i0] * weights[i1]
            for i2, g2 in enumerate(mats):
                total = total + det_A(g0, g1, g2) * w01 * weights[i2]
    return total


# -- Laurent route ------------------------------------------------------------


def _column_sums_laurent(spec: GroupSpec, prec: int):
    n = spec.conductor
    x = LaurentSeries(0, [1, 1], 10**9, n)
    entries = [[LaurentSeries.zero(prec, n) for _ in range(3)] for _ in range(3)]
    for a, w in _aggregate(spec).items():
        e3, e4, e5 = (pole_expansion(a, k, prec, n) for k in (3, 4, 5))
        xe4, xe5 = x * e4, x * e5
        col0 = [e3 * w.delta, xe4 * (3 * a * w.delta), xe4 * (3 * w.c)]
        col1 = [e4 * (a * w.delta), e4 * (a * w.delta) + xe5 * (4 * a * a * w.delta),
                e4 * w.c + xe5 * (4 * a * w.c)]
        col2 = [e4 * w.b, e4 * w.b + xe5 * (4 * a * w.b), e4 * w.d + xe5 * (4 * w.bc)]
        for j, col in enumerate((col0, col1, col2)):
            for i in range(3):
                entries[j][i] = entries[j][i] + col[i]
    return entries


def _phi_laurent(spec: GroupSpec, prec: int) -> LaurentSeries:
    n = spec.conductor
    out = LaurentSeries.zero(prec, n)
    for a, w in _aggregate(spec).items():
        out = out + pole_expansion(a, 3, prec, n) * w.delta
    return out


def residual_series(spec: GroupSpec, window: tuple[int, int] = WINDOW,
                    series_cap: int = DEFAULT_SERIES_CAP) -> LaurentCoefficients:
    """Laurent coefficients of f - phi^4 at x = 1 over the window, computed
    term by term without forming any common denominator."""
    _check_cap(spec, series_cap)
    low, high = window
    # entries have poles of order <= 5 and a 3x3 product loses at most 10
    # orders of precision; phi^4 loses at most 9
    prec = high + 11
    f = _det3(_column_sums_laurent(spec, prec))
    phi = _phi_laurent(spec, prec)
    phi2 = phi * phi
    resid = f - phi2 * phi2
    if resid.prec <= high:
        raise LaurentStructureError("insufficient precision for the requested window")
    return resid.window(low, high)


def ke_residual(spec: GroupSpec, series_cap: int = DEFAULT_SERIES_CAP, check: bool = True,
                expected: CyclotomicNumber | None = None) -> LaurentCoefficients:
    """Coefficients of f - phi^4 for orders -12 .. 0.

    With check=True, orders -12 .. -9 must vanish and order -8 must equal
    C(Gamma) from the obstruction module (or ``expected``).
    """
    coeffs = residual_series(spec, WINDOW, series_cap)
    if check:
        bad = [k for k in range(-12, -8) if not coeffs[k].is_zero()]
        if bad:
            raise LaurentStructureError(f"{spec.label}: orders {bad} are nonzero")
        target = expected if expected is not None else compute_c(spec).c_exact
        if coeffs[-8] != target:
            raise LaurentStructureError(f"{spec.label}: order -8 is {coeffs[-8]!r}, expected {target!r}")
    return coeffs


def ke_identity_check(spec: GroupSpec, series_cap: int = DEFAULT_SERIES_CAP) -> bool:
    """True iff f = phi^4 identically as rational functions.

    A nonzero Laurent coefficient settles the question cheaply; otherwise
    the full rational functions are compared by cross-multiplication.
    """
    if residual_series(spec, WINDOW, series_cap).nonzero_orders():
        return False
    phi = phi_rational(spec, series_cap)
    return f_rational(spec, series_cap=series_cap) == phi**4
