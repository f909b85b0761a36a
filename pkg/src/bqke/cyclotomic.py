"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis 1, z, ..., z^(d-1) with
d = phi(N), reduced modulo the N-th cyclotomic polynomial.  Coordinates are
kept as a tuple of integer numerators over one positive common denominator,
which makes zero tests and equality plain coordinate comparisons.

Values of different conductors combine after lifting both into
Q(zeta_lcm) through zeta_N = zeta_lcm ** (lcm // N).
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import mpmath

Rational = Union[int, Fraction]

DEFAULT_DIGITS = 30


def default_digits() -> int:
    """Float precision used when none is given (``BQKE_DIGITS`` overrides)."""
    value = os.environ.get("BQKE_DIGITS")
    if value:
        try:
            digits = int(value)
        except ValueError:
            raise ValueError(f"BQKE_DIGITS must be an integer, got {value!r}") from None
        return max(digits, 15)
    return DEFAULT_DIGITS


def totient(n: int) -> int:
    result = n
    k = 2
    m = n
    while k * k <= m:
        if m % k == 0:
            while m % k == 0:
                m //= k
            result -= result // k
        k += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _poly_exact_div(num: list[int], den: Sequence[int]) -> list[int]:
    # den is monic; division must leave no remainder
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c:
            out[k - dn] = c
            for i, d in enumerate(den):
                num[k - dn + i] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the n-th cyclotomic polynomial.

    Obtained as (x^n - 1) divided exactly by Phi_d for every proper divisor d.
    """
    if n < 1:
        raise ValueError("cyclotomic polynomial needs n >= 1")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_exact_div(poly, cyclotomic_polynomial(d))
    return tuple(poly)


class _Field:
    """Per-conductor reduction data."""

    __slots__ = ("n", "degree", "phi", "_terms", "_monomials")

    def __init__(self, n: int):
        self.n = n
        self.phi = cyclotomic_polynomial(n)
        self.degree = len(self.phi) - 1
        self._terms = [(i, c) for i, c in enumerate(self.phi[:-1]) if c]
        self._monomials: dict[int, tuple[int, ...]] = {}

    def reduce(self, coeffs: list[int]) -> list[int]:
        """Reduce an integer coefficient list modulo Phi_n (in place)."""
        d = self.degree
        terms = self._terms
        for k in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[k]
            if c:
                base = k - d
                for i, t in terms:
                    coeffs[base + i] -= c * t
        if len(coeffs) < d:
            coeffs.extend([0] * (d - len(coeffs)))
        return coeffs[:d]

    def monomial(self, k: int) -> tuple[int, ...]:
        """Reduced coordinates of zeta^k."""
        k %= self.n
        vec = self._monomials.get(k)
        if vec is None:
            raw = [0] * max(k + 1, self.degree)
            raw[k] = 1
            vec = tuple(self.reduce(raw))
            self._monomials[k] = vec
        return vec


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    return _Field(n)


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num = [-c for c in num]
        den = -den
    g = math.gcd(den, *num)
    if g > 1:
        num = [c // g for c in num]
        den //= g
    return tuple(num), den


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    nb = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if x:
            for j, y in nb:
                out[i + j] += x * y
    return out


class CyclotomicNumber:
    """An exact element of Q(zeta_N).

    Immutable.  Supports ``+ - * /`` and integer powers with ints, Fractions
    and other cyclotomic numbers of any conductor.
    """

    __slots__ = ("conductor", "_num", "_den")

    def __init__(self, conductor: int, coeffs: Iterable[Rational] = ()):
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        field = _field(conductor)
        fracs = [Fraction(c) for c in coeffs]
        den = 1
        for f in fracs:
            den = den * f.denominator // math.gcd(den, f.denominator)
        ints = [f.numerator * (den // f.denominator) for f in fracs]
        if len(ints) > field.degree:
            ints = field.reduce(ints)
        else:
            ints = ints + [0] * (field.degree - len(ints))
        self.conductor = conductor
        self._num, self._den = _normalize(ints, den)

    @classmethod
    def _raw(cls, conductor: int, num: Sequence[int], den: int) -> "CyclotomicNumber":
        obj = object.__new__(cls)
        obj.conductor = conductor
        obj._num, obj._den = _normalize(list(num), den)
        return obj

    @classmethod
    def rational(cls, value: Rational, conductor: int = 1) -> "CyclotomicNumber":
        value = Fraction(value)
        d = _field(conductor).degree
        return cls._raw(conductor, [value.numerator] + [0] * (d - 1), value.denominator)

    @classmethod
    def root_of_unity(cls, n: int, k: int = 1) -> "CyclotomicNumber":
        """zeta_n ** k for any integer k."""
        return cls._raw(n, _field(n).monomial(k), 1)

    # -- coordinates -----------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    @property
    def degree(self) -> int:
        return len(self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    # -- field changes ---------------------------------------------------

    def lift(self, conductor: int) -> "CyclotomicNumber":
        """The same value viewed in Q(zeta_conductor); conductor must be a multiple."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ValueError(f"cannot lift conductor {self.conductor} to {conductor}")
        step = conductor // self.conductor
        raw = [0] * ((len(self._num) - 1) * step + 1)
        for i, c in enumerate(self._num):
            raw[i * step] = c
        return CyclotomicNumber._raw(conductor, _field(conductor).reduce(raw), self._den)

    def galois(self, k: int) -> "CyclotomicNumber":
        """Apply the automorphism zeta -> zeta^k (k coprime to the conductor)."""
        n = self.conductor
        if math.gcd(k, n) != 1:
            raise ValueError(f"{k} is not coprime to {n}")
        field = _field(n)
        raw = [0] * max(n, field.degree)
        for i, c in enumerate(self._num):
            if c:
                raw[(i * k) % n] += c
        return CyclotomicNumber._raw(n, field.reduce(raw), self._den)

    def conjugate(self) -> "CyclotomicNumber":
        if self.conductor <= 2:
            return self
        return self.galois(self.conductor - 1)

    def abs2(self) -> "CyclotomicNumber":
        """z * conj(z), a totally real number."""
        return self * self.conjugate()

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"]:
        if isinstance(other, CyclotomicNumber):
            if other.conductor == self.conductor:
                return self, other
            n = math.lcm(self.conductor, other.conductor)
            return self.lift(n), other.lift(n)
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicNumber.rational(other, self.conductor)
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        da, db = a._den, b._den
        num = [x * db + y * da for x, y in zip(a._num, b._num)]
        return CyclotomicNumber._raw(a.conductor, num, da * db)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._raw(self.conductor, [-c for c in self._num], self._den)

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CyclotomicNumber._raw(
                self.conductor,
                [c * other.numerator for c in self._num],
                self._den * other.denominator,
            )
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        field = _field(a.conductor)
        raw = _poly_mul(a._num, b._num)
        return CyclotomicNumber._raw(a.conductor, field.reduce(raw), a._den * b._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta_N)")
            return self * (1 / Fraction(other))
        if isinstance(other, CyclotomicNumber):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.rational(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "CyclotomicNumber":
        """Multiplicative inverse via the extended Euclidean algorithm against Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("0 has no inverse in Q(zeta_N)")
        if self.is_rational():
            return CyclotomicNumber.rational(1 / self.to_fraction(), self.conductor)
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.conductor)]
        a = _trim([Fraction(c) for c in self._num])
        # invariant: s * a == r (mod phi)
        r0, r1 = phi, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul_frac(q, s1))
        if not r1 or r1[0] == 0:
            raise ArithmeticError("element not invertible; Phi_N should be irreducible")
        inv = [c / r1[0] for c in s1]
        # undo the stored common denominator: a = num / den
        inv = [c * self._den for c in inv]
        return CyclotomicNumber(self.conductor, inv)

    # -- comparison / display -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        if isinstance(other, CyclotomicNumber):
            a, b = self._coerce(other)
            return a._den == b._den and a._num == b._num
        return NotImplemented

    def __hash__(self):
        # consistent with == for rationals; non-rational values are only
        # hashed consistently within one conductor
        if self.is_rational():
            return hash(Fraction(self._num[0], self._den))
        return hash((self.conductor, self._num, self._den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"CyclotomicNumber({format_cyclotomic(self)})"

    def __complex__(self):
        v = embed(self, 17)
        return complex(float(v.real), float(v.imag))


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [Fraction(0)] * max(len(a) - db, 1)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            c = c / lead
            q[k - db] = c
            for i, y in enumerate(b):
                if y:
                    a[k - db + i] -= c * y
    return q, _trim(a[:db])


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out) or [Fraction(0)]


def _poly_mul_frac(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def primitive_root(n: int, index: int = 1) -> CyclotomicNumber:
    """zeta_n ** index, which is primitive iff index is coprime to n."""
    if n < 1:
        raise ValueError("order must be positive")
    if math.gcd(index, n) != 1:
        raise ValueError(f"index {index} is not coprime to {n}")
    return CyclotomicNumber.root_of_unity(n, index)


def invert(z: CyclotomicNumber) -> CyclotomicNumber:
    return z.inverse()


def conjugate(z: CyclotomicNumber) -> CyclotomicNumber:
    return z.conjugate()


def embed(z: CyclotomicNumber, digits: int | None = None, index: int = 1) -> mpmath.mpc:
    """Complex value of z under zeta_N -> exp(2 pi i index / N).

    The result is an ``mpmath.mpc`` computed with a few guard digits above
    ``digits``.
    """
    if digits is None:
        digits = default_digits()
    if digits < 15:
        raise ValueError("embedding precision must be at least 15 digits")
    n = z.conductor
    if math.gcd(index, n) != 1:
        raise ValueError(f"embedding index {index} is not coprime to {n}")
    with mpmath.workdps(digits + 10):
        total = mpmath.mpc(0)
        for i, c in enumerate(z._num):
            if c:
                total += c * mpmath.expjpi(mpmath.mpf(2 * i * index) / n)
        total = total / z._den
    return total


def format_cyclotomic(z: CyclotomicNumber) -> str:
    """Serialize as ``"[N; c0, c1, ...]"`` with exact rational coordinates."""
    return "[" + f"{z.conductor}; " + ", ".join(str(c) for c in z.coeffs) + "]"


def format_exact(z: CyclotomicNumber) -> str:
    """``"p/q"`` when z is rational, else the coordinate-list form."""
    if z.is_rational():
        return str(z.to_fraction())
    return format_cyclotomic(z)


def parse_exact(text: str) -> CyclotomicNumber:
    """Inverse of :func:`format_exact`."""
    text = text.strip()
    if text.startswith("["):
        head, _, body = text[1:-1].partition(";")
        parts = [p for p in body.split(",") if p.strip()]
        return CyclotomicNumber(int(head), [Fraction(p.strip()) for p in parts])
    return CyclotomicNumber.rational(Fraction(text))
