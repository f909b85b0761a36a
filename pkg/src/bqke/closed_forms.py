"""Closed forms for power sums over roots of unity and the resulting C values.

F(N, r) is the sum of xi^r / (1 - xi)^4 over the N-th roots of unity
xi != 1. It is a quartic polynomial in (N, r) on 1 <= r <= N, and
720 * F(N, r) is an integer congruent to parity_poly(r) mod N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import CyclotomicNumber

BRUTEFORCE_CAP = 500


class HypothesisError(ValueError):
    """The closed form does not apply to these parameters."""


def _binom_poly(x: int, k: int) -> Fraction:
    """x choose k as a polynomial in x (valid for negative x too)."""
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(x - i, i + 1)
    return out


def _check_nr(N: int, r: int) -> None:
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    if not isinstance(r, int):
        raise ValueError("r must be an integer")


def root_sum_closed(N: int, r: int) -> Fraction:
    """F(N, r) from the quartic closed form; r is first reduced into [1, N]."""
    _check_nr(N, r)
    r = (r - 1) % N + 1
    N = Fraction(N)
    return (
        N**4 / 720
        - (r * r - 4 * r + Fraction(11, 3)) * N**2 / 24
        + _binom_poly(r - 1, 3) * N / 2
        - Fraction(r**4, 24)
        + Fraction(r**3, 3)
        - Fraction(11 * r * r, 12)
        + r
        - Fraction(251, 720)
    )


def root_sum_bruteforce(N: int, r: int) -> Fraction:
    """F(N, r) by summing exactly in Q(zeta_N)."""
    _check_nr(N, r)
    if N > BRUTEFORCE_CAP:
        raise ValueError(f"N={N} exceeds the brute-force cap {BRUTEFORCE_CAP}")
    total = CyclotomicNumber.rational(0, N)
    one = CyclotomicNumber.rational(1, N)
    for k in range(1, N):
        xi = CyclotomicNumber.root_of_unity(N, k)
        total = total + xi ** (r % N) * ((one - xi) ** 4).inverse()
    if not total.is_rational():
        raise ArithmeticError("root sum is not rational")
    return total.to_fraction()


def _series_coeffs(num: list[Fraction], den: list[Fraction], count: int) -> list[Fraction]:
    """First count coefficients of num/den as a power series (den[0] != 0)."""
    out = []
    num = num + [Fraction(0)] * count
    for k in range(count):
        c = num[k] / den[0]
        out.append(c)
        for i in range(1, len(den)):
            if k + i < len(num):
                num[k + i] -= c * den[i]
    return out


def root_sum_series(N: int, r: int, k: int = 4) -> Fraction:
    """Coefficient of z^k in 1 + N z (1-z)^(r-1) / ((1-z)^N - 1).

    This generating function collects the sums of xi^r / (1 - xi)^n over
    xi != 1 for every n, so k = 4 reproduces F(N, r). Requires 1 <= r <= N.
    """
    _check_nr(N, r)
    if not 1 <= r <= N:
        raise ValueError("the generating function needs 1 <= r <= N")
    if k < 0:
        raise ValueError("k must be non-negative")
    # (1-z)^N - 1 = -N z + ..., so divide numerator and denominator by z
    num = [Fraction(N * math.comb(r - 1, i) * (-1) ** i) for i in range(r)]
    den = [Fraction(math.comb(N, i + 1) * (-1) ** (i + 1)) for i in range(N)]
    coeffs = _series_coeffs(num, den, k + 1)
    return coeffs[k] + (1 if k == 0 else 0)


def parity_poly(r: int) -> int:
    """The integer quartic that 720 * F(N, r) is congruent to modulo N."""
    return -30 * r**4 + 240 * r**3 - 660 * r**2 + 720 * r - 251


# -- CRT bookkeeping -----------------------------------------------------


@dataclass(frozen=True)
class ResidueSpec:
    """The residue r in [0, m1*m2) with r = t1 mod m1 and r = t2 mod m2."""

    m1: int
    m2: int
    t1: int
    t2: int
    r: int

    @property
    def N(self) -> int:
        return self.m1 * self.m2


def solve_crt(m1: int, m2: int, t1: int = 0, t2: int = 2) -> ResidueSpec:
    if m1 < 1 or m2 < 1:
        raise ValueError("moduli must be positive")
    if math.gcd(m1, m2) != 1:
        raise HypothesisError(f"moduli {m1} and {m2} are not coprime")
    N = m1 * m2
    r = t1 % m1 if m2 == 1 else (t1 + m1 * ((t2 - t1) * pow(m1, -1, m2))) % N
    if (r - t1) % m1 or (r - t2) % m2:
        raise ArithmeticError("CRT solution failed verification")
    return ResidueSpec(m1, m2, t1, t2, r)


def crt_residue(family: str, p: int, n: int = 1, m: int = 1) -> ResidueSpec:
    """The residue r with xi^r = u^2 on the diagonal elements of a family.

    Moduli pairs: Q (4n, p); D (2n+1, 2^(m-1) p); P48 (8, p); P120 (10, p);
    Pprime (4, p 3^(m-1)). Targets are always (0, 2).
    """
    pairs = {
        "Q": lambda: (4 * n, p),
        "D": lambda: (2 * n + 1, 2 ** (m - 1) * p),
        "P48": lambda: (8, p),
        "P120": lambda: (10, p),
        "Pprime": lambda: (4, p * 3 ** (m - 1)),
    }
    if family not in pairs:
        raise HypothesisError(f"no residue rule for family {family!r}")
    return solve_crt(*pairs[family]())


def root_combination(N: int, r: int) -> Fraction:
    """-3 F(N, r) - 3 F(N, r+1) + F(N, 2r-1): the sum over the diagonal elements."""
    return -3 * root_sum_closed(N, r) - 3 * root_sum_closed(N, r + 1) + root_sum_closed(N, 2 * r - 1)


def parity_residue(N: int, r: int) -> int:
    """Expected residue of 720 * root_combination(N, r) modulo N."""
    return (-3 * parity_poly(r) - 3 * parity_poly(r + 1) + parity_poly(2 * r - 1)) % N


def scalar_cyclic_c(p: int) -> Fraction:
    """C for the scalar group of p-th roots of unity times id."""
    if p < 1:
        raise ValueError("p must be positive")
    if p == 1:
        return Fraction(0)
    return -3 * root_sum_closed(p, 2) - 2 * root_sum_closed(p, 3)


# -- diagonal-part polynomials -------------------------------------------

_P48_C2 = {
    1: (Fraction(-28, 9), -12, Fraction(5, 9), Fraction(-1, 144)),
    3: (Fraction(-28, 9), 12, Fraction(5, 9), Fraction(-1, 144)),
}

_P120_C2 = {
    1: (Fraction(-265, 9), -20, Fraction(25, 18), Fraction(-1, 144)),
    2: (Fraction(575, 9), 20, Fraction(-35, 18), Fraction(-1, 144)),
    3: (Fraction(575, 9), -20, Fraction(-35, 18), Fraction(-1, 144)),
    4: (Fraction(-265, 9), 20, Fraction(25, 18), Fraction(-1, 144)),
}

# Coefficients as they were originally published for the classes 3 and 4
# mod 5. They disagree with the root sums and are kept only for comparison.
P120_C2_PRINTED = {
    3: (Fraction(455, 9), -8, Fraction(-11, 18), Fraction(-1, 144)),
    4: (Fraction(-265, 9), -20, Fraction(25, 18), Fraction(-1, 144)),
}

_PPRIME_C2 = (Fraction(20, 9), 0, Fraction(-7, 9), Fraction(-1, 144))


def _quartic(coeffs, x: int) -> Fraction:
    a4, a3, a2, a0 = coeffs
    return a4 * x**4 + a3 * x**3 + a2 * x**2 + a0


def c2_residue(family: str, p: int, m: int = 1) -> ResidueSpec:
    """CRT data for the |gamma_11| = 1 part of P48, P120 or Pprime(m) x Z/p."""
    if family == "P48":
        if math.gcd(p, 48) != 1:
            raise HypothesisError("P48 needs gcd(p, 48) = 1")
        return crt_residue("P48", p)
    if family == "P120":
        if math.gcd(p, 120) != 1:
            raise HypothesisError("P120 needs gcd(p, 120) = 1")
        return crt_residue("P120", p)
    if family == "Pprime":
        if m < 1 or math.gcd(p, 6) != 1:
            raise HypothesisError("Pprime needs m >= 1 and gcd(p, 6) = 1")
        return crt_residue("Pprime", p, m=m)
    raise HypothesisError(f"no diagonal-part closed form for family {family!r}")


def c2_polynomial(family: str, p: int, m: int = 1) -> Fraction:
    """The quartic in p (or p * 3^(m-1) for Pprime) for the |gamma_11| = 1 part."""
    c2_residue(family, p, m)
    if family == "P48":
        return _quartic(_P48_C2[p % 4], p)
    if family == "P120":
        return _quartic(_P120_C2[p % 5], p)
    return _quartic(_PPRIME_C2, p * 3 ** (m - 1))


def c2_closed(family: str, p: int, m: int = 1) -> Fraction:
    """The |gamma_11| = 1 part via the F-combination, checked against the quartic."""
    res = c2_residue(family, p, m)
    value = root_combination(res.N, res.r)
    poly = c2_polynomial(family, p, m)
    if value != poly:
        raise ArithmeticError(f"quartic {poly} disagrees with root sums {value} for {family}, p={p}")
    return value


def c_closed_qd(family: str, n: int, p: int, m: int = 2) -> Fraction:
    """C for Q(n) x Z/p or D(m, n) x Z/p with odd p >= 3, or for the scalar
    cyclic group (family "trivial" or "scalar", any p).

    The anti-diagonal elements cancel over the cyclic factor, leaving the
    diagonal F-combination.
    """
    if family in ("trivial", "scalar"):
        return scalar_cyclic_c(p)
    res = qd_residue(family, n, p, m)
    return root_combination(res.N, res.r)


def qd_residue(family: str, n: int, p: int, m: int = 2) -> ResidueSpec:
    if p < 3 or p % 2 == 0:
        raise HypothesisError("the diagonal reduction needs odd p >= 3")
    if family == "Q":
        if n < 1 or math.gcd(p, 8 * n) != 1:
            raise HypothesisError("Q(n) x Z/p needs gcd(p, 8n) = 1")
        return crt_residue("Q", p, n=n)
    if family == "D":
        if m < 2 or n < 1 or math.gcd(p, 2**m * (2 * n + 1)) != 1:
            raise HypothesisError("D(m, n) x Z/p needs m >= 2 and gcd(p, 2^m (2n+1)) = 1")
        return crt_residue("D", p, n=n, m=m)
    raise HypothesisError(f"no diagonal closed form for family {family!r}")


# names matching the usual notation
F_closed = root_sum_closed
F_bruteforce = root_sum_bruteforce
series_oracle = root_sum_series
