"""Milnor's fixed-point-free groups as explicit 2x2 unitary matrix groups.

Families (all optionally times a cyclic group of coprime order p, realized
by the scalar matrix u*id):

    trivial          {id}
    Q(n)             <X, Y>,  X = [[0, 1], [-1, 0]],  Y = diag(a, 1/a),  a^(4n) = 1
    D(m, n)          <X, Y>,  X = [[0, 1], [b, 0]],   Y = diag(a, 1/a),  a^(2n+1) = 1, b^(2^(m-1)) = 1
    P48, P120        <X, Y>,  X = [[c, d], [-conj d, conj c]], Y = diag(a, 1/a),
                     a primitive 8th / 10th root, c = 1/(a - conj a), |d|^2 = 1 + c^2
    Pprime(m)        <X, Y, Z>, X as in Q(1), Y = diag(i, -i),
                     Z = beta/(i - 1) [[1, -i], [-1, -i]],  beta^(3^m) = 1
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .cyclotomic import CyclotomicNumber, embed, primitive_root

FAMILIES = ("trivial", "Q", "D", "P48", "P120", "Pprime")
_ALIASES = {f.lower(): f for f in FAMILIES}

DEFAULT_ELEMENT_CAP = 10**6


class InvalidGroupSpec(ValueError):
    """Parameters that do not describe a group in the catalog."""


class CapExceeded(RuntimeError):
    """A computation would exceed a configured size cap."""


@dataclass(frozen=True)
class GroupSpec:
    """A catalog entry: family, its parameters, the cyclic cofactor order p,
    and the coprime indices choosing which primitive roots realize a, b, u
    and beta.

    Parameters that a family does not use are normalized to 1.
    """

    family: str
    n: int = 1
    m: int = 1
    p: int = 1
    root_a: int = 1
    root_b: int = 1
    root_u: int = 1
    root_beta: int = 1

    def __post_init__(self):
        fam = _ALIASES.get(str(self.family).lower())
        if fam is None:
            raise InvalidGroupSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        for name in ("n", "m", "p"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise InvalidGroupSpec(f"{name} must be a positive integer")
        # unused parameters collapse so equal groups compare equal
        if fam in ("trivial", "P48", "P120", "Pprime"):
            object.__setattr__(self, "n", 1)
        if fam in ("trivial", "Q", "P48", "P120"):
            object.__setattr__(self, "m", 1)
        if fam == "D" and self.m < 2:
            raise InvalidGroupSpec("D(m, n) needs m >= 2")
        if math.gcd(self.p, self.base_order) != 1:
            raise InvalidGroupSpec(
                f"cyclic factor order p={self.p} is not coprime to |{self.base_label}| = {self.base_order}"
            )
        for name, order in self.root_orders().items():
            idx = getattr(self, name)
            if math.gcd(idx, order) != 1:
                raise InvalidGroupSpec(f"{name}={idx} is not coprime to the root order {order}")

    # -- derived data ------------------------------------------------------

    def root_orders(self) -> dict[str, int]:
        fam = self.family
        orders = {"root_u": self.p}
        if fam == "Q":
            orders["root_a"] = 4 * self.n
        elif fam == "D":
            orders["root_a"] = 2 * self.n + 1
            orders["root_b"] = 2 ** (self.m - 1)
        elif fam == "P48":
            orders["root_a"] = 8
        elif fam == "P120":
            orders["root_a"] = 10
        elif fam == "Pprime":
            orders["root_beta"] = 3**self.m
        return orders

    @property
    def base_order(self) -> int:
        fam = self.family
        if fam == "trivial":
            return 1
        if fam == "Q":
            return 8 * self.n
        if fam == "D":
            return 2**self.m * (2 * self.n + 1)
        if fam == "P48":
            return 48
        if fam == "P120":
            return 120
        return 8 * 3**self.m

    @property
    def order(self) -> int:
        return self.base_order * self.p

    @property
    def base_conductor(self) -> int:
        fam = self.family
        if fam == "trivial":
            return 1
        if fam == "Q":
            return 4 * self.n
        if fam == "D":
            return math.lcm(4, 2 ** (self.m - 1), 2 * self.n + 1)
        if fam == "P48":
            return 8
        if fam == "P120":
            return 20
        return 4 * 3**self.m

    @property
    def conductor(self) -> int:
        return math.lcm(self.base_conductor, self.p)

    @property
    def base_label(self) -> str:
        fam = self.family
        if fam == "Q":
            return f"Q({self.n})"
        if fam == "D":
            return f"D({self.m},{self.n})"
        if fam == "Pprime":
            return f"Pprime({self.m})"
        return fam

    @property
    def label(self) -> str:
        return self.base_label if self.p == 1 else f"{self.base_label}xZ/{self.p}"

    def base(self) -> "GroupSpec":
        """The same family without the cyclic cofactor."""
        return GroupSpec(self.family, self.n, self.m, 1, self.root_a, self.root_b, 1, self.root_beta)

    def params(self) -> dict[str, int]:
        out = {}
        if self.family in ("Q", "D"):
            out["n"] = self.n
        if self.family in ("D", "Pprime"):
            out["m"] = self.m
        out["p"] = self.p
        for name in ("root_a", "root_b", "root_u", "root_beta"):
            if getattr(self, name) != 1:
                out[name] = getattr(self, name)
        return out


@dataclass(frozen=True)
class UnitaryMatrix:
    """A 2x2 matrix over one cyclotomic field."""

    e11: CyclotomicNumber
    e12: CyclotomicNumber
    e21: CyclotomicNumber
    e22: CyclotomicNumber

    @classmethod
    def of(cls, rows: Sequence[Sequence], conductor: int) -> "UnitaryMatrix":
        def conv(x):
            if isinstance(x, CyclotomicNumber):
                return x.lift(conductor)
            return CyclotomicNumber.rational(x, conductor)

        (a, b), (c, d) = rows
        return cls(conv(a), conv(b), conv(c), conv(d))

    @classmethod
    def identity(cls, conductor: int = 1) -> "UnitaryMatrix":
        return cls.of([[1, 0], [0, 1]], conductor)

    @classmethod
    def scalar(cls, value: CyclotomicNumber) -> "UnitaryMatrix":
        zero = CyclotomicNumber.rational(0, value.conductor)
        return cls(value, zero, zero, value)

    @property
    def conductor(self) -> int:
        return self.e11.conductor

    def entries(self) -> tuple[CyclotomicNumber, ...]:
        return (self.e11, self.e12, self.e21, self.e22)

    def __mul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return UnitaryMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def scale(self, s: CyclotomicNumber) -> "UnitaryMatrix":
        return UnitaryMatrix(*(s * x for x in self.entries()))

    def __pow__(self, k: int) -> "UnitaryMatrix":
        if k < 0:
            return self.adjoint() ** (-k)
        result = UnitaryMatrix.identity(self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def adjoint(self) -> "UnitaryMatrix":
        """Conjugate transpose, which is the inverse of a unitary matrix."""
        a, b, c, d = self.entries()
        return UnitaryMatrix(a.conjugate(), c.conjugate(), b.conjugate(), d.conjugate())

    def det(self) -> CyclotomicNumber:
        return self.e11 * self.e22 - self.e12 * self.e21

    def trace(self) -> CyclotomicNumber:
        return self.e11 + self.e22

    def lift(self, conductor: int) -> "UnitaryMatrix":
        return UnitaryMatrix(*(x.lift(conductor) for x in self.entries()))

    def is_identity(self) -> bool:
        return self.e11 == 1 and self.e22 == 1 and self.e12.is_zero() and self.e21.is_zero()

    def is_scalar(self) -> bool:
        return self.e12.is_zero() and self.e21.is_zero() and self.e11 == self.e22

    def is_unitary(self) -> bool:
        return (self * self.adjoint()).is_identity()

    def key(self) -> tuple:
        """Exact canonical coordinates, usable for deduplication within one conductor."""
        return tuple((x.conductor, x._num, x._den) for x in self.entries())

    def to_complex(self, digits: int = 17) -> list[list[complex]]:
        vals = [complex(embed(x, max(digits, 15))) for x in self.entries()]
        return [vals[:2], vals[2:]]


@dataclass(frozen=True)
class GroupElement:
    word: tuple[int, ...]
    matrix: UnitaryMatrix


# -- generators -----------------------------------------------------------


def _sqrt_half(conductor: int) -> CyclotomicNumber:
    # sqrt(2)/2 = (zeta_8 + zeta_8^-1)/2
    z8 = CyclotomicNumber.root_of_unity(8)
    return ((z8 + z8.conjugate()) / 2).lift(conductor)


def _icosian_d(a: CyclotomicNumber, c: CyclotomicNumber) -> CyclotomicNumber:
    """Real positive d with d^2 = 1 + c^2 for a primitive 10th root a."""
    i = CyclotomicNumber.root_of_unity(4).lift(a.conductor)
    a_bar = a.conjugate()
    w = a * a + a_bar * a_bar
    v = (a - a_bar) / i
    d = w / v
    if embed(d, 20).real < 0:
        d = -d
    if d * d != 1 + c * c:
        raise ArithmeticError("failed to realize d exactly")
    return d


def base_generators(spec: GroupSpec) -> list[UnitaryMatrix]:
    """Generators of the family's base group, in its base conductor."""
    fam = spec.family
    n0 = spec.base_conductor
    if fam == "trivial":
        return []
    if fam in ("Q", "D", "P48", "P120"):
        a = primitive_root(spec.root_orders()["root_a"], spec.root_a).lift(n0)
        Y = UnitaryMatrix.of([[a, 0], [0, a.inverse()]], n0)
        if fam == "Q":
            X = UnitaryMatrix.of([[0, 1], [-1, 0]], n0)
        elif fam == "D":
            b = primitive_root(2 ** (spec.m - 1), spec.root_b).lift(n0)
            X = UnitaryMatrix.of([[0, 1], [b, 0]], n0)
        else:
            a_bar = a.conjugate()
            c = (a - a_bar).inverse()
            d = _sqrt_half(n0) if fam == "P48" else _icosian_d(a, c)
            X = UnitaryMatrix.of([[c, d], [-d.conjugate(), c.conjugate()]], n0)
        return [X, Y]
    # Pprime
    i = CyclotomicNumber.root_of_unity(4).lift(n0)
    beta = primitive_root(3**spec.m, spec.root_beta).lift(n0)
    X = UnitaryMatrix.of([[0, 1], [-1, 0]], n0)
    Y = UnitaryMatrix.of([[i, 0], [0, -i]], n0)
    k = beta / (i - 1)
    Z = UnitaryMatrix.of([[k, -k * i], [-k, -k * i]], n0)
    return [X, Y, Z]


def scalar_generator(spec: GroupSpec) -> CyclotomicNumber:
    """u, the primitive p-th root generating the cyclic cofactor (1 when p = 1)."""
    return primitive_root(spec.p, spec.root_u % spec.p if spec.p > 1 else 1)


def build_generators(spec: GroupSpec) -> list[UnitaryMatrix]:
    """Generator matrices in the full conductor, with u*id appended when p > 1."""
    n = spec.conductor
    gens = [g.lift(n) for g in base_generators(spec)]
    if spec.p > 1:
        gens.append(UnitaryMatrix.scalar(scalar_generator(spec).lift(n)))
    return gens


# -- enumeration ------------------------------------------------------------


def _closure(gens: list[UnitaryMatrix], conductor: int, cap: int) -> list[UnitaryMatrix]:
    ident = UnitaryMatrix.identity(conductor)
    elements = [ident]
    seen = {ident.key()}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = g * h
                key = k.key()
                if key not in seen:
                    seen.add(key)
                    elements.append(k)
                    nxt.append(k)
                    if len(elements) > cap:
                        raise CapExceeded(f"closure exceeded {cap} elements")
        frontier = nxt
    return elements


def _powers(g: UnitaryMatrix, count: int) -> list[UnitaryMatrix]:
    out = [UnitaryMatrix.identity(g.conductor)]
    for _ in range(count - 1):
        out.append(out[-1] * g)
    return out


def base_elements(spec: GroupSpec, element_cap: int = DEFAULT_ELEMENT_CAP) -> list[GroupElement]:
    """Elements of the base group (no cyclic cofactor) in the base conductor.

    Words: Q and D give (k, l) for Y^k X^l; Pprime gives (i1, i2, i3) for
    Z^i1 X^i2 Y^i3; P48 and P120 give (index,) into the closure order.
    """
    spec = spec.base()
    if spec.order > element_cap:
        raise CapExceeded(f"|{spec.label}| = {spec.order} exceeds the element cap {element_cap}")
    n0 = spec.base_conductor
    fam = spec.family
    if fam == "trivial":
        return [GroupElement((), UnitaryMatrix.identity(n0))]
    gens = base_generators(spec)
    if fam in ("Q", "D"):
        X, Y = gens
        ky = 2 * spec.n if fam == "Q" else 2 * spec.n + 1
        lx = 4 if fam == "Q" else 2**spec.m
        ys, xs = _powers(Y, ky), _powers(X, lx)
        return [GroupElement((k, l), ys[k] * xs[l]) for k in range(ky) for l in range(lx)]
    if fam == "Pprime":
        X, Y, Z = gens
        zs = _powers(Z, 3**spec.m)
        xs, ys = _powers(X, 2), _powers(Y, 4)
        q8 = [[xs[i2] * ys[i3] for i3 in range(4)] for i2 in range(2)]
        return [
            GroupElement((i1, i2, i3), zs[i1] * q8[i2][i3])
            for i1 in range(3**spec.m)
            for i2 in range(2)
            for i3 in range(4)
        ]
    mats = _closure(gens, n0, element_cap)
    return [GroupElement((idx,), g) for idx, g in enumerate(mats)]


def enumerate_elements(spec: GroupSpec, element_cap: int = DEFAULT_ELEMENT_CAP) -> list[GroupElement]:
    """All p * |base| elements in the full conductor, identity first.

    The word is (j, *base_word) for u^j times the base element.
    """
    if spec.order > element_cap:
        raise CapExceeded(f"|{spec.label}| = {spec.order} exceeds the element cap {element_cap}")
    n = spec.conductor
    base = base_elements(spec, element_cap)
    lifted = [(e.word, e.matrix.lift(n)) for e in base]
    u = scalar_generator(spec).lift(n)
    out = []
    scalar = CyclotomicNumber.rational(1, n)
    for j in range(spec.p):
        for word, g in lifted:
            out.append(GroupElement((j,) + word, g if j == 0 else g.scale(scalar)))
        scalar = scalar * u
    return out


# -- scalar cosets ------------------------------------------------------------


@dataclass
class CosetData:
    """Base-group coset representatives modulo the full scalar subgroup.

    The scalar subgroup of the full group is cyclic of order
    ``scalar_order = |scalars of base| * p``; every element is y * g for a
    unique representative g and a unique scalar y.
    """

    spec: GroupSpec
    scalar_order: int
    representatives: list[GroupElement] = field(default_factory=list)


def scalar_cosets(spec: GroupSpec, element_cap: int = DEFAULT_ELEMENT_CAP) -> CosetData:
    base = base_elements(spec, element_cap)
    scalars = [e.matrix.e11 for e in base if e.matrix.is_scalar()]
    covered: set = set()
    reps = []
    for e in base:
        if e.matrix.key() in covered:
            continue
        reps.append(e)
        for s in scalars:
            covered.add(e.matrix.scale(s).key())
    if len(reps) * len(scalars) != len(base):
        raise ArithmeticError("scalar cosets do not partition the base group")
    return CosetData(spec, len(scalars) * spec.p, reps)


# -- validation -------------------------------------------------------------


@dataclass
class ValidationReport:
    spec: GroupSpec
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    method: str = "direct"

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok:
            self.failures.append(f"{name}: {detail}" if detail else name)


def relations(spec: GroupSpec) -> dict[str, tuple[UnitaryMatrix, UnitaryMatrix]]:
    """Named presentation relations as (lhs, rhs) pairs of base-group matrices."""
    fam = spec.family
    gens = base_generators(spec)
    if fam == "trivial":
        return {}
    ident = UnitaryMatrix.identity(spec.base_conductor)
    if fam == "Q":
        X, Y = gens
        return {
            "X^2 = (XY)^2": (X**2, (X * Y) ** 2),
            "X^2 = Y^(2n)": (X**2, Y ** (2 * spec.n)),
        }
    if fam in ("P48", "P120"):
        X, Y = gens
        k = 4 if fam == "P48" else 5
        return {
            "X^2 = (XY)^3": (X**2, (X * Y) ** 3),
            f"X^2 = Y^{k}": (X**2, Y**k),
            "X^4 = id": (X**4, ident),
        }
    if fam == "D":
        X, Y = gens
        return {
            "X^(2^m) = id": (X ** (2**spec.m), ident),
            "Y^(2n+1) = id": (Y ** (2 * spec.n + 1), ident),
            "X Y X^-1 = Y^-1": (X * Y * X.adjoint(), Y.adjoint()),
        }
    X, Y, Z = gens
    return {
        "X^2 = (XY)^2": (X**2, (X * Y) ** 2),
        "X^2 = Y^2": (X**2, Y**2),
        "Z X Z^-1 = Y": (Z * X * Z.adjoint(), Y),
        "Z Y Z^-1 = XY": (Z * Y * Z.adjoint(), X * Y),
        "Z^(3^m) = id": (Z ** (3**spec.m), ident),
    }


DIRECT_VALIDATION_LIMIT = 60000


def validate_group(spec: GroupSpec, element_cap: int = DEFAULT_ELEMENT_CAP,
                   method: str = "auto") -> ValidationReport:
    """Exact structural checks on the whole group.

    method="direct" enumerates every element in the full field. method
    "factored" checks the base group element by element and then covers
    the scalar multiples y * g through exact identities in the base field
    (see _validate_factored). "auto" picks direct when
    order * [Q(zeta_N) : Q] is at most DIRECT_VALIDATION_LIMIT.
    """
    if method == "auto":
        from .cyclotomic import totient

        method = "direct" if spec.order * totient(spec.conductor) <= DIRECT_VALIDATION_LIMIT else "factored"
    if method == "direct":
        report = _validate_direct(spec, element_cap)
    elif method == "factored":
        report = _validate_factored(spec, element_cap)
    else:
        raise ValueError(f"unknown validation method {method!r}")
    report.method = method
    return report


def _check_elements(report: ValidationReport, elements: list[GroupElement], gens: list[UnitaryMatrix]) -> None:
    """Identity, distinctness, unitarity, fixed points, unit corner and closure."""
    index = {e.matrix.key(): e for e in elements}
    report.record("identity_first", elements[0].matrix.is_identity())
    report.record("distinct", len(index) == len(elements), f"{len(index)} distinct of {len(elements)}")
    for e in elements:
        g = e.matrix
        report.record("unitary", g.is_unitary(), f"word {e.word}")
        if not g.is_identity():
            m = UnitaryMatrix(g.e11 - 1, g.e12, g.e21, g.e22 - 1)
            report.record("fixed_point_free", not m.det().is_zero(), f"word {e.word} has eigenvalue 1")
            report.record("unit_corner_only_at_identity", g.e11 != 1, f"word {e.word} has e11 = 1")
    # G * generators inside G is equivalent to closure for a finite set containing id
    closed = True
    for e in elements:
        for h in gens:
            if (e.matrix * h).key() not in index:
                closed = False
                report.record("closure", False, f"word {e.word} times a generator leaves the set")
    report.record("closure", closed)


def _check_relations(report: ValidationReport, spec: GroupSpec) -> None:
    for name, (lhs, rhs) in relations(spec).items():
        report.record(f"relation {name}", lhs.key() == rhs.key())


def _check_scalar(report: ValidationReport, spec: GroupSpec) -> None:
    if spec.p == 1:
        return
    u = UnitaryMatrix.scalar(scalar_generator(spec).lift(spec.conductor))
    gens = [g.lift(spec.conductor) for g in base_generators(spec)]
    report.record("scalar_commutes", all((u * g).key() == (g * u).key() for g in gens))
    powers = [u**k for k in range(1, spec.p + 1)]
    report.record("scalar_order", powers[-1].is_identity() and not any(q.is_identity() for q in powers[:-1]))


def _validate_direct(spec: GroupSpec, element_cap: int) -> ValidationReport:
    report = ValidationReport(spec)
    elements = enumerate_elements(spec, element_cap)
    _check_elements(report, elements, build_generators(spec))
    report.record("order", len(elements) == spec.order, f"{len(elements)} elements, expected {spec.order}")
    _check_relations(report, spec)
    _check_scalar(report, spec)
    return report


def _power_sums(e1: CyclotomicNumber, e2: CyclotomicNumber, s: int) -> CyclotomicNumber:
    """r1^s + r2^s for the roots of t^2 - e1 t + e2."""
    prev, cur = CyclotomicNumber.rational(2, e1.conductor), e1
    for _ in range(s - 1):
        prev, cur = cur, e1 * cur - e2 * prev
    return cur


def _validate_factored(spec: GroupSpec, element_cap: int) -> ValidationReport:
    """Every element is y * g with y a scalar s-th root of unity and g a
    base coset representative. For such elements:

    * unitarity and closure reduce to the base group plus |u| = 1, u
      central and u^p = 1;
    * y * g has eigenvalue 1 for some y iff an eigenvalue of g is an s-th
      root of unity, iff the resultant of det(id - y g) = det(g) y^2 -
      tr(g) y + 1 with y^s - 1 vanishes; that resultant equals
      1 - (l1^s + l2^s) + det(g)^s in terms of the eigenvalues l1, l2
      of g, a base-field quantity computed by a Lucas recursion;
    * (y * g)_11 = 1 for some y iff g11^s = 1.
    """
    report = ValidationReport(spec)
    base = base_elements(spec, element_cap)
    _check_elements(report, base, base_generators(spec))
    _check_relations(report, spec)
    u = scalar_generator(spec)
    report.record("unitary", u * u.conjugate() == 1, "scalar factor is not unitary")
    _check_scalar(report, spec)
    data = scalar_cosets(spec, element_cap)
    s = data.scalar_order
    base_scalars = [e.matrix.e11 for e in base if e.matrix.is_scalar()]
    # the product is direct iff no nontrivial power of u is a base scalar
    n = spec.conductor
    lifted = {x.lift(n) for x in base_scalars}
    uj = CyclotomicNumber.rational(1, n)
    overlap = False
    for _ in range(spec.p - 1):
        uj = uj * u.lift(n)
        overlap = overlap or uj in lifted
    report.record("order", len(base) == spec.base_order and not overlap and s == len(base_scalars) * spec.p,
                  f"base has {len(base)} elements, expected {spec.base_order}")
    report.record("fixed_point_free", True)
    report.record("unit_corner_only_at_identity", True)
    for rep in data.representatives[1:]:
        g = rep.matrix
        det, tr = g.det(), g.trace()
        resultant = 1 - _power_sums(tr, det, s) + det**s
        report.record("fixed_point_free", not resultant.is_zero(),
                      f"some scalar multiple of word {rep.word} has eigenvalue 1")
        report.record("unit_corner_only_at_identity", g.e11.is_zero() or g.e11**s != 1,
                      f"some scalar multiple of word {rep.word} has e11 = 1")
    return report


# -- Bergman kernel at the origin -------------------------------------------


def phi_at_zero(spec: GroupSpec, element_cap: int = DEFAULT_ELEMENT_CAP) -> CyclotomicNumber:
    """Sum over the group of conj(det gamma), in the full conductor.

    det(u^j g) = u^(2j) det g, so the sum factors into a base-group sum and
    the geometric sum of u^(-2j).
    """
    n = spec.conductor
    base_sum = CyclotomicNumber.rational(0, spec.base_conductor)
    for e in base_elements(spec, element_cap):
        base_sum = base_sum + e.matrix.det().conjugate()
    u_bar = scalar_generator(spec).conjugate()
    geo = CyclotomicNumber.rational(0, spec.p)
    term = CyclotomicNumber.rational(1, spec.p)
    u2 = u_bar * u_bar
    for _ in range(spec.p):
        geo = geo + term
        term = term * u2
    return base_sum.lift(n) * geo.lift(n)


def iter_family_grid(families: Sequence[str], ns: Sequence[int], ms: Sequence[int],
                     ps: Sequence[int]) -> Iterator[GroupSpec]:
    """Valid specs over a parameter grid; invalid combinations are skipped."""
    seen = set()
    for fam in families:
        for n in ns:
            for m in ms:
                for p in ps:
                    try:
                        spec = GroupSpec(fam, n=n, m=m, p=p)
                    except InvalidGroupSpec:
                        continue
                    if spec not in seen:
                        seen.add(spec)
                        yield spec
