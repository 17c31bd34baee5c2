"""Exact arithmetic in Z, imaginary quadratic maximal orders and finite fields.

An element of the order O_d is stored as ``a + b*w`` with ``w = sqrt(d)`` when
``d % 4 != 1`` and ``w = (1 + sqrt(d)) / 2`` otherwise. Ideals are stored by
the Hermite normal form of a Z-basis in the coordinates (1, w). Ideal classes
are identified by reducing the binary quadratic form attached to a Z-basis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, isqrt

from . import intmat


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, isqrt(n) + 1))


@dataclass(frozen=True)
class RingDesc:
    """One of Z, an imaginary quadratic maximal order O_d, or a finite field F_q."""

    kind: str  # "Z", "quadratic", "field"
    d: int = 0
    q: int = 0

    def __post_init__(self):
        if self.kind == "quadratic":
            if self.d >= 0 or not _squarefree(self.d):
                raise ValueError(f"d must be negative and squarefree, got {self.d}")
        elif self.kind == "field":
            p = prime_power_base(self.q)
            if p is None:
                raise ValueError(f"field size must be a prime power, got {self.q}")
        elif self.kind != "Z":
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "RingDesc":
        text = text.strip().replace(" ", "")
        if text in ("Z", "ZZ"):
            return cls("Z")
        m = re.fullmatch(r"Q\(sqrt\((-?\d+)\)\)", text)
        if m:
            return cls("quadratic", d=int(m.group(1)))
        m = re.fullmatch(r"F_?(\d+)", text)
        if m:
            return cls("field", q=int(m.group(1)))
        raise ValueError(f"cannot parse ring {text!r}; expected Z, Q(sqrt(-5)) or F_3")

    def __str__(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "quadratic":
            return f"Q(sqrt({self.d}))"
        return f"F_{self.q}"

    @property
    def is_quadratic(self) -> bool:
        return self.kind == "quadratic"

    @property
    def half_omega(self) -> bool:
        """True when the integral basis is (1, (1+sqrt d)/2)."""
        return self.is_quadratic and self.d % 4 == 1

    @property
    def degree(self) -> int:
        """Z-rank of the ring (1 for Z and fields, 2 for quadratic orders)."""
        return 2 if self.is_quadratic else 1

    @property
    def discriminant(self) -> int:
        if self.kind == "Z":
            return 1
        if self.kind == "field":
            raise ValueError("finite fields have no discriminant here")
        return self.d if self.half_omega else 4 * self.d

    # multiplication in coordinates (a, b) <-> a + b w
    def mul_coords(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        a, b = x
        c, e = y
        if not self.is_quadratic:
            return (a * c, 0)
        if self.half_omega:
            k = (self.d - 1) // 4  # w^2 = w + k
            return (a * c + b * e * k, a * e + b * c + b * e)
        return (a * c + self.d * b * e, a * e + b * c)

    def omega_times(self, x: tuple[int, int]) -> tuple[int, int]:
        return self.mul_coords(x, (0, 1))

    def norm_coords(self, a: int, b: int) -> int:
        if not self.is_quadratic:
            return a * a
        if self.half_omega:
            return a * a + a * b + b * b * (1 - self.d) // 4
        return a * a - self.d * b * b

    def conj_coords(self, a: int, b: int) -> tuple[int, int]:
        if not self.is_quadratic:
            return (a, b)
        if self.half_omega:
            return (a + b, -b)
        return (a, -b)

    def trace_coords(self, a: int, b: int) -> int:
        if not self.is_quadratic:
            return 2 * a
        return 2 * a + b if self.half_omega else 2 * a

    def units(self) -> list["RingElem"]:
        """Torsion units (all units, for the supported rings)."""
        if self.kind == "field":
            raise ValueError("use FiniteField for field arithmetic")
        out = [RingElem(self, 1, 0), RingElem(self, -1, 0)]
        if self.is_quadratic and self.d == -1:
            out += [RingElem(self, 0, 1), RingElem(self, 0, -1)]
        if self.is_quadratic and self.d == -3:
            w = RingElem(self, 0, 1)
            out = [w**k for k in range(6)]
        return out

    def elem(self, a: int, b: int = 0) -> "RingElem":
        return RingElem(self, a, b)

    def height(self, a: int, b: int = 0) -> int:
        """Size measure used to bound enumerations: |a| for Z, the norm otherwise."""
        return abs(a) if not self.is_quadratic else self.norm_coords(a, b)

    def elements_up_to_norm(self, bound: int) -> list["RingElem"]:
        """All elements of norm <= bound in a deterministic order (Z: |a| <= bound)."""
        if not self.is_quadratic:
            vals = sorted(range(-bound, bound + 1), key=lambda a: (abs(a), -a))
            return [RingElem(self, a, 0) for a in vals]
        # norm(a + b w) >= |d| b^2 / 4 on both conventions, so b is bounded
        bmax = isqrt(4 * bound // abs(self.d)) + 1
        amax = isqrt(bound) + bmax + 1
        out = [
            (self.norm_coords(a, b), a, b)
            for b in range(-bmax, bmax + 1)
            for a in range(-amax, amax + 1)
            if self.norm_coords(a, b) <= bound
        ]
        out.sort(key=lambda t: (t[0], abs(t[1]) + abs(t[2]), -t[1], -t[2]))
        return [RingElem(self, a, b) for _, a, b in out]


def prime_power_base(q: int) -> int | None:
    for p in range(2, q + 1):
        if q % p == 0:
            while q % p == 0:
                q //= p
            return p if q == 1 else None
    return None


@dataclass(frozen=True)
class RingElem:
    ring: RingDesc = field(compare=True, repr=False)
    a: int
    b: int = 0

    def _coerce(self, other) -> "RingElem":
        if isinstance(other, int):
            return RingElem(self.ring, other, 0)
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        o = self._coerce(other)
        return RingElem(self.ring, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.ring, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RingElem(self.ring, *self.ring.mul_coords((self.a, self.b), (o.a, o.b)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RingElem(self.ring, 1, 0)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.a or self.b)

    def coords(self) -> tuple[int, int]:
        return (self.a, self.b)

    def norm(self) -> int:
        return self.ring.norm_coords(self.a, self.b)

    def trace(self) -> int:
        return self.ring.trace_coords(self.a, self.b)

    def conj(self) -> "RingElem":
        return RingElem(self.ring, *self.ring.conj_coords(self.a, self.b))

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __repr__(self) -> str:
        if not self.ring.is_quadratic:
            return str(self.a)
        w = "w" if self.ring.half_omega else f"sqrt({self.ring.d})"
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*{w}"
        return f"{self.a}{self.b:+d}*{w}"


def _basis_rows(ring: RingDesc, gens) -> list[list[int]]:
    rows = []
    for g in gens:
        x = g.coords() if isinstance(g, RingElem) else (int(g), 0)
        if ring.is_quadratic:
            rows.append(list(x))
            rows.append(list(ring.omega_times(x)))
        else:
            rows.append([x[0]])
    return rows


@dataclass(frozen=True)
class Ideal:
    """A nonzero ideal, stored by the HNF of a Z-basis in coordinates (1, w)."""

    ring: RingDesc
    hnf: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.hnf:
            raise ValueError("zero ideal")

    @property
    def norm(self) -> int:
        n = 1
        for i, row in enumerate(self.hnf):
            n *= row[i]
        return n

    def basis(self) -> list[RingElem]:
        if self.ring.is_quadratic:
            return [RingElem(self.ring, r[0], r[1]) for r in self.hnf]
        return [RingElem(self.ring, self.hnf[0][0], 0)]

    def contains(self, x) -> bool:
        if isinstance(x, int):
            x = RingElem(self.ring, x, 0)
        v = intmat.reduce_mod(self._vec(x), self.hnf)
        return not any(v)

    def reduce(self, x) -> RingElem:
        """Canonical representative of x modulo the ideal."""
        if isinstance(x, int):
            x = RingElem(self.ring, x, 0)
        v = intmat.reduce_mod(self._vec(x), self.hnf)
        return RingElem(self.ring, v[0], v[1] if self.ring.is_quadratic else 0)

    def residues(self) -> list[RingElem]:
        """All canonical residues of O/I."""
        if not self.ring.is_quadratic:
            return [RingElem(self.ring, r) for r in range(self.hnf[0][0])]
        (a, _), (_, c) = self.hnf
        return [RingElem(self.ring, x, y) for x in range(a) for y in range(c)]

    def _vec(self, x: RingElem) -> list[int]:
        return [x.a, x.b] if self.ring.is_quadratic else [x.a]

    def is_unit(self) -> bool:
        return self.norm == 1

    def conjugate(self) -> "Ideal":
        return ideal_from_generators(self.ring, [g.conj() for g in self.basis()])

    def generator(self) -> RingElem | None:
        """A generator if the ideal is principal, else None."""
        if not self.ring.is_quadratic:
            return RingElem(self.ring, self.hnf[0][0])
        for x in self.ring.elements_up_to_norm(self.norm):
            if x.norm() == self.norm and self.contains(x):
                return x
        return None

    def is_principal(self) -> bool:
        return self.generator() is not None

    def __mul__(self, other):
        return ideal_product(self, other)

    def __add__(self, other):
        return ideal_sum(self, other)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.hnf]

    def __str__(self) -> str:
        return str(self.rows())


class ZeroIdeal:
    """The zero ideal, kept apart from HNF-represented ideals."""

    def __init__(self, ring: RingDesc):
        self.ring = ring

    def __eq__(self, other):
        return isinstance(other, ZeroIdeal) and other.ring == self.ring

    def __hash__(self):
        return hash(("zero", self.ring))

    def contains(self, x) -> bool:
        return not x

    def reduce(self, x) -> RingElem:
        return x if isinstance(x, RingElem) else RingElem(self.ring, x)

    def is_unit(self) -> bool:
        return False

    def rows(self):
        return []

    def __repr__(self):
        return f"ZeroIdeal({self.ring})"


def ideal_from_generators(ring: RingDesc, gens) -> Ideal:
    if ring.kind == "field":
        raise ValueError("ideals of a field are not represented")
    gens = list(gens)
    if not gens:
        raise ValueError("no generators")
    h = intmat.hnf(_basis_rows(ring, gens))
    if not h:
        raise ValueError("zero ideal")
    return Ideal(ring, tuple(tuple(r) for r in h))


def ideal_or_zero(ring: RingDesc, gens):
    """Like :func:`ideal_from_generators` but returns :class:`ZeroIdeal` for (0)."""
    gens = [g for g in gens if g]
    return ideal_from_generators(ring, gens) if gens else ZeroIdeal(ring)


def unit_ideal(ring: RingDesc) -> Ideal:
    return ideal_from_generators(ring, [RingElem(ring, 1)])


def _check_same(a, b):
    if a.ring != b.ring:
        raise ValueError(f"ring mismatch: {a.ring} vs {b.ring}")


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    _check_same(a, b)
    return ideal_from_generators(a.ring, [x * y for x in a.basis() for y in b.basis()])


def ideal_sum(a, b):
    _check_same(a, b)
    if isinstance(a, ZeroIdeal):
        return b
    if isinstance(b, ZeroIdeal):
        return a
    return ideal_from_generators(a.ring, a.basis() + b.basis())


def ideal_intersection(a: Ideal, b: Ideal) -> Ideal:
    _check_same(a, b)
    k = a.ring.degree
    rows = intmat.intersect(a.rows(), b.rows(), k)
    return Ideal(a.ring, tuple(tuple(r) for r in rows))


# -- binary quadratic forms and class groups ---------------------------------


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduce a positive definite form ax^2 + bxy + cy^2 to the unique reduced form."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form must be positive definite")
    while True:
        if not (-a < b <= a):
            # normalize b into (-a, a]
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
            continue
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """All reduced primitive forms of a negative discriminant, principal form first."""
    out = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
    out.sort(key=lambda f: (f[0], abs(f[1]), -f[1]))
    return out


def _sqrt_disc(ring: RingDesc) -> tuple[int, int]:
    """Coordinates of sqrt(D) for D the discriminant."""
    return (-1, 2) if ring.half_omega else (0, 2)


def form_ideal(ring: RingDesc, form: tuple[int, int, int]) -> Ideal:
    """The ideal [a, (-b + sqrt D)/2] attached to a form (a, b, c)."""
    a, b, _ = form
    s0, s1 = _sqrt_disc(ring)
    # (-b + sqrt D)/2 in (1, w) coordinates
    x0, x1 = -b + s0, s1
    return ideal_from_generators(ring, [RingElem(ring, a), RingElem(ring, x0 // 2, x1 // 2)])


def ideal_form(ideal: Ideal) -> tuple[int, int, int]:
    """Reduced form attached to the ideal via a positively oriented Z-basis."""
    alpha, beta = ideal.basis()
    n = ideal.norm
    # the HNF basis is positively oriented (det = norm > 0); the classical
    # correspondence uses (N(a), -Tr(a conj b), N(b)) / N(I) for this orientation
    A = alpha.norm()
    B = (alpha * beta.conj()).trace()
    C = beta.norm()
    assert A % n == 0 and B % n == 0 and C % n == 0
    return reduce_form(A // n, -B // n, C // n)


@dataclass(frozen=True)
class ClassGroup:
    """Finite class group with index 0 the trivial class."""

    ring: RingDesc
    forms: tuple[tuple[int, int, int], ...]
    reps: tuple[Ideal, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.reps)

    @cached_property
    def _index(self) -> dict:
        return {f: i for i, f in enumerate(self.forms)}

    def add(self, i: int, j: int) -> int:
        return self.table[i][j]

    def neg(self, i: int) -> int:
        return self.table[i].index(0)

    def sum(self, classes) -> int:
        out = 0
        for c in classes:
            out = self.table[out][c]
        return out

    def classify(self, ideal: Ideal) -> int:
        if ideal.ring != self.ring:
            raise ValueError("ring mismatch")
        if not self.ring.is_quadratic:
            return 0
        return self._index[ideal_form(ideal)]


def class_group(ring: RingDesc) -> ClassGroup:
    if ring.kind == "field":
        raise ValueError("class groups of fields are not computed")
    if ring.kind == "Z":
        unit = unit_ideal(ring)
        return ClassGroup(ring, ((1, 0, 0),), (unit,), ((0,),))
    forms = tuple(reduced_forms(ring.discriminant))
    reps = tuple(form_ideal(ring, f) for f in forms)
    index = {f: i for i, f in enumerate(forms)}
    table = tuple(
        tuple(index[ideal_form(ideal_product(x, y))] for y in reps) for x in reps
    )
    return ClassGroup(ring, forms, reps, table)


def ideal_class(ideal: Ideal, cg: ClassGroup) -> int:
    return cg.classify(ideal)


def class_number(ring: RingDesc) -> int:
    return class_group(ring).order


# -- finite fields ------------------------------------------------------------


class FiniteField:
    """GF(q) with elements 0..q-1; for q = p^k they encode polynomials base p."""

    def __init__(self, q: int):
        p = prime_power_base(q)
        if p is None:
            raise ValueError(f"{q} is not a prime power")
        self.q, self.p = q, p
        k = 0
        while p**k < q:
            k += 1
        self.k = k
        if k == 1:
            self.add_table = [[(x + y) % q for y in range(q)] for x in range(q)]
            self.mul_table = [[(x * y) % q for y in range(q)] for x in range(q)]
        else:
            self.modulus = self._irreducible()
            self.add_table = [[self._padd(x, y) for y in range(q)] for x in range(q)]
            self.mul_table = [[self._pmul(x, y) for y in range(q)] for x in range(q)]
        self.neg_table = [self.add_table[x].index(0) for x in range(q)]
        self.inv_table = [None] + [self.mul_table[x].index(1) for x in range(1, q)]

    def _digits(self, x):
        return [(x // self.p**i) % self.p for i in range(self.k)]

    def _undigits(self, ds):
        return sum(d * self.p**i for i, d in enumerate(ds))

    def _padd(self, x, y):
        return self._undigits([(s + t) % self.p for s, t in zip(self._digits(x), self._digits(y))])

    def _pmul(self, x, y):
        p, k = self.p, self.k
        xs, ys = self._digits(x), self._digits(y)
        prod = [0] * (2 * k - 1)
        for i, s in enumerate(xs):
            for j, t in enumerate(ys):
                prod[i + j] = (prod[i + j] + s * t) % p
        mod = self.modulus  # monic, length k + 1, low degree first
        for deg in range(2 * k - 2, k - 1, -1):
            f = prod[deg]
            if f:
                for i in range(k + 1):
                    prod[deg - k + i] = (prod[deg - k + i] - f * mod[i]) % p
        return self._undigits(prod[:k])

    def _irreducible(self):
        p, k = self.p, self.k
        for low in product(range(p), repeat=k):
            poly = list(low) + [1]
            if poly[0] == 0:
                continue
            # degree <= 3 here, so irreducible iff no root
            if k <= 3 and all(sum(c * x**i for i, c in enumerate(poly)) % p for x in range(p)):
                return poly
        raise ValueError(f"no irreducible polynomial found for q={self.q}")

    def add(self, x, y):
        return self.add_table[x][y]

    def mul(self, x, y):
        return self.mul_table[x][y]

    def neg(self, x):
        return self.neg_table[x]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return self.inv_table[x]

    def sub(self, x, y):
        return self.add_table[x][self.neg_table[y]]

    def generator(self) -> int:
        """A generator of the multiplicative group."""
        for g in range(2, self.q) if self.q > 2 else [1]:
            seen, x = set(), 1
            for _ in range(self.q - 1):
                x = self.mul(x, g)
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        return 1
