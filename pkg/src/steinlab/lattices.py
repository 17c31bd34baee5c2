"""O-submodules of O^n handled as integer lattices in Z^(n * deg).

Coordinates: the vector (x_1, ..., x_n) with x_i = a_i + b_i w is flattened to
(a_1, b_1, ..., a_n, b_n) for quadratic rings and to (x_1, ..., x_n) over Z.
A submodule is stored as the HNF of a Z-basis, so equality is tuple equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

from . import intmat
from .arith import ClassGroup, RingDesc, RingElem, ideal_from_generators


class SearchExhausted(RuntimeError):
    """A bounded search ended without success. Says nothing about existence."""


Vector = tuple  # tuple of RingElem, length n


def vec(ring: RingDesc, *coords) -> Vector:
    """Build a vector from ints or (a, b) pairs."""
    out = []
    for c in coords:
        if isinstance(c, RingElem):
            out.append(c)
        elif isinstance(c, tuple):
            out.append(RingElem(ring, *c))
        else:
            out.append(RingElem(ring, int(c)))
    return tuple(out)


def flatten(ring: RingDesc, v) -> list[int]:
    if ring.is_quadratic:
        return [t for x in v for t in (x.a, x.b)]
    return [x.a for x in v]


def unflatten(ring: RingDesc, row) -> Vector:
    if ring.is_quadratic:
        return tuple(RingElem(ring, row[2 * i], row[2 * i + 1]) for i in range(len(row) // 2))
    return tuple(RingElem(ring, x) for x in row)


def _omega_row(ring: RingDesc, row) -> list[int]:
    out = []
    for i in range(len(row) // 2):
        out.extend(ring.omega_times((row[2 * i], row[2 * i + 1])))
    return out


def _module_rows(ring: RingDesc, rows) -> list[list[int]]:
    """Close a list of Z-rows under multiplication by w."""
    rows = [list(r) for r in rows]
    if ring.is_quadratic:
        rows = rows + [_omega_row(ring, r) for r in rows]
    return rows


@dataclass(frozen=True)
class ModuleLattice:
    ring: RingDesc
    n: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return self.n * self.ring.degree

    @property
    def z_rank(self) -> int:
        return len(self.basis)

    @property
    def o_rank(self) -> int:
        return len(self.basis) // self.ring.degree

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    def vectors(self) -> list[Vector]:
        return [unflatten(self.ring, r) for r in self.basis]

    def contains(self, v) -> bool:
        if isinstance(v, ModuleLattice):
            return lattice_contains(self, v)
        return intmat.contains(self.rows(), [flatten(self.ring, v)])

    def __le__(self, other: "ModuleLattice") -> bool:
        return lattice_contains(other, self)

    def __lt__(self, other: "ModuleLattice") -> bool:
        return self != other and lattice_contains(other, self)

    @cached_property
    def sort_key(self):
        return (self.o_rank, self.basis)

    def to_dict(self) -> dict:
        return {"ring": str(self.ring), "n": self.n, "hnf": self.rows()}

    @classmethod
    def from_dict(cls, data) -> "ModuleLattice":
        ring = RingDesc.parse(data["ring"])
        return module_span_rows(ring, data["n"], data["hnf"])

    def __repr__(self) -> str:
        return f"ModuleLattice({self.ring}, n={self.n}, rank={self.o_rank}, hnf={self.rows()})"


def _make(ring, n, rows) -> ModuleLattice:
    return ModuleLattice(ring, n, tuple(tuple(r) for r in rows))


def module_span_rows(ring: RingDesc, n: int, rows) -> ModuleLattice:
    """O-span of flattened integer rows."""
    return _make(ring, n, intmat.hnf(_module_rows(ring, rows)))


def span(ring: RingDesc, n: int, vectors) -> ModuleLattice:
    """O-span of vectors, without saturating."""
    return module_span_rows(ring, n, [flatten(ring, v) for v in vectors])


def free_module(ring: RingDesc, n: int) -> ModuleLattice:
    d = n * ring.degree
    return _make(ring, n, [[int(i == j) for j in range(d)] for i in range(d)])


def zero_module(ring: RingDesc, n: int) -> ModuleLattice:
    return _make(ring, n, [])


def saturate(u: ModuleLattice) -> ModuleLattice:
    """Saturation inside the free module O^n."""
    return _make(u.ring, u.n, intmat.saturate(u.rows(), u.dim))


def _check_ambient(a: ModuleLattice, b: ModuleLattice):
    if a.ring != b.ring or a.n != b.n:
        raise ValueError(f"ambient mismatch: ({a.ring}, {a.n}) vs ({b.ring}, {b.n})")


def lattice_intersection(a: ModuleLattice, b: ModuleLattice) -> ModuleLattice:
    _check_ambient(a, b)
    return _make(a.ring, a.n, intmat.intersect(a.rows(), b.rows(), a.dim))


def lattice_sum(*parts: ModuleLattice) -> ModuleLattice:
    first = parts[0]
    for p in parts[1:]:
        _check_ambient(first, p)
    return _make(first.ring, first.n, intmat.hnf([r for p in parts for r in p.rows()]))


def lattice_contains(big: ModuleLattice, small: ModuleLattice) -> bool:
    _check_ambient(big, small)
    return intmat.contains(big.rows(), small.rows())


def span_and_saturate(ring: RingDesc, n: int, vectors, ambient: ModuleLattice | None = None) -> ModuleLattice:
    """Saturation of the O-span of ``vectors``, intersected with ``ambient`` if given."""
    sat = saturate(span(ring, n, vectors))
    return lattice_intersection(sat, ambient) if ambient is not None else sat


def relative_saturation(u: ModuleLattice, ambient: ModuleLattice) -> ModuleLattice:
    """ambient intersected with the K-span of u."""
    return lattice_intersection(saturate(u), ambient)


def is_summand(u: ModuleLattice, ambient: ModuleLattice) -> bool:
    """True iff ambient / u is torsion-free."""
    if not lattice_contains(ambient, u):
        raise ValueError("lattice is not contained in the ambient module")
    return relative_saturation(u, ambient) == u


def is_unimodular(v, ring: RingDesc | None = None, n: int | None = None) -> bool:
    """True iff the coordinates of v generate the unit ideal."""
    if not any(v):
        raise ValueError("zero vector")
    ring = ring or v[0].ring
    return ideal_from_generators(ring, [x for x in v if x]).is_unit()


# -- Steinitz classes ---------------------------------------------------------


def det_over_ring(mat) -> RingElem:
    """Determinant of a small square matrix of RingElems by cofactor expansion."""
    k = len(mat)
    if k == 1:
        return mat[0][0]
    total = None
    for j in range(k):
        minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
        term = mat[0][j] * det_over_ring(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def minors_ideal(u: ModuleLattice):
    """Ideal generated by the r x r minors of the Z-basis on a fixed column set.

    The column set is the first one (in lexicographic order) on which some
    minor is nonzero. Its class is the Steinitz class of u.
    """
    r = u.o_rank
    if r == 0:
        raise ValueError("zero lattice has no Steinitz class")
    vecs = u.vectors()
    for cols in combinations(range(u.n), r):
        vals = []
        for sub in combinations(vecs, r):
            m = det_over_ring([[v[c] for c in cols] for v in sub])
            if m:
                vals.append(m)
        if vals:
            return ideal_from_generators(u.ring, vals)
    raise AssertionError("no nonzero minor found for a lattice of positive rank")


def steinitz_class(u: ModuleLattice, cg: ClassGroup) -> int:
    if u.o_rank == 0:
        raise ValueError("zero lattice has no Steinitz class")
    if not u.ring.is_quadratic:
        return 0
    return cg.classify(minors_ideal(u))


def rank_one_module(ideal, n: int = 1, position: int = 0) -> ModuleLattice:
    """The ideal placed in coordinate ``position`` of O^n."""
    ring = ideal.ring
    vecs = []
    for g in ideal.basis():
        vecs.append(tuple(g if i == position else RingElem(ring, 0) for i in range(n)))
    return span(ring, n, vecs)


# -- search for intermediate summands ------------------------------------------


def _candidate_vectors(upper: ModuleLattice, height: int, rng: random.Random | None):
    """Z-combinations of upper's basis with coefficients in [-height, height],
    one shell (max |coefficient| == h) at a time."""
    rows = upper.rows()
    k = len(rows)
    for h in range(1, height + 1):
        shell = [
            c for c in product(range(-h, h + 1), repeat=k) if max(map(abs, c)) == h
        ]
        if rng is not None:
            rng.shuffle(shell)
        for coeffs in shell:
            yield [sum(c * row[j] for c, row in zip(coeffs, rows)) for j in range(upper.dim)]


def find_intermediate_summand(
    lower: ModuleLattice,
    upper: ModuleLattice,
    r: int,
    c: int,
    cg: ClassGroup,
    budget: int | None = None,
    seed: int | None = None,
    max_candidates: int = 200_000,
) -> ModuleLattice:
    """A summand U with lower < U < upper, o_rank(U) = r and class c.

    lower and upper must be summands of a common ambient module; any U built
    as upper ∩ sat(span) is then a summand of that ambient too. Candidates are
    the saturations of lower plus short vectors of upper, enumerated by
    increasing coefficient height. ``budget`` bounds that height (default
    10 * |disc|); ``seed`` shuffles each height shell reproducibly.
    Raises SearchExhausted when nothing is found.
    """
    _check_ambient(lower, upper)
    if not lattice_contains(upper, lower) or lower == upper:
        raise ValueError("need lower strictly inside upper")
    if not lower.o_rank < r < upper.o_rank:
        raise ValueError(f"need {lower.o_rank} < r={r} < {upper.o_rank}")
    if budget is None:
        budget = 10 * abs(lower.ring.discriminant)
    rng = random.Random(seed) if seed is not None else None
    sat_lower = saturate(lower)
    current = lower
    tried = 0
    # grow greedily to rank r - 1, then search for the final vector
    while current.o_rank < r - 1:
        for row in _candidate_vectors(upper, budget, rng):
            if not intmat.contains(saturate(current).rows(), [row]):
                current = lattice_intersection(
                    saturate(module_span_rows(lower.ring, lower.n, current.rows() + [row])), upper
                )
                break
        else:
            raise SearchExhausted("could not grow the lower summand")
    sat_current = saturate(current) if current is not lower else sat_lower
    for row in _candidate_vectors(upper, budget, rng):
        tried += 1
        if tried > max_candidates:
            break
        if intmat.contains(sat_current.rows(), [row]):
            continue
        cand = lattice_intersection(
            saturate(module_span_rows(lower.ring, lower.n, current.rows() + [row])), upper
        )
        if cand.o_rank != r or cand == upper:
            continue
        if steinitz_class(cand, cg) == c:
            return cand
    raise SearchExhausted(
        f"no rank-{r} summand of class {c} found within height {budget} ({tried} candidates)"
    )
