"""Tits buildings over finite fields, summand posets of modules, and X_m(T).

Field mode: a subspace of F_q^n is labelled by its reduced row echelon form, a
tuple of row tuples. Module mode: a summand is a ModuleLattice. In both modes a
chamber is the flag listed from the smallest element up, and apartment chains
are signed sums of chambers with the sign of the ordering permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

from .arith import ClassGroup, FiniteField, RingDesc
from .lattices import (
    ModuleLattice,
    lattice_contains,
    lattice_sum,
    relative_saturation,
    span,
    steinitz_class,
)
from .topo import Chain, Poset, perm_sign

MAX_FIELD_Q = 9
MAX_FIELD_N = 4


# -- linear algebra over GF(q) -------------------------------------------------


def rref(F: FiniteField, vectors) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form of the span of ``vectors``."""
    rows = [list(v) for v in vectors]
    if not rows:
        return ()
    n = len(rows[0])
    out = []
    r = 0
    for j in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][j]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = F.inv(rows[r][j])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][j]:
                f = rows[i][j]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    out = [tuple(row) for row in rows[:r]]
    return tuple(out)


def field_rank(F: FiniteField, vectors) -> int:
    return len(rref(F, vectors))


def subspace_vectors(F: FiniteField, basis) -> frozenset:
    """All vectors of the span of ``basis``."""
    n = len(basis[0])
    out = set()
    for coeffs in product(range(F.q), repeat=len(basis)):
        v = [0] * n
        for c, row in zip(coeffs, basis):
            if c:
                v = [F.add(x, F.mul(c, y)) for x, y in zip(v, row)]
        out.add(tuple(v))
    return frozenset(out)


def all_subspaces(F: FiniteField, n: int, k: int) -> list[tuple]:
    """All k-dimensional subspaces of F_q^n as RREF tuples."""
    out = []
    for pivots in combinations(range(n), k):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        for vals in product(range(F.q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


def mat_vec(F: FiniteField, g, v) -> tuple:
    out = []
    for row in g:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s = F.add(s, F.mul(a, b))
        out.append(s)
    return tuple(out)


def act_on_subspace(F: FiniteField, g, subspace) -> tuple:
    """g . V for a matrix g acting on column vectors."""
    return rref(F, [mat_vec(F, g, row) for row in subspace])


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def chamber_count(q: int, n: int) -> int:
    out = 1
    for k in range(1, n + 1):
        out *= (q**k - 1) // (q - 1)
    return out


# -- building posets -------------------------------------------------------------


class BuildingPoset(Poset):
    """Proper nonzero subspaces (or summands) ordered by containment."""

    def __init__(self, elements, less, height, *, mode, meta, truncated=False):
        self.mode = mode
        self.meta = meta
        self.truncated = truncated
        super().__init__(elements, less, height=height)

    @property
    def rank(self) -> int:
        return self.meta["n"]


def tits_building_field(q: int, n: int, max_chambers: int = 50_000) -> BuildingPoset:
    """The Tits building of F_q^n as a poset of RREF-labelled subspaces."""
    if q > MAX_FIELD_Q or n > MAX_FIELD_N or n < 2:
        raise ValueError(f"size guard exceeded: need q <= {MAX_FIELD_Q}, 2 <= n <= {MAX_FIELD_N}")
    if chamber_count(q, n) > max_chambers:
        raise ValueError(f"size guard exceeded: {chamber_count(q, n)} chambers > {max_chambers}")
    F = FiniteField(q)
    elements = [s for k in range(1, n) for s in all_subspaces(F, n, k)]
    vecs = {s: subspace_vectors(F, s) for s in elements}

    def less(a, b):
        return len(a) < len(b) and vecs[a] <= vecs[b]

    b = BuildingPoset(elements, less, lambda s: len(s) - 1, mode="field", meta={"q": q, "n": n})
    b.field = F
    b.vectors = vecs
    return b


def _coefficients(ring: RingDesc, h: int):
    """Ring elements whose integer coordinates are at most h in absolute value."""
    if ring.is_quadratic:
        vals = [(a, b) for a in range(-h, h + 1) for b in range(-h, h + 1)]
    else:
        vals = [(a, 0) for a in range(-h, h + 1)]
    return [ring.elem(a, b) for a, b in vals]


def module_vectors(m: ModuleLattice, height_bound: int):
    """Nonzero vectors of m with every integer coordinate at most the bound."""
    ring = m.ring
    coeffs = _coefficients(ring, height_bound)
    for v in product(coeffs, repeat=m.n):
        if any(v) and m.contains(v):
            yield v


def rank_one_summands(m: ModuleLattice, height_bound: int) -> list[ModuleLattice]:
    seen = {}
    for v in module_vectors(m, height_bound):
        line = relative_saturation(span(m.ring, m.n, [v]), m)
        seen.setdefault(line, None)
    return sorted(seen, key=lambda u: u.sort_key)


def tits_building_module(m: ModuleLattice, height_bound: int) -> BuildingPoset:
    """Truncated summand poset of m.

    Elements are saturations (inside m) of spans of vectors whose integer
    coordinates are bounded by ``height_bound``: rank-1 summands from single
    vectors, and for rank 3 also rank-2 summands from pairs of those lines.
    """
    if m.o_rank not in (2, 3):
        raise ValueError("module buildings are supported for rank 2 and 3")
    lines = rank_one_summands(m, height_bound)
    elements = set(lines)
    if m.o_rank == 3:
        for a, b in combinations(lines, 2):
            elements.add(relative_saturation(lattice_sum(a, b), m))

    def less(a, b):
        return a.o_rank < b.o_rank and lattice_contains(b, a)

    return BuildingPoset(
        elements,
        less,
        lambda u: u.o_rank - 1,
        mode="module",
        meta={"ring": str(m.ring), "n": m.o_rank, "height_bound": height_bound},
        truncated=True,
    )


# -- frames and apartments ---------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """n lines given by spanning vectors (field mode) or n rank-1 summands."""

    constituents: tuple
    field: FiniteField | None = None

    @property
    def n(self) -> int:
        return len(self.constituents)

    @property
    def mode(self) -> str:
        return "field" if self.field is not None else "module"

    def to_json(self):
        if self.mode == "field":
            return [list(v) for v in self.constituents]
        return [u.to_dict() for u in self.constituents]


def field_frame(F: FiniteField, vectors) -> Frame:
    return Frame(tuple(tuple(v) for v in vectors), F)


def chamber_of(frame: Frame, order, ambient: ModuleLattice | None = None, cache=None) -> tuple:
    """The chamber U_{o([1])} < U_{o([2])} < ... for an ordering of the constituents."""
    n = frame.n
    out = []
    for k in range(1, n):
        subset = frozenset(order[:k])
        out.append(subspace_of(frame, subset, ambient, cache))
    return tuple(out)


def subspace_of(frame: Frame, subset, ambient=None, cache=None):
    """U_X: the span of the constituents indexed by X, saturated in the ambient."""
    subset = frozenset(subset)
    if cache is not None and subset in cache:
        return cache[subset]
    if frame.mode == "field":
        u = rref(frame.field, [frame.constituents[i] for i in sorted(subset)])
    else:
        if ambient is None:
            raise ValueError("module frames need the ambient module")
        u = relative_saturation(lattice_sum(*(frame.constituents[i] for i in sorted(subset))), ambient)
    if cache is not None:
        cache[subset] = u
    return u


def _check_full_rank(frame: Frame, ambient):
    if frame.mode == "field":
        if field_rank(frame.field, frame.constituents) != frame.n:
            raise ValueError("frame not full rank")
    else:
        if lattice_sum(*frame.constituents).o_rank != frame.n or ambient.o_rank != frame.n:
            raise ValueError("frame not full rank")


def apartment_chambers(frame: Frame, ambient: ModuleLattice | None = None):
    """Yield (sigma, sign, chamber) for every ordering sigma of the frame.

    sigma is a tuple of 0-based constituent indices: sigma[i] is the image of i.
    """
    _check_full_rank(frame, ambient)
    cache = {}
    for sigma in permutations(range(frame.n)):
        yield sigma, perm_sign(sigma), chamber_of(frame, sigma, ambient, cache)


def apartment_class(frame: Frame, ambient: ModuleLattice | None = None) -> Chain:
    """Sum over sigma in S_n of sign(sigma) times the chamber V_sigma."""
    out = Chain()
    for _, sign, chamber in apartment_chambers(frame, ambient):
        out.add_term(chamber, sign)
    return out


def is_integral_frame(frame: Frame, m: ModuleLattice) -> bool:
    """True iff the constituents sum to m exactly (no saturation)."""
    total = lattice_sum(*frame.constituents)
    if total.o_rank != m.o_rank or frame.n != m.o_rank:
        raise ValueError("frame has deficient rank")
    return total == m


# -- the quotient building X_m(T) and the psi map ---------------------------------------


class XBuilding(Poset):
    """Elements (p, t) for 1 <= p <= m and t in T, with (p, t) < (p', t') iff p < p'."""

    def __init__(self, m: int, labels):
        self.m = m
        self.labels = list(labels)
        super().__init__(
            [(p, t) for p in range(1, m + 1) for t in self.labels],
            lambda x, y: x[0] < y[0],
            height=lambda x: x[0] - 1,
        )

    def apartment_class(self, pairs) -> Chain:
        return x_apartment_class(pairs)

    def apartments(self):
        """All apartment labelings: one ordered pair (a_k, b_k) of distinct labels per level."""
        choices = [(a, b) for a in self.labels for b in self.labels if a != b]
        for pick in product(choices, repeat=self.m):
            yield list(pick)


def x_building(m: int, labels) -> XBuilding:
    return XBuilding(m, labels)


def x_apartment_class(pairs) -> Chain:
    """Signed sum of the 2^m chambers C_eps, with c_k = b_k when eps_k = 0 else a_k.

    ``pairs`` lists (a_k, b_k); swapping a pair negates the class.
    """
    out = Chain()
    for a, b in pairs:
        if a == b:
            raise ValueError(f"degenerate pair ({a}, {b})")
    for eps in product((0, 1), repeat=len(pairs)):
        chamber = tuple((k + 1, pairs[k][0] if e else pairs[k][1]) for k, e in enumerate(eps))
        out.add_term(chamber, -1 if sum(eps) % 2 else 1)
    return out


class PsiMap:
    """U -> (o_rank U, Steinitz class of U), cached."""

    def __init__(self, cg: ClassGroup):
        self.cg = cg
        self._cache: dict = {}

    def __call__(self, u: ModuleLattice) -> tuple[int, int]:
        out = self._cache.get(u)
        if out is None:
            out = (u.o_rank, steinitz_class(u, self.cg))
            self._cache[u] = out
        return out

    def push(self, chain: Chain) -> Chain:
        """psi_* on chains of flags; psi is strictly increasing on flags."""
        out = Chain()
        for flag, coeff in chain:
            out.add_term(tuple(self(u) for u in flag), coeff)
        return out


def x_less(a, b) -> bool:
    return a[0] < b[0]


def standard_basis_vectors(ring: RingDesc, n: int):
    return [tuple(ring.elem(int(i == j)) for j in range(n)) for i in range(n)]


def coordinate_frame(m_ring: RingDesc, n: int) -> Frame:
    return Frame(tuple(span(m_ring, n, [v]) for v in standard_basis_vectors(m_ring, n)))

