"""Simplicial complexes, posets, integer chains and exact homology.

Orientation convention: a simplex is stored with its vertices in ascending
vertex-id order, and a chain coefficient refers to that listing. For order
complexes vertex ids are assigned by increasing height, so a flag is always
listed from its smallest element up.
"""

from __future__ import annotations

import heapq
import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import gcd


def default_key(x):
    """Total order on labels: ints, tuples and anything with a ``sort_key``."""
    if hasattr(x, "sort_key"):
        return (1, x.sort_key)
    if isinstance(x, (tuple, list, frozenset)):
        return (2, tuple(default_key(t) for t in x))
    return (0, x)


def perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    seen = [False] * len(seq)
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class Chain:
    """Finite integer combination of oriented simplices keyed by label tuples."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple, int] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for k, v in items:
                self.add_term(tuple(k), v)

    def add_term(self, key: tuple, coeff: int) -> None:
        if not coeff:
            return
        v = self.terms.get(key, 0) + coeff
        if v:
            self.terms[key] = v
        else:
            del self.terms[key]

    @property
    def degree(self) -> int | None:
        for k in self.terms:
            return len(k) - 1
        return None

    def __add__(self, other: "Chain") -> "Chain":
        out = Chain(self.terms)
        for k, v in other.terms.items():
            out.add_term(k, v)
        return out

    def __neg__(self) -> "Chain":
        return Chain({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, s: int) -> "Chain":
        return Chain({k: s * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self) -> str:
        inner = " ".join(f"{v:+d}{list(k)}" for k, v in self.sorted_items())
        return f"Chain({inner or '0'})"

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: default_key(kv[0]))

    def to_json(self, label=str) -> list:
        return [[[label(x) for x in k], v] for k, v in self.sorted_items()]

    def support(self):
        return set(self.terms)


def boundary(c: Chain, complex_: "SimplicialComplex | None" = None) -> Chain:
    """Alternating face sum, with sign (-1)^i for deleting the i-th vertex.

    Vertices map to the empty simplex ``()``, the generator of C_{-1}.
    """
    out = Chain()
    for key, coeff in c.terms.items():
        if not key:
            continue
        if complex_ is not None and not complex_.has_simplex(key):
            raise KeyError(f"simplex {key} not in complex")
        for i in range(len(key)):
            out.add_term(key[:i] + key[i + 1 :], coeff if i % 2 == 0 else -coeff)
    return out


def augmentation(c: Chain) -> int:
    return sum(v for k, v in c.terms.items() if len(k) == 1)


def canonical(labels, key=default_key) -> tuple[tuple, int]:
    """Sort labels by ``key`` and return (sorted tuple, sign of the sort)."""
    labels = tuple(labels)
    keys = [key(x) for x in labels]
    order = sorted(range(len(labels)), key=lambda i: keys[i])
    return tuple(labels[i] for i in order), perm_sign(keys)


def oriented(labels, key=default_key) -> Chain:
    """The chain +[labels] written in canonical order."""
    t, s = canonical(labels, key)
    if len(set(t)) < len(t):
        return Chain()
    return Chain({t: s})


def push_chain(f, c: Chain, key=None, less=None) -> Chain:
    """Pushforward along a vertex map.

    Collapsed simplices contribute zero. With ``key`` the image vertices are
    re-sorted and the sort sign applied (simplicial maps). Otherwise the map is
    treated as order-preserving: images must be listed in increasing order,
    which is verified when a ``less`` oracle is supplied.
    """
    out = Chain()
    for simplex, coeff in c.terms.items():
        img = tuple(f(v) for v in simplex)
        if len(set(img)) < len(img):
            if less is not None and any(
                not (img[i] == img[i + 1] or less(img[i], img[i + 1])) for i in range(len(img) - 1)
            ):
                raise ValueError(f"map is not order-preserving on {simplex}")
            continue
        if key is not None:
            t, s = canonical(img, key)
            out.add_term(t, s * coeff)
        else:
            if less is not None and any(not less(img[i], img[i + 1]) for i in range(len(img) - 1)):
                raise ValueError(f"map is not order-preserving on {simplex}")
            out.add_term(img, coeff)
    return out


class SimplicialComplex:
    """A finite simplicial complex on hashable labels.

    Vertex ids are assigned in ``key`` order for the vertices present at
    construction and in insertion order afterwards; simplices are tuples of
    labels listed by ascending id.
    """

    def __init__(self, simplices=(), key=default_key, vertices=()):
        self.key = key
        self.labels: list = []
        self.ids: dict = {}
        self.faces: dict[int, set[tuple]] = defaultdict(set)
        simplices = [tuple(s) for s in simplices]
        verts = set(vertices)
        for s in simplices:
            verts.update(s)
        for v in sorted(verts, key=key):
            self._new_vertex(v)
        for s in simplices:
            self.add_simplex(s)

    def _new_vertex(self, v):
        if v not in self.ids:
            self.ids[v] = len(self.labels)
            self.labels.append(v)
            self.faces[0].add((v,))

    def sort_simplex(self, labels) -> tuple:
        return tuple(sorted(labels, key=self.ids.__getitem__))

    def orient(self, labels) -> tuple[tuple, int]:
        """Canonical listing of ``labels`` and the sign of the reordering."""
        labels = tuple(labels)
        ids = [self.ids[v] for v in labels]
        return tuple(sorted(labels, key=self.ids.__getitem__)), perm_sign(ids)

    def add_simplex(self, labels) -> None:
        for v in labels:
            self._new_vertex(v)
        s = self.sort_simplex(set(labels))
        if s in self.faces[len(s) - 1]:
            return
        for k in range(len(s), 0, -1):
            layer = self.faces[k - 1]
            for sub in combinations(s, k):
                layer.add(sub)

    def has_simplex(self, labels) -> bool:
        try:
            s = self.sort_simplex(set(labels))
        except KeyError:
            return False
        return len(s) == len(labels) and s in self.faces.get(len(s) - 1, ())

    @property
    def dim(self) -> int:
        ds = [k for k, v in self.faces.items() if v]
        return max(ds) if ds else -1

    def vertices(self) -> list:
        return list(self.labels)

    def simplices(self, k: int) -> list[tuple]:
        return sorted(self.faces.get(k, ()), key=lambda s: [self.ids[v] for v in s])

    def all_simplices(self):
        for k in range(self.dim + 1):
            yield from self.simplices(k)

    def f_vector(self) -> list[int]:
        return [len(self.faces.get(k, ())) for k in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        """Reduced Euler characteristic (the empty simplex counts -1)."""
        return -1 + sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for k in range(self.dim, -1, -1):
            for s in self.simplices(k):
                if not any(set(s) < set(t) for t in out):
                    out.append(s)
        return out

    def link(self, sigma) -> "SimplicialComplex":
        sigma = set(sigma)
        out = []
        for k in range(self.dim + 1):
            for s in self.faces[k]:
                if sigma <= set(s):
                    rest = tuple(v for v in s if v not in sigma)
                    if rest:
                        out.append(rest)
        return SimplicialComplex(out, key=self.key)

    def full_subcomplex(self, verts) -> "SimplicialComplex":
        verts = set(verts)
        out = [s for k in range(self.dim + 1) for s in self.faces[k] if set(s) <= verts]
        return SimplicialComplex(out, key=self.key)

    def skeleton(self, k: int) -> "SimplicialComplex":
        out = [s for j in range(min(k, self.dim) + 1) for s in self.faces[j]]
        return SimplicialComplex(out, key=self.key)

    def cone(self, apex=None) -> "SimplicialComplex":
        if apex is None:
            ints = all(isinstance(v, int) for v in self.labels)
            apex = max(self.labels, default=-1) + 1 if ints else ("cone",)
        out = [s + (apex,) for k in range(self.dim + 1) for s in self.faces[k]] + [(apex,)]
        return SimplicialComplex(out, key=self.key)

    def join(self, other: "SimplicialComplex") -> "SimplicialComplex":
        mine = [tuple((0, v) for v in s) for s in self.maximal_simplices()] or [()]
        theirs = [tuple((1, v) for v in s) for s in other.maximal_simplices()] or [()]
        return SimplicialComplex([s + t for s in mine for t in theirs if s + t])

    def connected_components(self) -> list[list]:
        parent = {v: v for v in self.labels}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for u, v in self.faces.get(1, ()):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        groups = defaultdict(list)
        for v in self.labels:
            groups[find(v)].append(v)
        return sorted(groups.values(), key=lambda g: self.ids[g[0]])

    def boundary_rows(self, k: int) -> list[dict[int, int]]:
        """Sparse rows of the boundary map C_k -> C_{k-1}, one per k-simplex.

        For k = 0 this is the augmentation to C_{-1} = Z.
        """
        if k == 0:
            return [{0: 1} for _ in self.faces.get(0, ())]
        index = {s: i for i, s in enumerate(self.simplices(k - 1))}
        rows = []
        for s in self.simplices(k):
            rows.append({index[s[:i] + s[i + 1 :]]: (-1) ** i for i in range(len(s))})
        return rows

    def to_lines(self, label=str) -> str:
        lines = []
        for s in self.maximal_simplices():
            lines.append(" ".join(label(v) for v in s))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_lines(cls, text: str) -> "SimplicialComplex":
        simplices = [tuple(line.split()) for line in text.splitlines() if line.strip()]
        return cls(simplices)

    def to_dot(self, label=str) -> str:
        out = ["graph complex {"]
        for v in self.labels:
            out.append(f'  "{label(v)}";')
        for u, v in self.simplices(1):
            out.append(f'  "{label(u)}" -- "{label(v)}";')
        out.append("}")
        return "\n".join(out) + "\n"


def simplex_boundary_complex(k: int) -> SimplicialComplex:
    """The boundary of the k-simplex, a (k-1)-sphere."""
    return SimplicialComplex(combinations(range(k + 1), k))


class Poset:
    """A finite poset given by a strict-order oracle."""

    def __init__(self, elements, less, key=default_key, height=None):
        self.key = key
        self.elements = sorted(set(elements), key=key)
        self.less = less
        self.up = {x: [y for y in self.elements if less(x, y)] for x in self.elements}
        if height is None:
            h = {}
            for x in sorted(self.elements, key=lambda e: sum(1 for y in self.elements if less(y, e))):
                below = [h[y] for y in self.elements if less(y, x) and y in h]
                h[x] = 1 + max(below) if below else 0
            height = h.__getitem__
        self.height = height

    def __len__(self):
        return len(self.elements)

    def vertex_key(self, x):
        return (self.height(x), self.key(x))

    def chains(self, max_len: int | None = None):
        """All nonempty chains listed from the bottom."""
        def extend(chain):
            yield chain
            if max_len is not None and len(chain) >= max_len:
                return
            for y in self.up[chain[-1]]:
                yield from extend(chain + (y,))

        for x in self.elements:
            yield from extend((x,))

    def covers(self, x) -> list:
        return [y for y in self.up[x] if not any(self.less(z, y) for z in self.up[x])]

    def maximal_chains(self):
        """Saturated chains from a minimal element to a maximal one."""
        def extend(chain):
            nxt = self.covers(chain[-1])
            if not nxt:
                yield chain
            for y in nxt:
                yield from extend(chain + (y,))

        for x in self.elements:
            if not any(self.less(y, x) for y in self.elements):
                yield from extend((x,))

    def order_complex(self) -> SimplicialComplex:
        cx = SimplicialComplex(vertices=self.elements, key=self.vertex_key)
        for c in self.chains():
            cx.faces[len(c) - 1].add(c)
        return cx


def face_poset(x: SimplicialComplex) -> Poset:
    elements = list(x.all_simplices())
    return Poset(
        elements,
        lambda s, t: len(s) < len(t) and set(s) <= set(t),
        key=lambda s: (len(s), [x.ids[v] for v in s]),
        height=lambda s: len(s) - 1,
    )


def barycentric_chain(c: Chain) -> Chain:
    """Image of a chain under the barycentric subdivision chain map.

    [x_1, ..., x_k] goes to the signed sum over orderings tau of the flags
    {x_tau(1)} < {x_tau(1), x_tau(2)} < ...; each face is listed as a
    sub-tuple of the original canonical listing.
    """
    out = Chain()
    for key, coeff in c.terms.items():
        k = len(key)
        for tau in permutations(range(k)):
            flag = tuple(tuple(key[i] for i in sorted(tau[: j + 1])) for j in range(k))
            out.add_term(flag, perm_sign(tau) * coeff)
    return out


# -- sparse exact Smith normal form ---------------------------------------------


def _normalize_diagonal(diag: list[int]) -> list[int]:
    """Turn a diagonal into Smith form (each entry divides the next)."""
    d = sorted(abs(x) for x in diag if x)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d


class _SparseMatrix:
    def __init__(self, rows):
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = defaultdict(set)
        for i, r in enumerate(rows):
            r = {j: v for j, v in r.items() if v}
            if r:
                self.rows[i] = r
                for j in r:
                    self.cols[j].add(i)

    def axpy_row(self, target: int, f: int, source: int) -> None:
        """row[target] -= f * row[source]"""
        t = self.rows[target]
        for j, v in self.rows[source].items():
            nv = t.get(j, 0) - f * v
            if nv:
                if j not in t:
                    self.cols[j].add(target)
                t[j] = nv
            elif j in t:
                del t[j]
                self.cols[j].discard(target)
        if not t:
            del self.rows[target]

    def drop(self, i: int, j: int) -> None:
        for c in self.rows.pop(i, {}):
            self.cols[c].discard(i)
        for r in self.cols.pop(j, set()):
            self.rows[r].pop(j, None)
            if not self.rows[r]:
                del self.rows[r]


def sparse_invariant_factors(rows) -> list[int]:
    """Nonzero Smith invariant factors of a sparse integer matrix.

    ``rows`` is a sequence of {column: value} dicts. Unit pivots are taken
    first, sparsest column first and sparsest row within it; the remainder is
    reduced with minimal-|entry| pivots, ties broken by the Markowitz fill-in
    estimate.
    """
    m = _SparseMatrix(rows)
    diag: list[int] = []

    heap = [(len(s), j) for j, s in m.cols.items() if s]
    heapq.heapify(heap)
    while heap:
        size, j = heapq.heappop(heap)
        col = m.cols.get(j)
        if not col:
            continue
        if size != len(col):
            heapq.heappush(heap, (len(col), j))
            continue
        units = [i for i in col if abs(m.rows[i][j]) == 1]
        if not units:
            continue
        r = min(units, key=lambda i: (len(m.rows[i]), i))
        p = m.rows[r][j]
        touched = set(m.rows[r])
        for i in sorted(col - {r}):
            m.axpy_row(i, m.rows[i][j] * p, r)
        m.drop(r, j)
        diag.append(1)
        for c in touched:
            if c in m.cols and m.cols[c]:
                heapq.heappush(heap, (len(m.cols[c]), c))

    while m.rows:
        best = None
        for i, r in m.rows.items():
            ri = len(r) - 1
            for j, v in r.items():
                cand = (abs(v), ri * (len(m.cols[j]) - 1), i, j)
                if best is None or cand < best:
                    best = cand
        _, _, r, j = best
        p = m.rows[r][j]
        clean = True
        for i in sorted(m.cols[j] - {r}):
            m.axpy_row(i, m.rows[i][j] // p, r)
            if i in m.rows and j in m.rows[i]:
                clean = False
        if not clean:
            continue
        row = m.rows[r]
        for c in list(row):
            if c == j:
                continue
            nv = row[c] - (row[c] // p) * p
            if nv:
                row[c] = nv
                clean = False
            else:
                del row[c]
                m.cols[c].discard(r)
        if not clean:
            continue
        diag.append(abs(p))
        m.drop(r, j)
    return _normalize_diagonal(diag)


def sparse_rank_mod_p(rows, p: int = 1_000_000_007) -> int:
    """Rank over F_p by sparse elimination."""
    work = [{j: v % p for j, v in r.items() if v % p} for r in rows]
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for r in work:
        while r:
            j = min(r)
            if j not in pivots:
                inv = pow(r[j], -1, p)
                pivots[j] = {c: v * inv % p for c, v in r.items()}
                rank += 1
                break
            f = r[j]
            for c, v in pivots[j].items():
                nv = (r.get(c, 0) - f * v) % p
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
    return rank


def random_prime(bits: int = 30, seed: int = 0) -> int:
    rng = random.Random(seed)
    while True:
        n = rng.randrange(2 ** (bits - 1), 2**bits) | 1
        if all(n % d for d in range(3, int(n**0.5) + 1, 2)):
            return n


@dataclass
class HomologySummary:
    """Reduced integral homology: Betti numbers and torsion by degree."""

    betti: dict[int, int]
    torsion: dict[int, list[int]] = field(default_factory=dict)

    def __getitem__(self, k: int) -> int:
        return self.betti.get(k, 0)

    def nonzero(self) -> dict[int, int]:
        return {k: v for k, v in self.betti.items() if v}

    def is_acyclic(self) -> bool:
        return not self.nonzero() and not any(self.torsion.values())

    def is_spherical(self, d: int) -> bool:
        """H-level check: reduced homology concentrated in degree d, torsion-free."""
        return all(v == 0 for k, v in self.betti.items() if k != d) and not any(self.torsion.values())

    def to_dict(self) -> dict:
        return {
            "betti": {str(k): v for k, v in sorted(self.betti.items())},
            "torsion": {str(k): v for k, v in sorted(self.torsion.items()) if v},
        }


def reduced_homology(x: SimplicialComplex, method: str = "snf", prime: int | None = None) -> HomologySummary:
    """Reduced homology over Z (``snf``) or Betti numbers over F_p (``modp``)."""
    top = x.dim
    sizes = {k: len(x.faces.get(k, ())) for k in range(top + 1)}
    sizes[-1] = 1
    ranks: dict[int, int] = {}
    factors: dict[int, list[int]] = {}
    for k in range(0, top + 1):
        rows = x.boundary_rows(k)
        if method == "snf":
            inv = sparse_invariant_factors(rows)
            ranks[k] = len(inv)
            factors[k] = [d for d in inv if d > 1]
        elif method == "modp":
            ranks[k] = sparse_rank_mod_p(rows, prime or random_prime())
        else:
            raise ValueError(f"unknown method {method!r}")
    betti = {}
    torsion = {}
    for k in range(-1, top + 1):
        betti[k] = sizes[k] - ranks.get(k, 0) - ranks.get(k + 1, 0)
        torsion[k] = factors.get(k + 1, []) if method == "snf" else []
    return HomologySummary(betti, torsion)


def euler_from_homology(h: HomologySummary) -> int:
    return sum(-b if k % 2 else b for k, b in h.betti.items())


# -- fibered complexes ----------------------------------------------------------


def _image_set(f, s):
    return frozenset(f(v) for v in s)


def check_fibered(x: SimplicialComplex, y: SimplicialComplex, f, core) -> bool:
    """Decide whether x is fibered over y by f with the given core.

    A vertex set U spans a k-simplex of x iff f(U) is a k-simplex of y and,
    when f(U) is maximal in y, U meets the core. Checked exhaustively: every
    simplex of x against the two conditions, and every transversal of every
    simplex of y for presence in x.
    """
    core = set(core)
    yset = {frozenset(s) for s in y.all_simplices()}
    if {f(v) for v in core} != set(y.vertices()):
        raise ValueError("f(core) must be the vertex set of y")
    ymax = {frozenset(s) for s in y.maximal_simplices()}
    for s in x.all_simplices():
        img = _image_set(f, s)
        if img not in yset:
            raise ValueError(f"f is not simplicial on {s}")
        if len(img) != len(s):
            return False
        if img in ymax and not core & set(s):
            return False
    fibers = defaultdict(list)
    for v in x.vertices():
        fibers[f(v)].append(v)
    for tau in y.all_simplices():
        for u in product(*(fibers[t] for t in tau)):
            if frozenset(tau) in ymax and not core & set(u):
                continue
            if not x.has_simplex(u):
                return False
    return True


def check_fibered_top(x: SimplicialComplex, y: SimplicialComplex, f, core) -> bool:
    """Sufficient test using top simplices only.

    Requires x and y pure of the same dimension d; then x is fibered with the
    given core when (i) a (d+1)-set spans a d-simplex of x exactly when its
    image is a d-simplex of y and it meets the core, and (ii) every d-simplex
    of y lifts into the core.
    """
    core = set(core)
    d = y.dim
    if x.dim != d or any(len(s) != d + 1 for s in x.maximal_simplices() + y.maximal_simplices()):
        return False
    fibers = defaultdict(list)
    for v in x.vertices():
        fibers[f(v)].append(v)
    xtop = {frozenset(s) for s in x.simplices(d)}
    want = set()
    for tau in y.simplices(d):
        lifts = list(product(*(fibers[t] for t in tau)))
        if not any(set(u) <= core for u in lifts):
            return False
        want.update(frozenset(u) for u in lifts if core & set(u))
    return want == xtop


def fibered_complex(y: SimplicialComplex, fibers: dict, core) -> SimplicialComplex:
    """The complex fibered over y with the given vertex fibers and core.

    Vertices are (t, x) for x in fibers[t]; a transversal of a simplex of y is
    a simplex, except that transversals of maximal simplices must meet the core.
    """
    core = set(core)
    ymax = {frozenset(s) for s in y.maximal_simplices()}
    out = []
    for tau in y.all_simplices():
        for pick in product(*([(t, x) for x in fibers[t]] for t in tau)):
            if frozenset(tau) in ymax and not core & set(pick):
                continue
            out.append(pick)
    return SimplicialComplex(out)


def is_spherical_h(x: SimplicialComplex, d: int) -> bool:
    """Homology-level sphericity: dimension d and reduced homology zero below d."""
    if x.dim != d:
        return False
    h = reduced_homology(x)
    return all(h[k] == 0 and not h.torsion.get(k) for k in range(-1, d))


def is_cm_h_level(x: SimplicialComplex, d: int | None = None) -> bool:
    """Homology-level Cohen-Macaulay test: x is d-spherical and the link of every
    k-simplex is (d-k-1)-spherical."""
    d = x.dim if d is None else d
    if not is_spherical_h(x, d):
        return False
    for k in range(0, d):
        for s in x.simplices(k):
            if not is_spherical_h(x.link(s), d - k - 1):
                return False
    return True
