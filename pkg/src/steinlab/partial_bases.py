"""Complexes of partial I-bases with certified membership.

Vectors of O^n are labelled by plain integer tuples: ``(a_1, ..., a_n)`` over
Z and ``((a_1, b_1), ..., (a_n, b_n))`` over a quadratic order. The functional
L is the last coordinate throughout.

Membership of a simplex is three-valued. A ``yes`` verdict carries a
completing I-basis, a ``no`` verdict carries an exact obstruction, and
``unknown`` means the bounded search ran out.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import intmat
from .arith import Ideal, RingDesc, RingElem, ZeroIdeal, ideal_or_zero, ideal_from_generators, unit_ideal
from .lattices import ModuleLattice, det_over_ring, free_module, lattice_sum, span
from .topo import SimplicialComplex

MAX_VERTICES = 200_000


@dataclass(frozen=True)
class PBSpec:
    ring: RingDesc
    n: int
    ideal: Ideal | ZeroIdeal
    height: int
    search_height: int | None = None

    def __post_init__(self):
        if self.search_height is not None and self.search_height < self.height:
            raise ValueError("search bound must be at least the vertex bound")

    @property
    def completion_height(self) -> int:
        return self.search_height if self.search_height is not None else self.height

    def with_height(self, h: int) -> "PBSpec":
        return PBSpec(self.ring, self.n, self.ideal, h, max(h, self.completion_height))


@dataclass
class MembershipVerdict:
    status: str  # "yes", "no" or "unknown"
    certificate: list | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == "yes"

    def to_json(self) -> dict:
        return {"status": self.status, "certificate": self.certificate, "reason": self.reason}


class NoGoodComplement(ValueError):
    pass


# -- conversions ----------------------------------------------------------------


def to_vec(ring: RingDesc, label) -> tuple[RingElem, ...]:
    if ring.is_quadratic:
        return tuple(RingElem(ring, a, b) for a, b in label)
    return tuple(RingElem(ring, a) for a in label)


def to_label(v) -> tuple:
    if v[0].ring.is_quadratic:
        return tuple((x.a, x.b) for x in v)
    return tuple(x.a for x in v)


def last_coord(v) -> RingElem:
    """The functional L, fixed as projection to the last coordinate."""
    return v[-1]


def label_str(label) -> str:
    if label and isinstance(label[0], tuple):
        return "(" + ",".join(f"{a}{b:+d}w" if b else str(a) for a, b in label) + ")"
    return "(" + ",".join(map(str, label)) + ")"


# -- congruences and ideals -----------------------------------------------------------


def _congruent_01(x: RingElem, ideal) -> bool:
    return ideal.contains(x) or ideal.contains(x - 1)


def _solve_in_ideal(ring: RingDesc, gens, target: RingElem):
    """Coefficients a_j in O with sum a_j g_j = target, or None."""
    rows = []
    for g in gens:
        rows.append(list(g.coords()[: ring.degree]))
        if ring.is_quadratic:
            rows.append(list(ring.omega_times(g.coords())))
    if not rows:
        return None if target else []
    sol = intmat.solve_left(rows, list(target.coords()[: ring.degree]))
    if sol is None:
        return None
    if ring.is_quadratic:
        return [RingElem(ring, sol[2 * i], sol[2 * i + 1]) for i in range(len(gens))]
    return [RingElem(ring, s) for s in sol]


def minors_generate_unit(vectors) -> bool:
    """True iff the k x k minors of the k vectors generate O (a partial basis)."""
    k, n = len(vectors), len(vectors[0])
    ring = vectors[0][0].ring
    vals = []
    for cols in combinations(range(n), k):
        m = det_over_ring([[v[c] for c in cols] for v in vectors])
        if m:
            vals.append(m)
    return bool(vals) and ideal_from_generators(ring, vals).is_unit()


def cofactor_vector(vectors) -> list[RingElem]:
    """c with det(v_1, ..., v_{n-1}, z) = c . z."""
    n = len(vectors[0])
    out = []
    for j in range(n):
        minor = det_over_ring([[v[c] for c in range(n) if c != j] for v in vectors])
        out.append(minor if (n - 1 + j) % 2 == 0 else -minor)
    return out


def verify_certificate(basis, vectors, spec: PBSpec) -> bool:
    """Independent check: basis has unit determinant, contains the vectors, and
    satisfies the congruence condition."""
    ring = spec.ring
    basis = [to_vec(ring, b) if not isinstance(b[0], RingElem) else b for b in basis]
    vectors = [to_vec(ring, v) if not isinstance(v[0], RingElem) else v for v in vectors]
    if len(basis) != spec.n or not det_over_ring([list(b) for b in basis]).is_unit():
        return False
    if not all(v in basis for v in vectors):
        return False
    return all(_congruent_01(last_coord(b), spec.ideal) for b in basis)


# -- enumeration --------------------------------------------------------------------


def ring_elements(ring: RingDesc, bound: int) -> list[RingElem]:
    """|a| <= bound over Z, norm <= bound over a quadratic order."""
    return ring.elements_up_to_norm(bound)


def enumerate_vectors(ring: RingDesc, n: int, bound: int):
    elems = ring_elements(ring, bound)
    for v in product(elems, repeat=n):
        if any(v):
            yield v


def enumerate_unimodular(spec: PBSpec, bound: int | None = None, limit: int = MAX_VERTICES) -> list[tuple]:
    """Labels of all unimodular vectors with every coordinate within the bound."""
    bound = spec.height if bound is None else bound
    ring = spec.ring
    elems = ring_elements(ring, bound)
    if len(elems) ** spec.n > 50 * limit:
        raise ValueError(f"guard: {len(elems)}^{spec.n} candidate vectors exceeds the enumeration limit")
    out = []
    if spec.n == 1:
        units = {u.coords() for u in ring.units()}
        return [to_label((x,)) for x in elems if x.coords() in units]
    for v in product(elems, repeat=spec.n):
        if not any(v):
            continue
        if ideal_from_generators(ring, [x for x in v if x]).is_unit():
            out.append(to_label(v))
            if len(out) > limit:
                raise ValueError(f"guard: more than {limit} unimodular vectors")
    return out


# -- certification ---------------------------------------------------------------------


def _final_step(vectors, spec: PBSpec) -> MembershipVerdict:
    """Exact decision for n-1 vectors: is there z completing them to an I-basis?"""
    ring = spec.ring
    c = cofactor_vector(vectors)
    x0 = _solve_in_ideal(ring, c, RingElem(ring, 1))
    if x0 is None:
        return MembershipVerdict("no", reason="not a partial basis")
    # completions: z = u x0 + (element of V), so L(z) runs over u L(x0) + I_V
    lv = [last_coord(v) for v in vectors]
    ideal = spec.ideal
    gens = [x for x in lv if x]
    if isinstance(ideal, Ideal):
        gens += ideal.basis()
    modulus = ideal_or_zero(ring, gens)
    residues = []
    for u in ring.units():
        base = u * last_coord(x0)
        for r in (0, 1):
            target = base - r
            if modulus.contains(target):
                # write target = i + sum a_j L(v_j) and subtract sum a_j v_j
                coeffs = _solve_in_ideal(ring, lv + (ideal.basis() if isinstance(ideal, Ideal) else []), target)
                a = coeffs[: len(lv)]
                z = tuple(
                    u * x0[t] - sum((a[j] * vectors[j][t] for j in range(len(vectors))), RingElem(ring, 0))
                    for t in range(spec.n)
                )
                basis = [to_label(v) for v in vectors] + [to_label(z)]
                return MembershipVerdict("yes", certificate=basis)
        residues.append(modulus.reduce(base))
    res = sorted({repr(r) for r in residues})
    mod = "(0)" if isinstance(modulus, ZeroIdeal) else str(modulus.rows())
    return MembershipVerdict(
        "no",
        reason=f"completions force L(z) in {{{', '.join(res)}}} modulo the ideal with HNF {mod}; none is 0 or 1",
    )


def certify_I_simplex(vectors, spec: PBSpec, hints=()) -> MembershipVerdict:
    """Decide whether the vectors form a partial I-basis of O^n.

    ``hints`` are stored candidate completions; the first one that verifies is
    returned as the certificate before any search runs.
    """
    ring = spec.ring
    for basis in hints:
        if verify_certificate(basis, vectors, spec):
            return MembershipVerdict("yes", certificate=[tuple(b) for b in basis], reason="replayed certificate")
    vecs = [to_vec(ring, v) if not isinstance(v[0], RingElem) else tuple(v) for v in vectors]
    if len(set(vecs)) != len(vecs):
        return MembershipVerdict("no", reason="repeated vector")
    for v in vecs:
        if not _congruent_01(last_coord(v), spec.ideal):
            return MembershipVerdict("no", reason=f"L{label_str(to_label(v))} is not 0 or 1 modulo I")
    if len(vecs) > spec.n or not minors_generate_unit(vecs):
        return MembershipVerdict("no", reason="not a partial basis")
    if len(vecs) == spec.n:
        return MembershipVerdict("yes", certificate=[to_label(v) for v in vecs])
    if len(vecs) == spec.n - 1:
        return _final_step(vecs, spec)
    # extend by one vector at a time within the search bound
    spans = []
    for z in enumerate_vectors(ring, spec.n, spec.completion_height):
        if z in vecs or not _congruent_01(last_coord(z), spec.ideal):
            continue
        if not minors_generate_unit(vecs + [z]):
            continue
        key = span(ring, spec.n, vecs + [z])
        if key in spans:
            continue
        spans.append(key)
        verdict = certify_I_simplex(vecs + [z], spec)
        if verdict:
            return verdict
    return MembershipVerdict("unknown", reason=f"no completion with coordinates within {spec.completion_height}")


# -- complexes ---------------------------------------------------------------------------


class PartialBasisComplex(SimplicialComplex):
    """A certified complex together with the bookkeeping of its construction."""

    spec: PBSpec
    unknown: dict
    rejected: dict


def _coords_array(ring: RingDesc, labels) -> np.ndarray:
    if ring.is_quadratic:
        return np.array(labels, dtype=np.int64)  # shape (V, n, 2)
    return np.array(labels, dtype=np.int64)[:, :, None]


def _unit_det_pairs(ring: RingDesc, arr: np.ndarray):
    """Index pairs (i < j) of 2-vectors whose determinant is a unit."""
    pairs = []
    V = arr.shape[0]
    for i in range(V - 1):
        a1, a2 = arr[i, 0], arr[i, 1]
        b1, b2 = arr[i + 1 :, 0], arr[i + 1 :, 1]
        if ring.is_quadratic:
            x = _mul(ring, a1, b2) - _mul(ring, a2, b1)
            norms = _norm(ring, x)
        else:
            x = a1[0] * b2[:, 0] - a2[0] * b1[:, 0]
            norms = x * x
        for j in np.nonzero(norms == 1)[0]:
            pairs.append((i, i + 1 + int(j)))
    return pairs


def _mul(ring, a, b):
    """Product of a single element a (shape (2,)) with an array b (shape (V, 2))."""
    if ring.half_omega:
        k = (ring.d - 1) // 4
        return np.stack(
            [a[0] * b[:, 0] + a[1] * b[:, 1] * k, a[0] * b[:, 1] + a[1] * b[:, 0] + a[1] * b[:, 1]], axis=1
        )
    return np.stack([a[0] * b[:, 0] + ring.d * a[1] * b[:, 1], a[0] * b[:, 1] + a[1] * b[:, 0]], axis=1)


def _norm(ring, x):
    a, b = x[:, 0], x[:, 1]
    if ring.half_omega:
        return a * a + a * b + b * b * ((1 - ring.d) // 4)
    return a * a - ring.d * b * b


def certified_vertices(spec: PBSpec, bound: int | None = None):
    """(accepted labels, unknown labels, rejected count) among enumerated vectors."""
    ring = spec.ring
    labels = enumerate_unimodular(spec, bound)
    if spec.n == 1:
        return [v for v in labels if _congruent_01(last_coord(to_vec(ring, v)), spec.ideal)], [], 0
    accepted, unknown, rejected = [], [], 0
    trivial = isinstance(spec.ideal, Ideal) and spec.ideal.is_unit()
    for v in labels:
        if trivial:
            accepted.append(v)
            continue
        verdict = certify_I_simplex([v], spec)
        if verdict.status == "yes":
            accepted.append(v)
        elif verdict.status == "unknown":
            unknown.append(v)
        else:
            rejected += 1
    return accepted, unknown, rejected


def build_complex(spec: PBSpec, max_dim: int | None = None) -> PartialBasisComplex:
    """The truncated complex of partial I-bases on vectors within the vertex bound."""
    ring = spec.ring
    verts, unknown_v, rejected_v = certified_vertices(spec)
    cx = PartialBasisComplex(vertices=verts)
    cx.spec = spec
    cx.unknown = {0: len(unknown_v)}
    cx.rejected = {0: rejected_v}
    top = spec.n - 1 if max_dim is None else min(max_dim, spec.n - 1)
    if top < 1 or not verts:
        return cx
    if spec.n == 2:
        # an edge is a full basis; both endpoints already satisfy the congruence
        arr = _coords_array(ring, verts)
        for i, j in _unit_det_pairs(ring, arr):
            cx.add_simplex((verts[i], verts[j]))
        cx.unknown[1] = 0
        return cx
    vecs = {v: to_vec(ring, v) for v in verts}
    current = [(v,) for v in verts]
    for k in range(1, top + 1):
        unknown = 0
        nxt = []
        adj = None
        if k >= 2:
            adj = _adjacency_of(cx.simplices(1))
        for s in current:
            cands = verts if adj is None else sorted(set.intersection(*(adj[x] for x in s)), key=cx.ids.get)
            for w in cands:
                if cx.ids[w] <= cx.ids[s[-1]]:
                    continue
                t = s + (w,)
                if k >= 2 and not all(cx.has_simplex(t[:i] + t[i + 1 :]) for i in range(len(t))):
                    continue
                verdict = certify_I_simplex([vecs[x] for x in t], spec)
                if verdict.status == "yes":
                    cx.add_simplex(t)
                    nxt.append(t)
                elif verdict.status == "unknown":
                    unknown += 1
        cx.unknown[k] = unknown
        current = nxt
    return cx


def _adjacency_of(edges):
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return _Adjacency(adj)


class _Adjacency(dict):
    def __missing__(self, key):
        return set()


def component_count(spec: PBSpec) -> dict:
    """Components of the certified graph on the search-bound vertices that meet
    the vertex-bound vertices. Paths may route through taller vertices."""
    outer = spec.completion_height
    big = PBSpec(spec.ring, spec.n, spec.ideal, outer, outer)
    cx = build_complex(big, max_dim=1)
    inner = set(enumerate_unimodular(spec))
    comps = cx.connected_components()
    touching = [c for c in comps if inner & set(c)]
    sizes = sorted((sum(1 for v in c if v in inner) for c in touching), reverse=True)
    return {
        "ring": str(spec.ring),
        "n": spec.n,
        "height": spec.height,
        "search_height": outer,
        "vertices": len(cx.vertices()),
        "inner_vertices": sum(sizes),
        "edges": len(cx.simplices(1)),
        "components": len(touching),
        "component_sizes": sizes,
        "unknown": cx.unknown,
    }


# -- Reiner completion and good complements ------------------------------------------------------


def reiner_complete(b, search_bound: int = 50) -> list[RingElem]:
    """c_3, ..., c_n with (b_1, b_2 + sum c_i b_i) = O, by search in increasing height."""
    b = list(b)
    if len(b) < 3 or not b[0]:
        raise ValueError("need at least three elements with b_1 nonzero")
    ring = b[0].ring
    if not ideal_or_zero(ring, b).is_unit():
        raise ValueError("elements must generate the unit ideal")
    for h in range(0, search_bound + 1):
        elems = ring_elements(ring, h)
        for cs in product(elems, repeat=len(b) - 2):
            if h and max(x.norm() if ring.is_quadratic else abs(x.a) for x in cs) != h:
                continue
            xi = b[1] + sum((c * x for c, x in zip(cs, b[2:])), RingElem(ring, 0))
            if ideal_or_zero(ring, [b[0], xi]).is_unit():
                return list(cs)
    raise RuntimeError(f"Reiner search exhausted at height {search_bound}")


def complete_basis(vectors, spec: PBSpec) -> list[tuple[RingElem, ...]]:
    """Some u_{k+2}, ..., u_n completing a partial basis of O^n (no congruences)."""
    ring = spec.ring
    vecs = [tuple(v) for v in vectors]
    if len(vecs) == spec.n:
        return []
    if len(vecs) == spec.n - 1:
        c = cofactor_vector(vecs)
        x0 = _solve_in_ideal(ring, c, RingElem(ring, 1))
        if x0 is None:
            raise ValueError("not a partial basis")
        return [tuple(x0)]
    for z in enumerate_vectors(ring, spec.n, max(spec.completion_height, 1)):
        if minors_generate_unit(vecs + [z]):
            return [z] + complete_basis(vecs + [z], spec)
    raise RuntimeError("no completion found within the search bound")


def find_good_complement(sigma, spec: PBSpec) -> ModuleLattice:
    """W with O^n = V_sigma + W (direct) and last_coord(W) = O."""
    ring = spec.ring
    n = spec.n
    vs = [to_vec(ring, v) if not isinstance(v[0], RingElem) else tuple(v) for v in sigma]
    k = len(vs) - 1
    if k + 1 >= n:
        raise ValueError("sigma must have fewer than n vectors")
    if not minors_generate_unit(vs):
        raise ValueError("sigma is not a partial basis")
    us = complete_basis(vs, spec)
    lvals = [last_coord(v) for v in vs]
    i_sigma = ideal_or_zero(ring, lvals)
    zero = RingElem(ring, 0)
    if isinstance(i_sigma, ZeroIdeal):
        w_basis = us
    elif i_sigma.is_unit():
        a = _solve_in_ideal(ring, lvals, RingElem(ring, 1))
        v = tuple(sum((a[j] * vs[j][t] for j in range(len(vs))), zero) for t in range(n))
        u0 = us[0]
        f = 1 - last_coord(u0)
        w_basis = [tuple(u0[t] + f * v[t] for t in range(n))] + us[1:]
    elif k < n - 2:
        # put a vector with nonzero L last, keep a different one as the swapped-out z
        idx = next(i for i in range(len(us) - 1, -1, -1) if last_coord(us[i]))
        us = us[:idx] + us[idx + 1 :] + [us[idx]]
        z, rest, un = us[0], us[1:-1], us[-1]
        others = vs + rest
        b = [last_coord(un), last_coord(z)] + [last_coord(x) for x in others]
        c = reiner_complete(b)
        y = tuple(z[t] + sum((ci * x[t] for ci, x in zip(c, others)), zero) for t in range(n))
        w_basis = [y] + rest + [un]
    else:
        raise NoGoodComplement("(0) != I_sigma != O and sigma has n-1 vectors: no good extension guaranteed")
    W = span(ring, n, w_basis)
    V = span(ring, n, vs)
    if lattice_sum(V, W) != free_module(ring, n) or V.o_rank + W.o_rank != n:
        raise AssertionError("constructed complement is not a direct complement")
    if not ideal_or_zero(ring, [last_coord(w) for w in w_basis]).is_unit():
        raise AssertionError("constructed complement does not surject onto O")
    return W


def is_good_simplex(sigma, spec: PBSpec) -> bool:
    try:
        find_good_complement(sigma, spec)
        return True
    except NoGoodComplement:
        return False


def good_skeleton_check(cx: PartialBasisComplex) -> dict:
    """Every simplex of dimension <= n-3 must admit a constructed good complement."""
    spec = cx.spec
    checked = failures = 0
    for k in range(0, min(spec.n - 3, cx.dim) + 1):
        for s in cx.simplices(k):
            checked += 1
            if not is_good_simplex(list(s), spec):
                failures += 1
    return {"checked": checked, "failures": failures}


def simplex_set(cx: SimplicialComplex) -> set[frozenset]:
    return {frozenset(s) for s in cx.all_simplices()}


def zero_ideal_full_subcomplex_check(ring: RingDesc, n: int, height: int, search_height: int | None = None) -> dict:
    """B_n(0) against the full subcomplex of B_n(O) on vertices with last_coord(v) in {0, 1}."""
    whole = build_complex(PBSpec(ring, n, unit_ideal(ring), height, search_height))
    zero = build_complex(PBSpec(ring, n, ZeroIdeal(ring), height, search_height))
    keep = [v for v in whole.vertices() if last_coord(to_vec(ring, v)) in (RingElem(ring, 0), RingElem(ring, 1))]
    full = whole.full_subcomplex(keep)
    return {
        "simplices": len(simplex_set(zero)),
        "agree": simplex_set(full) == simplex_set(zero),
        "unknown": sum(zero.unknown.values()) + sum(whole.unknown.values()),
    }


def zero_link_isomorphism(ring: RingDesc, n: int, height: int, search_height: int | None = None) -> dict:
    """The full subcomplex of B_n(0) on last_coord(v) = 0, mapped by dropping the last
    coordinate, against B_{n-1}(O) built directly."""
    zero = build_complex(PBSpec(ring, n, ZeroIdeal(ring), height, search_height))
    keep = [v for v in zero.vertices() if not last_coord(to_vec(ring, v))]
    z_n = zero.full_subcomplex(keep)
    smaller = build_complex(PBSpec(ring, n - 1, unit_ideal(ring), height, search_height))
    mapped = {frozenset(v[:-1] for v in s) for s in simplex_set(z_n)}
    return {"simplices": len(mapped), "isomorphic": mapped == simplex_set(smaller)}


def monotonicity_check(small: PBSpec, large: PBSpec) -> dict:
    """Every certified simplex for the smaller ideal is certified for the larger one."""
    if small.ring != large.ring or small.n != large.n:
        raise ValueError("specs must share ring and rank")
    if isinstance(large.ideal, Ideal) and isinstance(small.ideal, Ideal):
        if not all(large.ideal.contains(x) for x in small.ideal.basis()):
            raise ValueError("first ideal must be contained in the second")
    inner = simplex_set(build_complex(small))
    outer = build_complex(large)
    missing = [s for s in inner if not certify_I_simplex(list(s), large)]
    return {"simplices": len(inner), "missing": len(missing), "outer": len(simplex_set(outer))}


def unit_spec(ring: RingDesc, n: int, height: int, search_height: int | None = None) -> PBSpec:
    return PBSpec(ring, n, unit_ideal(ring), height, search_height)


__all__ = [
    "MembershipVerdict",
    "NoGoodComplement",
    "PBSpec",
    "PartialBasisComplex",
    "build_complex",
    "certify_I_simplex",
    "component_count",
    "enumerate_unimodular",
    "find_good_complement",
    "good_skeleton_check",
    "is_good_simplex",
    "monotonicity_check",
    "reiner_complete",
    "unit_spec",
    "verify_certificate",
    "zero_ideal_full_subcomplex_check",
    "zero_link_isomorphism",
]
