from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from steinlab.arith import RingDesc, RingElem, class_group, ideal_from_generators
from steinlab.lattices import (
    ModuleLattice,
    SearchExhausted,
    det_over_ring,
    find_intermediate_summand,
    free_module,
    is_summand,
    is_unimodular,
    lattice_contains,
    lattice_intersection,
    lattice_sum,
    rank_one_module,
    saturate,
    span,
    span_and_saturate,
    steinitz_class,
    vec,
    zero_module,
)
from steinlab.partial_bases import PBSpec, complete_basis, unit_spec

Z = RingDesc.parse("Z")
R5 = RingDesc.parse("Q(sqrt(-5))")
R23 = RingDesc.parse("Q(sqrt(-23))")
CG5 = class_group(R5)
P2 = ideal_from_generators(R5, [RingElem(R5, 2), RingElem(R5, 1, 1)])


def coords(ring):
    if ring.is_quadratic:
        return st.tuples(st.integers(-4, 4), st.integers(-4, 4))
    return st.integers(-6, 6)


def vectors_in(ring, n, max_count):
    return st.lists(st.tuples(*[coords(ring)] * n), min_size=1, max_size=max_count).map(
        lambda vs: [vec(ring, *v) for v in vs]
    )


rings_and_vectors = st.sampled_from([(Z, 3), (R5, 2), (R5, 3), (R23, 2)]).flatmap(
    lambda rn: st.tuples(st.just(rn[0]), st.just(rn[1]), vectors_in(rn[0], rn[1], 3))
)


class TestSaturation:
    def test_worked_examples(self):
        assert span_and_saturate(Z, 2, [vec(Z, 2, 0)]) == span(Z, 2, [vec(Z, 1, 0)])
        assert span_and_saturate(Z, 2, [vec(Z, 2, 5)]) == span(Z, 2, [vec(Z, 2, 5)])

    def test_nonfree_saturation(self):
        v = vec(R5, 2, (1, 1))
        u = span(R5, 2, [v])
        sat = span_and_saturate(R5, 2, [v])
        assert sat != u and lattice_contains(sat, u) and sat.o_rank == 1
        assert steinitz_class(sat, CG5) == 1

    def test_zero_span(self):
        assert span_and_saturate(Z, 2, [vec(Z, 0, 0)]) == zero_module(Z, 2)

    def test_serialization_round_trip(self):
        u = span_and_saturate(R5, 3, [vec(R5, 2, (1, 1), 0), vec(R5, 0, 3, (0, 1))])
        assert ModuleLattice.from_dict(u.to_dict()) == u


@pytest.mark.property
@given(rings_and_vectors)
def test_saturation_properties(data):
    ring, n, vs = data
    u = span(ring, n, vs)
    sat = saturate(u)
    assert saturate(sat) == sat
    assert lattice_contains(sat, u) and sat.o_rank == u.o_rank
    assert is_summand(sat, free_module(ring, n))
    # closed under multiplication by w
    if ring.is_quadratic:
        w = RingElem(ring, 0, 1)
        assert all(sat.contains(tuple(w * x for x in v)) for v in sat.vectors())


@pytest.mark.property
@given(rings_and_vectors, rings_and_vectors)
def test_saturation_is_monotone(a, b):
    ring, n, vs = a
    extra = [v for v in b[2] if b[0] == ring and b[1] == n]
    small = span(ring, n, vs)
    big = span(ring, n, vs + extra)
    assert lattice_contains(saturate(big), saturate(small))


class TestSummands:
    def test_worked_examples(self):
        z2 = free_module(Z, 2)
        assert not is_summand(span(Z, 2, [vec(Z, 2, 0)]), z2)
        assert is_summand(span(Z, 2, [vec(Z, 2, 5)]), z2)

    def test_non_containment_raises(self):
        with pytest.raises(ValueError):
            is_summand(free_module(Z, 2), span(Z, 2, [vec(Z, 1, 0)]))

    def test_intersections(self):
        z2 = free_module(Z, 2)
        x = span(Z, 2, [vec(Z, 1, 0)])
        y = span(Z, 2, [vec(Z, 0, 1)])
        assert lattice_intersection(x, y) == zero_module(Z, 2)
        h1 = span(Z, 3, [vec(Z, 1, 0, 0), vec(Z, 0, 1, 0)])
        h2 = span(Z, 3, [vec(Z, 0, 1, 0), vec(Z, 0, 0, 1)])
        meet = lattice_intersection(h1, h2)
        assert meet == span(Z, 3, [vec(Z, 0, 1, 0)]) and is_summand(meet, free_module(Z, 3))
        assert lattice_sum(x, y) == z2

    def test_ambient_mismatch(self):
        with pytest.raises(ValueError):
            lattice_intersection(free_module(Z, 2), free_module(Z, 3))


@pytest.mark.property
@given(rings_and_vectors, rings_and_vectors)
def test_intersection_of_summands_is_summand(a, b):
    ring, n, vs = a
    if b[0] != ring or b[1] != n:
        return
    ambient = free_module(ring, n)
    x, y = saturate(span(ring, n, vs)), saturate(span(ring, n, b[2]))
    assert is_summand(lattice_intersection(x, y), ambient)


class TestSteinitz:
    def test_worked_examples(self):
        assert steinitz_class(free_module(R5, 3), CG5) == 0
        assert steinitz_class(span(R5, 3, [vec(R5, 1, 0, 0), vec(R5, 0, 1, 0)]), CG5) == 0
        assert steinitz_class(rank_one_module(P2), CG5) == 1
        twice = lattice_sum(rank_one_module(P2, 2, 0), rank_one_module(P2, 2, 1))
        assert steinitz_class(twice, CG5) == 0

    def test_zero_lattice_raises(self):
        with pytest.raises(ValueError):
            steinitz_class(zero_module(R5, 2), CG5)

    @pytest.mark.parametrize("ring", [R5, R23])
    def test_rank_one_ideals_give_their_class(self, ring):
        cg = class_group(ring)
        for i, rep in enumerate(cg.reps):
            assert steinitz_class(rank_one_module(rep, 3, 1), cg) == i


ideal_gens = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=2)


@pytest.mark.property
@given(st.sampled_from([R5, R23]), ideal_gens, ideal_gens)
def test_steinitz_class_is_additive(ring, ga, gb):
    ga = [RingElem(ring, *g) for g in ga if any(g)]
    gb = [RingElem(ring, *g) for g in gb if any(g)]
    if not ga or not gb:
        return
    cg = class_group(ring)
    a, b = ideal_from_generators(ring, ga), ideal_from_generators(ring, gb)
    total = lattice_sum(rank_one_module(a, 2, 0), rank_one_module(b, 2, 1))
    assert steinitz_class(total, cg) == cg.add(cg.classify(a), cg.classify(b))


def test_unimodular_examples():
    assert is_unimodular(vec(Z, 2, 5))
    assert not is_unimodular(vec(R5, 2, (1, 1)))
    assert is_unimodular(vec(R5, 1, 0, 0))
    with pytest.raises(ValueError):
        is_unimodular(vec(Z, 0, 0))


def _completable_by_determinant(vectors, ring, n) -> bool:
    """Second route: build a completion explicitly and check its determinant."""
    try:
        extra = complete_basis(vectors, PBSpec(ring, n, unit_spec(ring, n, 1).ideal, 2, 2))
    except (RuntimeError, ValueError):
        return False
    return det_over_ring([list(v) for v in list(vectors) + extra]).is_unit()


@pytest.mark.parametrize("ring,n", [(Z, 3), (R5, 2)])
def test_completable_iff_free_summand(ring, n):
    """k vectors extend to a basis iff their span is a rank-k summand of trivial class."""
    cg = class_group(ring)
    box = [RingElem(ring, a, b) for a in range(-2, 3) for b in (range(-1, 2) if ring.is_quadratic else [0])]
    ambient = free_module(ring, n)
    checked = 0
    for v in product(box, repeat=n):
        if not any(v):
            continue
        u = span(ring, n, [v])
        criterion = is_summand(u, ambient) and steinitz_class(u, cg) == 0
        assert criterion == _completable_by_determinant([v], ring, n)
        checked += 1
    assert checked > 50


class TestIntermediateSummands:
    def test_rank_one_class_one(self):
        m = free_module(R5, 2)
        u = find_intermediate_summand(zero_module(R5, 2), m, 1, 1, CG5, seed=3)
        assert u.o_rank == 1 and steinitz_class(u, CG5) == 1 and is_summand(u, m)

    def test_over_z(self):
        u = find_intermediate_summand(zero_module(Z, 2), free_module(Z, 2), 1, 0, class_group(Z))
        assert u.o_rank == 1 and is_summand(u, free_module(Z, 2))

    @pytest.mark.parametrize("c1,c2", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_chain_with_prescribed_signature(self, c1, c2):
        m = free_module(R5, 3)
        b1 = find_intermediate_summand(zero_module(R5, 3), m, 1, c1, CG5)
        b2 = find_intermediate_summand(b1, m, 2, c2, CG5)
        assert (b1.o_rank, steinitz_class(b1, CG5)) == (1, c1)
        assert (b2.o_rank, steinitz_class(b2, CG5)) == (2, c2)
        assert lattice_contains(b2, b1) and is_summand(b2, m) and is_summand(b1, m)

    def test_seed_reproducible(self):
        m = free_module(R23, 2)
        cg = class_group(R23)
        a = find_intermediate_summand(zero_module(R23, 2), m, 1, 2, cg, seed=11)
        b = find_intermediate_summand(zero_module(R23, 2), m, 1, 2, cg, seed=11)
        assert a == b

    def test_budget_exhaustion_is_distinct_error(self):
        with pytest.raises(SearchExhausted):
            find_intermediate_summand(zero_module(R5, 2), free_module(R5, 2), 1, 1, CG5, budget=1, max_candidates=0)
        with pytest.raises(SearchExhausted):
            # no rank-1 summand of Z^2 has a nontrivial class
            find_intermediate_summand(zero_module(Z, 2), free_module(Z, 2), 1, 1, class_group(Z), budget=2)

    def test_bad_ranks(self):
        with pytest.raises(ValueError):
            find_intermediate_summand(zero_module(Z, 2), free_module(Z, 2), 2, 0, class_group(Z))
