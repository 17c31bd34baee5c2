import random
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steinlab import intmat
from steinlab.topo import (
    Chain,
    Poset,
    SimplicialComplex,
    barycentric_chain,
    boundary,
    check_fibered,
    check_fibered_top,
    euler_from_homology,
    face_poset,
    fibered_complex,
    is_cm_h_level,
    oriented,
    perm_sign,
    push_chain,
    reduced_homology,
    simplex_boundary_complex,
    sparse_invariant_factors,
    sparse_rank_mod_p,
)
from oracles import rational_betti


def random_complex(rng, vertices=6, facets=5, max_size=4):
    out = []
    for _ in range(facets):
        k = rng.randint(1, max_size)
        out.append(tuple(sorted(rng.sample(range(vertices), min(k, vertices)))))
    return SimplicialComplex(out)


complexes = st.integers(0, 10_000).map(lambda s: random_complex(random.Random(s)))


def random_chain(x, k, rng):
    c = Chain()
    for s in x.simplices(k):
        c.add_term(s, rng.randint(-3, 3))
    return c


RP2 = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (1, 3, 5), (2, 4, 5),
]


class TestChains:
    def test_boundary_of_triangle(self):
        c = boundary(Chain({(0, 1, 2): 1}))
        assert c == Chain({(1, 2): 1, (0, 2): -1, (0, 1): 1})

    def test_vertex_boundary_is_augmentation(self):
        assert boundary(Chain({(3,): 2})) == Chain({(): 2})

    def test_missing_simplex_raises(self):
        x = SimplicialComplex([(0, 1)])
        with pytest.raises(KeyError):
            boundary(Chain({(0, 2): 1}), x)

    def test_no_zero_coefficients(self):
        c = Chain({(0, 1): 2}) + Chain({(0, 1): -2})
        assert not c and len(c) == 0

    def test_oriented_sign(self):
        assert oriented((2, 1, 0)) == Chain({(0, 1, 2): -1})
        assert oriented((0, 0, 1)) == Chain()

    def test_perm_sign(self):
        assert perm_sign([0, 1, 2]) == 1 and perm_sign([1, 0, 2]) == -1 and perm_sign([2, 0, 1]) == 1


@pytest.mark.property
@given(complexes, st.integers(0, 1000))
def test_boundary_squares_to_zero(x, seed):
    rng = random.Random(seed)
    for k in range(x.dim + 1):
        assert not boundary(boundary(random_chain(x, k, rng)))


class TestBarycentric:
    def test_edge(self):
        c = barycentric_chain(Chain({("a", "b"): 1}))
        assert c == Chain({(("a",), ("a", "b")): 1, (("b",), ("a", "b")): -1})

    def test_triangle_has_six_flags(self):
        c = barycentric_chain(Chain({(0, 1, 2): 1}))
        assert len(c) == 6 and sorted(v for _, v in c) == [-1, -1, -1, 1, 1, 1]


@pytest.mark.property
@given(complexes, st.integers(0, 1000))
def test_barycentric_commutes_with_boundary(x, seed):
    rng = random.Random(seed)
    for k in range(1, x.dim + 1):
        c = random_chain(x, k, rng)
        assert boundary(barycentric_chain(c)) == barycentric_chain(boundary(c))


@pytest.mark.property
@given(complexes, st.integers(0, 1000))
def test_simplicial_push_commutes_with_boundary(x, seed):
    rng = random.Random(seed)
    images = {v: rng.randint(0, 3) for v in x.vertices()}
    for k in range(1, x.dim + 1):
        c = random_chain(x, k, rng)
        pushed = push_chain(images.get, c, key=lambda v: v)
        # the empty simplex is not pushed; compare in positive degrees
        lhs = {s: v for s, v in boundary(pushed) if s}
        rhs = {s: v for s, v in push_chain(images.get, boundary(c), key=lambda v: v) if s}
        assert lhs == rhs


def test_push_identity_and_order_check():
    c = Chain({(0, 1): 1, (1, 2): -2})
    assert push_chain(lambda v: v, c) == c
    with pytest.raises(ValueError):
        push_chain(lambda v: -v, c, less=lambda a, b: a < b)


class TestComplexes:
    def test_downward_closure(self):
        x = SimplicialComplex([(0, 1, 2)])
        assert x.f_vector() == [3, 3, 1]
        assert x.has_simplex((0, 2)) and not x.has_simplex((0, 3))

    def test_line_format_round_trip(self):
        x = SimplicialComplex([("a", "b", "c"), ("c", "d")])
        y = SimplicialComplex.from_lines(x.to_lines())
        assert y.f_vector() == x.f_vector()

    def test_link_and_join(self):
        x = simplex_boundary_complex(3)
        assert x.link((0,)).f_vector() == [3, 3]
        both = SimplicialComplex([(0,), (1,)]).join(SimplicialComplex([(0,), (1,)]))
        assert reduced_homology(both)[1] == 1

    def test_components(self):
        x = SimplicialComplex([(0, 1), (2, 3), (3, 4), (5,)])
        assert sorted(len(c) for c in x.connected_components()) == [1, 2, 3]

    def test_dot_export(self):
        assert '"0" -- "1"' in SimplicialComplex([(0, 1)]).to_dot()


class TestHomology:
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_simplex_boundary_is_sphere(self, k):
        h = reduced_homology(simplex_boundary_complex(k))
        assert h.nonzero() == {k - 1: 1} and h.is_spherical(k - 1)

    def test_projective_plane_torsion(self):
        h = reduced_homology(SimplicialComplex(RP2))
        assert h.nonzero() == {} and h.torsion[1] == [2]

    def test_modp_agrees_on_torsion_free_case(self):
        x = simplex_boundary_complex(4)
        assert reduced_homology(x, method="modp").betti == reduced_homology(x).betti

    def test_modp_sees_torsion_at_two(self):
        assert reduced_homology(SimplicialComplex(RP2), method="modp", prime=2)[1] == 1


@pytest.mark.property
@given(complexes)
def test_homology_matches_rational_oracle_and_euler(x):
    h = reduced_homology(x)
    oracle = rational_betti({k: x.simplices(k) for k in range(x.dim + 1)})
    assert {k: v for k, v in h.betti.items() if v} == {k: v for k, v in oracle.items() if v}
    assert euler_from_homology(h) == x.euler_characteristic()
    for factors in h.torsion.values():
        assert all(f > 1 for f in factors)
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))


@pytest.mark.property
@given(complexes)
def test_cone_is_acyclic(x):
    assert reduced_homology(x.cone()).is_acyclic()


@pytest.mark.property
@given(st.integers(0, 10_000))
def test_sparse_snf_matches_dense(seed):
    rng = random.Random(seed)
    r, c = rng.randint(1, 12), rng.randint(1, 12)
    density = rng.random()
    m = [[rng.randint(-4, 4) if rng.random() < density else 0 for _ in range(c)] for _ in range(r)]
    rows = [{j: v for j, v in enumerate(row) if v} for row in m]
    assert sparse_invariant_factors(rows) == intmat.dense_snf(m)
    assert sparse_rank_mod_p(rows) == intmat.rank(m)


def test_snf_product_is_determinant():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 6)
        m = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        d = intmat.det(m)
        factors = sparse_invariant_factors([{j: v for j, v in enumerate(row) if v} for row in m])
        prod = 1
        for f in factors:
            prod *= f
        assert (prod if len(factors) == n else 0) == abs(d)


class TestPosets:
    def test_order_complex_of_face_poset_is_subdivision(self):
        x = simplex_boundary_complex(2)
        sd = face_poset(x).order_complex()
        assert reduced_homology(sd).nonzero() == {1: 1}
        assert sd.f_vector() == [6, 6]

    def test_heights_and_chains(self):
        p = Poset(range(1, 4), lambda a, b: a < b and b % a == 0)
        assert max(len(c) for c in p.chains()) == 2
        q = Poset([1, 2, 4, 8], lambda a, b: a < b and b % a == 0)
        assert q.height(8) == 3 and len(list(q.maximal_chains())) == 1


class TestFibered:
    def test_identity(self):
        y = SimplicialComplex([(0, 1, 2)])
        assert check_fibered(y, y, lambda v: v, y.vertices())

    def test_bipartite_double_cover_of_edge(self):
        y = SimplicialComplex([(0, 1)])
        x = SimplicialComplex([((0, a), (1, b)) for a in range(2) for b in range(2)])
        assert check_fibered(x, y, lambda v: v[0], x.vertices())
        assert check_fibered_top(x, y, lambda v: v[0], x.vertices())

    def test_missing_core_simplex_breaks_condition_two(self):
        y = SimplicialComplex([(0, 1)])
        core = [(0, 0), (1, 0)]
        full = fibered_complex(y, {0: [0, 1], 1: [0, 1]}, core)
        assert check_fibered(full, y, lambda v: v[0], core)
        broken = SimplicialComplex([s for s in full.maximal_simplices() if s != ((0, 0), (1, 0))])
        assert not check_fibered(broken, y, lambda v: v[0], core)

    def test_non_simplicial_map_raises(self):
        y = SimplicialComplex([(0,), (1,)])
        x = SimplicialComplex([(0, 1)])
        with pytest.raises(ValueError):
            check_fibered(x, y, lambda v: v, [0, 1])


CM_BASES = [
    simplex_boundary_complex(2),
    simplex_boundary_complex(3),
    SimplicialComplex([(0, 1, 2)]),
    SimplicialComplex([(0, 1), (1, 2), (2, 3), (1, 3)]),
    SimplicialComplex([(0, 1, 2), (0, 2, 3), (0, 3, 4)]),
]


@pytest.mark.property
@given(st.sampled_from(range(len(CM_BASES))), st.integers(0, 10_000))
def test_fibered_over_cm_is_cm(index, seed):
    """Fibering over a CM base preserves the CM Betti profile (homology level)."""
    rng = random.Random(seed)
    y = CM_BASES[index]
    assert is_cm_h_level(y)
    fibers = {t: list(range(rng.randint(1, 3))) for t in y.vertices()}
    core = {(t, 0) for t in y.vertices()}
    core |= {(t, x) for t in y.vertices() for x in fibers[t] if rng.random() < 0.3}
    x = fibered_complex(y, fibers, core)
    assert check_fibered(x, y, lambda v: v[0], core)
    assert is_cm_h_level(x, y.dim)


def test_cm_detects_non_pure_complex():
    assert not is_cm_h_level(SimplicialComplex([(0, 1, 2), (2, 3)]), 2)
    assert not is_cm_h_level(SimplicialComplex([(0, 1), (2, 3)]), 1)
