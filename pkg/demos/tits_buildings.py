"""Tits buildings over small finite fields.

Run with ``python demos/tits_buildings.py``. Builds the flag complex of F_q^n,
checks its top homology, and shows that apartment classes of bases span it.
"""

from steinlab.arith import FiniteField
from steinlab.buildings import apartment_class, chamber_count, field_frame, tits_building_field
from steinlab.steinberg import phi_map, phi_span_rank, steinberg_coinvariants
from steinlab.topo import boundary, reduced_homology

# %% The building of F_2^3 is a graph: points and lines of the Fano plane.
building = tits_building_field(2, 3)
flags = building.order_complex()
print("f-vector of T_3(F_2):", flags.f_vector())
print("chambers:", len(flags.simplices(1)), "=", chamber_count(2, 3))

# %% Its reduced homology is concentrated in degree n-2 with rank q^(n(n-1)/2).
for q, n in [(2, 2), (3, 2), (2, 3), (3, 3)]:
    h = reduced_homology(tits_building_field(q, n).order_complex())
    print(f"q={q} n={n}: nonzero reduced Betti numbers {h.nonzero()}")

# %% An apartment is the hexagon of flags built from one basis; its class is a cycle.
F = FiniteField(2)
basis = [(1, 0, 0), (1, 1, 0), (0, 1, 1)]
apartment = apartment_class(field_frame(F, basis))
print("apartment chambers:", len(apartment), " boundary:", boundary(apartment))

# %% The map from bases is boundary, then barycentric subdivision, then the span map.
# Under the ascending-order orientation it equals (-1)^(n-1) times the apartment class.
print("phi(basis) == apartment class:", phi_map(basis, field=F) == apartment_class(field_frame(F, basis)))

# %% Over all 168 bases of F_2^3 the images span the whole top homology.
print("span of phi:", phi_span_rank(2, 3))

# %% The top homology has no coinvariants under GL_n(F_q).
for q, n in [(2, 2), (3, 2), (2, 3)]:
    print(steinberg_coinvariants(q, n))
