"""Partial bases with a congruence condition modulo 5.

Run with ``python demos/partial_bases_mod_five.py``. A set of vectors of Z^n is
admissible when it extends to a basis whose last coordinates are all 0 or 1
modulo the ideal. Membership is decided exactly in the last step and by a
bounded search otherwise.
"""

from steinlab.arith import RingDesc, RingElem, ideal_from_generators
from steinlab.partial_bases import PBSpec, build_complex, certify_I_simplex, component_count, unit_spec

Z = RingDesc.parse("Z")
five = ideal_from_generators(Z, [RingElem(Z, 5)])

# %% (2, 5) is unimodular and its last coordinate is 0 mod 5, yet it is not admissible:
# every completing vector has last coordinate 2 or 3 mod 5.
verdict = certify_I_simplex([(2, 5)], PBSpec(Z, 2, five, 5))
print(verdict.status, "-", verdict.reason)

# %% One dimension up the same vector plus a zero is admissible, with a checkable certificate.
spec3 = PBSpec(Z, 3, five, 5)
verdict = certify_I_simplex([(0, 2, 5)], spec3)
print(verdict.status, verdict.certificate)

# %% The edge {(0,2,5), (1,2,5)} is not admissible, though each vertex is.
print(certify_I_simplex([(0, 2, 5), (1, 2, 5)], spec3).status)

# %% A small certified complex over Z^3 with the condition mod 5.
cx = build_complex(PBSpec(Z, 3, five, 1, 2))
print("f-vector:", cx.f_vector(), " undecided:", cx.unknown)

# %% Components of the rank-two complex: connected over Z, many pieces over Z[sqrt(-5)].
# These are counts on truncations and are evidence only.
print("Z:", component_count(unit_spec(Z, 2, 3, 30))["components"])
R5 = RingDesc.parse("Q(sqrt(-5))")
for bound in (10, 20, 40):
    print(f"Z[sqrt(-5)] norm bound {bound}:", component_count(unit_spec(R5, 2, bound))["components"])
