"""Folded frames over a ring with class number two.

Run with ``python demos/folded_frames.py``. Summands of O^n are sent to
(rank, Steinitz class); the images of apartments land in a join of finite
sets whose top homology has rank (h-1)^(n-1).
"""

from steinlab.arith import RingDesc, class_group
from steinlab.lattices import free_module
from steinlab.perms import check_involution, good_perms
from steinlab.steinberg import construct_folded_frame, folded_image_span, integral_image_span

R5 = RingDesc.parse("Q(sqrt(-5))")
cg = class_group(R5)
print("class number of Z[sqrt(-5)]:", cg.order)

# %% Good permutations: running maximum s(k) is k or k+1 at every step.
print("good permutations of 1..4:", good_perms(4))
print("involution on bad permutations of 1..6:", check_involution(6))

# %% A folded frame for the apartment with class pairs (a_1, b_1) = (0, 1) over O^2.
cert = construct_folded_frame(free_module(R5, 2), [(0, 1)], cg, seed=0)
for claim in cert.claims:
    print(f"  {claim['status']}  {claim['claim']}: {claim['detail']}")
print("frame constituents:", cert.frame.constituents)
print("image:", cert.image)

# %% Rank three: every labelled apartment of the quotient is hit exactly.
out = folded_image_span(free_module(R5, 3), cg, seed=0)
print({k: v for k, v in out.items() if k != "certificates"})

# %% Frames whose lines add up to O^2 (integral frames) only ever hit zero.
out = integral_image_span(free_module(R5, 2), 2, cg)
print({k: out[k] for k in ("integral_frames", "span_rank", "target_rank", "distinct_class_sets")})
