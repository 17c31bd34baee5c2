"""Exact computations with Tits buildings, Steinberg modules and partial-basis
complexes over Z, imaginary quadratic orders and finite fields."""

from .arith import RingDesc, RingElem, class_group, ideal_from_generators
from .lattices import ModuleLattice, free_module, span_and_saturate
from .topo import Chain, SimplicialComplex, reduced_homology

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "ModuleLattice",
    "RingDesc",
    "RingElem",
    "SimplicialComplex",
    "class_group",
    "free_module",
    "ideal_from_generators",
    "reduced_homology",
    "span_and_saturate",
]
