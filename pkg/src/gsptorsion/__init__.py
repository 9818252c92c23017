"""Exact arithmetic for GSp-type torsion: symplectic groups over Z/l^N,
l-adic lattice algorithms, Weil-pairing invariants and growth exponents."""

from .padic import PrecisionContext, ResidueMatrix, smith_normal_form
from .symplectic import GroupDescriptor, SymplecticElement, gsp_order, sp_order
from .torsion import TorsionPoint, TorsionSubgroup, canonical_type, isotropy_chain
from .lattice import Lattice, isotropic_lift, saturate, symplectic_complete
from .exponents import ProductShape, alpha_product, gamma_simple, is_exceptional
from .suites import RunConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "GroupDescriptor",
    "Lattice",
    "PrecisionContext",
    "ProductShape",
    "ResidueMatrix",
    "RunConfig",
    "SymplecticElement",
    "TorsionPoint",
    "TorsionSubgroup",
    "alpha_product",
    "canonical_type",
    "gamma_simple",
    "gsp_order",
    "is_exceptional",
    "isotropic_lift",
    "isotropy_chain",
    "run_suite",
    "saturate",
    "smith_normal_form",
    "sp_order",
    "symplectic_complete",
]
