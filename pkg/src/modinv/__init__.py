"""modinv: exact computations in modular invariant theory.

Finite fields GF(p^r), polynomial algebras R = GF(q)[x0..x{d-1}] with linear
group actions, invariant rings S = R^G, Dickson classes, Steenrod reduced
powers, bar-complex group cohomology slices, and windowed annihilator /
depth certificates built from Koszul homology and hsop presentations.
"""

from .field import Field, make_field
from .polyring import Poly, PolyRing, poly_from_text, poly_to_text

__all__ = [
    "Field",
    "make_field",
    "Poly",
    "PolyRing",
    "poly_from_text",
    "poly_to_text",
]

__version__ = "0.1.0"
