"""Exact rational computations with jet spaces over Carnot groups."""

from .algebra import AlgebraError, StratAlg, bch, catalog, load_algebra
from .contact import (Obstruction, PolyMap, characteristic_test, counterexample_automorphism, deprolong,
                      is_contact, prolong_point)
from .embed import CertificateError, embed
from .exact import MPoly, RatMatrix
from .hd import HDElem, HDSpace, NotMember, hd_basis
from .jets import JetPoint, JetSpace, jet_space
from .polyjet import dual_poly_basis, taylor

__all__ = [
    "AlgebraError", "CertificateError", "HDElem", "HDSpace", "JetPoint", "JetSpace", "MPoly", "NotMember",
    "Obstruction", "PolyMap", "RatMatrix", "StratAlg", "bch", "catalog", "characteristic_test",
    "counterexample_automorphism", "deprolong", "dual_poly_basis", "embed", "hd_basis", "is_contact",
    "jet_space", "load_algebra", "prolong_point", "taylor",
]
__version__ = "0.1.0"
