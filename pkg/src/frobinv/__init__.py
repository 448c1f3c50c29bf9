"""Frobenius invariants of polynomial rings and hypersurfaces over F_p."""

from .ring import Polynomial, RingSpec, RingError, frobenius_power, parse_polynomial
from .groebner import (
    GroebnerBasis,
    ModuleElement,
    eliminate,
    normal_form,
    reduced_groebner,
    syzygies,
)

__version__ = "0.1.0"
