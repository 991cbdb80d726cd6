"""Exact diagonal constructions over an enumeration of the real algebraic numbers."""

from .algebraic import AlgebraicReal, DyadicInterval, Order, compare, enumerate_algebraics, isolate_roots
from .diagonal import diagonalize, prepend_and_shift, recursive_t_sequence
from .polynomial import IntPolynomial
from .segments import Mode, fill_segment, hunt_target, place_next, run_placements
from .sigma import build_sigma, index_of, layer_element
from .streams import (
    AlgebraicStream,
    ConstantStream,
    DigitStream,
    OracleStream,
    ProvedDifferent,
    Unresolved,
    reals_differ,
    to_interval,
)
from .verifier import Certificate, check_certificate

__all__ = [
    "AlgebraicReal", "AlgebraicStream", "Certificate", "ConstantStream", "DigitStream",
    "DyadicInterval", "IntPolynomial", "Mode", "OracleStream", "Order", "ProvedDifferent",
    "Unresolved", "build_sigma", "check_certificate", "compare", "diagonalize",
    "enumerate_algebraics", "fill_segment", "hunt_target", "index_of", "isolate_roots",
    "layer_element", "place_next", "prepend_and_shift", "reals_differ", "recursive_t_sequence",
    "run_placements", "to_interval",
]
