"""Exact curvature certificates for the spectral gap of stable commutator
length, driven by letter-quasimorphisms."""

from .errors import SclError
from .words import Word, triangle_decompose
from .letterqm import LetterQM, sign_compress, stabilize, verify_axioms
from .surface import TransverseSurface, load_surface, parse_surface, validate
from .pipeline import certify
from .forge import commutator_torus, enumerate_surfaces, power_cover

__all__ = ["SclError", "Word", "triangle_decompose", "LetterQM", "sign_compress",
           "stabilize", "verify_axioms", "TransverseSurface", "load_surface",
           "parse_surface", "validate", "certify", "commutator_torus",
           "enumerate_surfaces", "power_cover"]
