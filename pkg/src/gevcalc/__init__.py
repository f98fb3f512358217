"""Symbol calculus for Riesz transforms and Gevrey classes on SU(2) and H1."""
from .algebra import (HEIS, SU2, ComplexMatrix, GeneratorWord, HalfInt, SymbolMatrix,
                      diag_band_norm, enumerate_words, op_norm, parse_word)
from .errors import GevcalcError

__version__ = "0.1.0"

__all__ = [
    "HEIS", "SU2", "ComplexMatrix", "GeneratorWord", "HalfInt", "SymbolMatrix",
    "diag_band_norm", "enumerate_words", "op_norm", "parse_word", "GevcalcError",
]
