"""SU(2) symbols at the spin-l representation.

Basis order is ``m = -l, ..., l`` (row/column index ``i = m + l``). ``P`` and
``M`` are the single-diagonal ladder symbols; ``R1 = (P - M)/2`` and
``R2 = i(P + M)/2`` are the skew-Hermitian real fields with
``-(R1^2 + R2^2) = SubL``. ``R3 = [R1, R2] = i diag(m)`` completes the basis
for the Casimir ``-(R1^2 + R2^2 + R3^2) = l(l+1) I``.
"""
from __future__ import annotations

import numpy as np

from .algebra import SU2, ComplexMatrix, GeneratorWord, HalfInt, SymbolMatrix
from .errors import TrivialRepresentation, WrongGroup
from .multiplier import MultiplierSpec

GENERATORS = ("P", "M", "R1", "R2", "R3", "SubL", "Beltrami")


def ladder_plus(l, m):
    """Coefficient of ``P``: it maps ``e_m`` to ``ladder_plus(l, m) e_{m+1}``.

    Vectorized; vanishes at ``m = l`` and is clipped to zero outside the weight
    range so truncated index windows stay exact.
    """
    l = np.asarray(l, dtype=float)
    m = np.asarray(m, dtype=float)
    return -np.sqrt(np.clip((l - m) * (l + m + 1.0), 0.0, None))


def ladder_minus(l, m):
    """Coefficient of ``M``: it maps ``e_m`` to ``ladder_minus(l, m) e_{m-1}``."""
    l = np.asarray(l, dtype=float)
    m = np.asarray(m, dtype=float)
    return -np.sqrt(np.clip((l + m) * (l - m + 1.0), 0.0, None))


def subl_diagonal(l) -> np.ndarray:
    """Diagonal of the sub-Laplacian symbol, ``l(l+1) - m^2``."""
    l = HalfInt.of(l)
    m = l.ms()
    return l.value * (l.value + 1.0) - m * m


def beltrami_diagonal(l) -> np.ndarray:
    l = HalfInt.of(l)
    return np.full(l.dim, l.value * (l.value + 1.0))


def operator_diagonal(op: str, l) -> np.ndarray:
    if op == "SubL":
        return subl_diagonal(l)
    if op == "Beltrami":
        return beltrami_diagonal(l)
    raise ValueError(f"operator must be SubL or Beltrami, got {op!r}")


def _plus_matrix(l: HalfInt) -> ComplexMatrix:
    # nonzero at (m+1, m): row minus column = +1
    m = l.ms()[:-1]
    return ComplexMatrix.from_band(l.dim, l.dim, 1, ladder_plus(l.value, m))


def su2_symbol(gen: str, l) -> SymbolMatrix:
    """Symbol of one generator at spin ``l``."""
    l = HalfInt.of(l)
    if gen == "P":
        mat = _plus_matrix(l)
    elif gen == "M":
        mat = _plus_matrix(l).T
    elif gen == "R1":
        p = _plus_matrix(l)
        mat = (p - p.T) * 0.5
    elif gen == "R2":
        p = _plus_matrix(l)
        mat = (p + p.T) * 0.5j
    elif gen == "R3":
        mat = ComplexMatrix.diagonal(1j * l.ms())
    elif gen in ("SubL", "Beltrami"):
        mat = ComplexMatrix.diagonal(operator_diagonal(gen, l))
    else:
        raise WrongGroup(f"{gen!r} is not an SU(2) generator; expected one of {GENERATORS}")
    return SymbolMatrix(SU2, l, mat)


def su2_word_symbol(word: GeneratorWord, l) -> SymbolMatrix:
    """Left-to-right product of the letter symbols; identity for the empty word."""
    l = HalfInt.of(l)
    if word.alphabet != SU2:
        raise WrongGroup(f"word {word} is over {word.alphabet}, not SU2")
    mat = ComplexMatrix.identity(l.dim)
    cache: dict[str, ComplexMatrix] = {}
    for a in word:
        if a not in cache:
            cache[a] = su2_symbol(a, l).matrix
        mat = mat @ cache[a]
    return SymbolMatrix(SU2, l, mat)


def su2_multiplier_symbol(spec: MultiplierSpec, op: str, l) -> SymbolMatrix:
    """``m(sigma_op(l))`` applied entrywise to the diagonal symbol."""
    l = HalfInt.of(l)
    d = operator_diagonal(op, l)
    if spec.singular_at_zero and np.any(d == 0):
        raise TrivialRepresentation(f"{spec} is singular at 0 and {op} vanishes at l = {l}")
    return SymbolMatrix(SU2, l, ComplexMatrix.diagonal(spec(d)))
