"""Truncated infinitesimal Schroedinger representation of H1 in the Hermite basis.

Matrices are indexed by Hermite indices ``k = 0 .. N-1``. ``Z = X + iY`` and
``Zb = X - iY`` are computed from the X and Y matrices, not tabulated: with
``lam > 0`` this gives ``Z`` on the first lower diagonal with entries
``-2 sqrt(lam) sqrt((k+1)/2)`` and ``Zb`` on the first upper diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import HEIS, ComplexMatrix, GeneratorWord, SymbolMatrix
from .errors import InvalidLambda, TruncationTooSmall, WrongGroup

GENERATORS = ("X", "Y", "T", "Z", "Zb", "SubL")


@dataclass(frozen=True)
class HeisRep:
    """Schroedinger representation parameter ``lam`` truncated to ``trunc`` Hermite functions."""

    lam: float
    trunc: int

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam == 0:
            raise InvalidLambda(f"lambda must be a nonzero real, got {self.lam!r}")
        if int(self.trunc) != self.trunc or self.trunc < 2:
            raise TruncationTooSmall(f"truncation must be an integer >= 2, got {self.trunc!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "trunc", int(self.trunc))

    @property
    def signed_sqrt(self) -> float:
        """``sgn(lam) sqrt(|lam|)``."""
        return math.copysign(math.sqrt(abs(self.lam)), self.lam)

    def to_dict(self) -> dict:
        return {"lam": self.lam, "trunc": self.trunc}


def _xy_bands(rep: HeisRep) -> dict[str, np.ndarray]:
    """Upper (k, k+1) and lower (k+1, k) diagonals of pi(X) and pi(Y)."""
    a = np.sqrt((np.arange(rep.trunc - 1) + 1.0) / 2.0)
    r = math.sqrt(abs(rep.lam))
    s = rep.signed_sqrt
    return {
        "X_up": r * a + 0j,
        "X_lo": -r * a + 0j,
        "Y_up": 1j * s * a,
        "Y_lo": 1j * s * a,
    }


def _two_band(n: int, up: np.ndarray, lo: np.ndarray) -> ComplexMatrix:
    if not np.any(up):
        return ComplexMatrix.from_band(n, n, 1, lo)
    if not np.any(lo):
        return ComplexMatrix.from_band(n, n, -1, up)
    a = np.zeros((n, n), dtype=complex)
    k = np.arange(n - 1)
    a[k, k + 1] = up
    a[k + 1, k] = lo
    return ComplexMatrix(a)


def subl_diagonal(rep: HeisRep) -> np.ndarray:
    """``|lam| (2k + 1)``: the harmonic-oscillator spectrum."""
    return abs(rep.lam) * (2.0 * np.arange(rep.trunc) + 1.0)


def heis_symbol(gen: str, rep: HeisRep) -> SymbolMatrix:
    n = rep.trunc
    b = _xy_bands(rep)
    if gen == "X":
        mat = _two_band(n, b["X_up"], b["X_lo"])
    elif gen == "Y":
        mat = _two_band(n, b["Y_up"], b["Y_lo"])
    elif gen == "Z":
        mat = _two_band(n, b["X_up"] + 1j * b["Y_up"], b["X_lo"] + 1j * b["Y_lo"])
    elif gen == "Zb":
        mat = _two_band(n, b["X_up"] - 1j * b["Y_up"], b["X_lo"] - 1j * b["Y_lo"])
    elif gen == "T":
        mat = ComplexMatrix.diagonal(np.full(n, 1j * rep.lam))
    elif gen == "SubL":
        mat = ComplexMatrix.diagonal(subl_diagonal(rep))
    else:
        raise WrongGroup(f"{gen!r} is not an H1 generator; expected one of {GENERATORS}")
    return SymbolMatrix(HEIS, rep, mat)


@dataclass(frozen=True)
class WindowedSymbol:
    """Truncated word symbol together with the rows that match the infinite matrix.

    A product of ``n`` nearest-neighbour matrices only reaches indices up to
    ``row + n``, so rows ``0 .. N-1-n`` are exact.
    """

    matrix: ComplexMatrix
    valid_rows: tuple[int, int]
    word: GeneratorWord
    rep: HeisRep

    def masked(self) -> ComplexMatrix:
        return self.matrix.mask_rows(*self.valid_rows)

    def window_sup(self) -> float:
        """Largest modulus among the exact rows."""
        return self.masked().max_abs()


def word_window(word_len: int, trunc: int) -> tuple[int, int]:
    return 0, trunc - 1 - word_len


def heis_word_symbol(word: GeneratorWord, rep: HeisRep) -> WindowedSymbol:
    if word.alphabet != HEIS:
        raise WrongGroup(f"word {word} is over {word.alphabet}, not Heis")
    if 2 * len(word) >= rep.trunc:
        raise TruncationTooSmall(f"need 2*|word| < N, got |word| = {len(word)}, N = {rep.trunc}")
    mat = ComplexMatrix.identity(rep.trunc)
    cache: dict[str, ComplexMatrix] = {}
    for a in word:
        if a not in cache:
            cache[a] = heis_symbol(a, rep).matrix
        mat = mat @ cache[a]
    return WindowedSymbol(mat, word_window(len(word), rep.trunc), word, rep)
