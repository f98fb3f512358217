"""Numerical substrate: half-integer indices, generator words, banded complex
matrices, matrix norms and log-factorials.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import InvalidAlphabet, InvalidMatrix, NotSingleDiagonal, WrongGroup

SU2 = "SU2"
HEIS = "Heis"

ALPHABETS: dict[str, tuple[str, ...]] = {
    SU2: ("P", "M", "R1", "R2"),
    HEIS: ("X", "Y", "Z", "Zb"),
}

_TOKEN = re.compile(r"Zb|R1|R2|[PMXYZ]")


# ---------------------------------------------------------------------------
# half-integers
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class HalfInt:
    """A non-negative half-integer ``l``, stored as ``2l``."""

    twice_value: int

    def __post_init__(self):
        if isinstance(self.twice_value, bool) or not isinstance(self.twice_value, (int, np.integer)):
            raise TypeError(f"twice_value must be an integer, got {self.twice_value!r}")
        if self.twice_value < 0:
            raise ValueError("half-integers must be non-negative")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def of(cls, x) -> "HalfInt":
        """Coerce ``x`` (HalfInt, int, float, Fraction or ``"p/q"``) to a HalfInt."""
        if isinstance(x, HalfInt):
            return x
        if isinstance(x, str):
            x = Fraction(x)
        twice = Fraction(x) * 2 if not isinstance(x, float) else x * 2
        if twice != int(twice):
            raise ValueError(f"{x!r} is not a half-integer")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice_value / 2

    @property
    def dim(self) -> int:
        return self.twice_value + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def ms(self) -> np.ndarray:
        """Weights ``m = -l, -l+1, ..., l`` in basis order."""
        return np.arange(self.dim) - self.value

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def half_integers(l_min, l_max) -> list[HalfInt]:
    """All half-integers ``l_min <= l <= l_max`` in steps of one half."""
    lo, hi = HalfInt.of(l_min), HalfInt.of(l_max)
    return [HalfInt(t) for t in range(lo.twice_value, hi.twice_value + 1)]


# ---------------------------------------------------------------------------
# generator words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorWord:
    """Ordered word ``Y_1 ... Y_n`` over a group's generator alphabet."""

    alphabet: str
    letters: tuple[str, ...] = ()

    def __post_init__(self):
        if self.alphabet not in ALPHABETS:
            raise InvalidAlphabet(f"unknown group {self.alphabet!r}")
        letters = tuple(self.letters)
        allowed = ALPHABETS[self.alphabet]
        for a in letters:
            if a not in allowed:
                raise InvalidAlphabet(f"letter {a!r} is not in the {self.alphabet} alphabet {allowed}")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return "".join(self.letters)

    def count(self, letter: str) -> int:
        return self.letters.count(letter)

    def to_dict(self) -> dict:
        return {"alphabet": self.alphabet, "letters": list(self.letters)}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorWord":
        return cls(d["alphabet"], tuple(d["letters"]))


def group_of(letters: Iterable[str]) -> str:
    letters = list(letters)
    for group, allowed in ALPHABETS.items():
        if letters and all(a in allowed for a in letters):
            return group
    raise InvalidAlphabet(f"letters {letters} do not belong to a single alphabet")


def parse_word(text: str, group: str | None = None) -> GeneratorWord:
    """Parse a compact letter string such as ``"PMPM"`` or ``"ZZb"``.

    ``Zb``, ``R1`` and ``R2`` are two-character tokens. An empty string is the
    empty word and needs an explicit ``group``.
    """
    text = text.strip()
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != text:
        raise InvalidAlphabet(f"cannot tokenize word {text!r}")
    if not tokens:
        if group is None:
            raise InvalidAlphabet("the empty word needs an explicit group")
        return GeneratorWord(group, ())
    inferred = group_of(tokens)
    if group is not None and group != inferred:
        raise WrongGroup(f"word {text!r} is over {inferred}, expected {group}")
    return GeneratorWord(inferred, tuple(tokens))


def enumerate_words(alphabet: Sequence[str], max_len: int) -> list[GeneratorWord]:
    """All words of length 1..max_len, by length then lexicographically in the
    order the alphabet is given."""
    alphabet = list(alphabet)
    if not alphabet:
        raise InvalidAlphabet("alphabet must be nonempty")
    if len(set(alphabet)) != len(alphabet):
        raise InvalidAlphabet(f"repeated letters in {alphabet}")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    group = group_of(alphabet)
    return [
        GeneratorWord(group, letters)
        for n in range(1, max_len + 1)
        for letters in itertools.product(alphabet, repeat=n)
    ]


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def _band_span(rows: int, cols: int, offset: int) -> tuple[int, int]:
    """Row range [start, stop) of the diagonal {(i, i - offset)}."""
    start = max(0, offset)
    stop = max(start, min(rows, cols + offset))
    return start, stop


class ComplexMatrix:
    """Finite complex matrix with an optional single-diagonal tag.

    ``band_offset = b`` asserts that every nonzero entry lies at ``(i, i - b)``
    (row minus column equals ``b``). Band-tagged matrices built with
    :meth:`from_band` keep only their diagonal; the dense array is materialized
    on first access, so products of long ladder words stay O(n).
    """

    __slots__ = ("rows", "cols", "band_offset", "_dense", "_band")

    def __init__(self, entries, band_offset: int | None = None):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidMatrix(f"expected a nonempty 2-d array, got shape {a.shape}")
        self.rows, self.cols = a.shape
        self._dense = a
        self._band = None
        self.band_offset = None
        if band_offset is not None:
            band_offset = int(band_offset)
            i, j = np.nonzero(a)
            if np.any(i - j != band_offset):
                raise NotSingleDiagonal(f"entries off the diagonal with offset {band_offset}")
            self.band_offset = band_offset

    @classmethod
    def from_band(cls, rows: int, cols: int, offset: int, values) -> "ComplexMatrix":
        """Matrix whose only nonzero diagonal is ``{(i, i - offset)}``.

        ``values`` run over the rows of that diagonal in increasing order.
        """
        start, stop = _band_span(rows, cols, offset)
        values = np.asarray(values, dtype=complex).reshape(-1)
        if values.size != stop - start:
            raise InvalidMatrix(f"band of offset {offset} in a {rows}x{cols} matrix has "
                                f"{stop - start} entries, got {values.size}")
        if rows < 1 or cols < 1:
            raise InvalidMatrix("matrix dimensions must be positive")
        m = cls.__new__(cls)
        m.rows, m.cols, m.band_offset = int(rows), int(cols), int(offset)
        m._dense = None
        m._band = values
        return m

    @classmethod
    def diagonal(cls, values) -> "ComplexMatrix":
        values = np.asarray(values, dtype=complex).reshape(-1)
        return cls.from_band(values.size, values.size, 0, values)

    @classmethod
    def identity(cls, n: int) -> "ComplexMatrix":
        return cls.diagonal(np.ones(n))

    @classmethod
    def detect(cls, entries) -> "ComplexMatrix":
        """Wrap a dense array, tagging it if its nonzeros sit on one diagonal."""
        a = np.asarray(entries, dtype=complex)
        i, j = np.nonzero(a)
        offsets = np.unique(i - j)
        if offsets.size == 1:
            return cls(a, band_offset=int(offsets[0]))
        return cls(a)

    # -- views ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def array(self) -> np.ndarray:
        if self._dense is None:
            a = np.zeros((self.rows, self.cols), dtype=complex)
            r = self.band_rows()
            a[r, r - self.band_offset] = self._band
            self._dense = a
        return self._dense

    @property
    def band(self) -> np.ndarray:
        """Values on the tagged diagonal, in row order."""
        if self.band_offset is None:
            raise NotSingleDiagonal("matrix carries no band tag")
        if self._band is None:
            self._band = np.diagonal(self._dense, -self.band_offset).copy()
        return self._band

    def band_rows(self) -> np.ndarray:
        start, stop = _band_span(self.rows, self.cols, self.band_offset)
        return np.arange(start, stop)

    def _band_at(self, rows: np.ndarray) -> np.ndarray:
        start, stop = _band_span(self.rows, self.cols, self.band_offset)
        out = np.zeros(rows.shape, dtype=complex)
        ok = (rows >= start) & (rows < stop)
        out[ok] = self.band[rows[ok] - start]
        return out

    def max_abs(self) -> float:
        vals = self.band if self.band_offset is not None else self.array
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    # -- algebra -------------------------------------------------------------

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise InvalidMatrix(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.band_offset, other.band_offset
        if a is not None and b is not None:
            c = a + b
            start, stop = _band_span(self.rows, other.cols, c)
            r = np.arange(start, stop)
            return ComplexMatrix.from_band(self.rows, other.cols, c,
                                           self._band_at(r) * other._band_at(r - a))
        if a == 0:
            return other.scale_rows(self.band)
        if b == 0:
            return self.scale_cols(other.band)
        return ComplexMatrix(self.array @ other.array)

    def _combine(self, other: "ComplexMatrix", sign: int) -> "ComplexMatrix":
        if self.shape != other.shape:
            raise InvalidMatrix(f"shape mismatch {self.shape} vs {other.shape}")
        if self.band_offset is not None and self.band_offset == other.band_offset:
            return ComplexMatrix.from_band(self.rows, self.cols, self.band_offset,
                                           self.band + sign * other.band)
        return ComplexMatrix(self.array + sign * other.array)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, scalar) -> "ComplexMatrix":
        if isinstance(scalar, ComplexMatrix):
            return NotImplemented
        if self.band_offset is not None:
            return ComplexMatrix.from_band(self.rows, self.cols, self.band_offset, scalar * self.band)
        return ComplexMatrix(scalar * self.array)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "ComplexMatrix":
        return self * (1.0 / scalar)

    def __neg__(self) -> "ComplexMatrix":
        return self * -1

    @property
    def T(self) -> "ComplexMatrix":
        if self.band_offset is not None:
            return ComplexMatrix.from_band(self.cols, self.rows, -self.band_offset, self.band)
        return ComplexMatrix(self.array.T)

    @property
    def H(self) -> "ComplexMatrix":
        if self.band_offset is not None:
            return ComplexMatrix.from_band(self.cols, self.rows, -self.band_offset, self.band.conj())
        return ComplexMatrix(self.array.conj().T)

    def scale_rows(self, v) -> "ComplexMatrix":
        """``diag(v) @ self``."""
        v = np.asarray(v)
        if self.band_offset is not None:
            return ComplexMatrix.from_band(self.rows, self.cols, self.band_offset,
                                           v[self.band_rows()] * self.band)
        return ComplexMatrix(v[:, None] * self.array)

    def scale_cols(self, v) -> "ComplexMatrix":
        """``self @ diag(v)``."""
        v = np.asarray(v)
        if self.band_offset is not None:
            return ComplexMatrix.from_band(self.rows, self.cols, self.band_offset,
                                           v[self.band_rows() - self.band_offset] * self.band)
        return ComplexMatrix(self.array * v[None, :])

    def mask_rows(self, r0: int, r1: int) -> "ComplexMatrix":
        """Zero every row outside ``[r0, r1]``; keeps the band tag."""
        if self.band_offset is not None:
            r = self.band_rows()
            keep = (r >= r0) & (r <= r1)
            return ComplexMatrix.from_band(self.rows, self.cols, self.band_offset,
                                           np.where(keep, self.band, 0))
        a = self.array.copy()
        a[:r0] = 0
        a[r1 + 1:] = 0
        return ComplexMatrix(a)

    def __repr__(self) -> str:
        tag = f", band_offset={self.band_offset}" if self.band_offset is not None else ""
        return f"ComplexMatrix({self.rows}x{self.cols}{tag})"


@dataclass(frozen=True)
class SymbolMatrix:
    """Symbol of an operator at one representation.

    ``rep`` is a :class:`HalfInt` for SU(2) or a ``HeisRep`` for H1. ``window``
    is the inclusive row range that is free of truncation effects (H1 only).
    """

    group: str
    rep: object
    matrix: ComplexMatrix
    window: tuple[int, int] | None = None

    @property
    def array(self) -> np.ndarray:
        return self.matrix.array

    @property
    def band_offset(self) -> int | None:
        return self.matrix.band_offset

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


# ---------------------------------------------------------------------------
# norms and factorials
# ---------------------------------------------------------------------------

def _as_array(m) -> np.ndarray:
    if isinstance(m, SymbolMatrix):
        m = m.matrix
    if isinstance(m, ComplexMatrix):
        return m.array
    return np.asarray(m, dtype=complex)


def op_norm(m) -> float:
    """Largest singular value."""
    a = _as_array(m)
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def diag_band_norm(m) -> float:
    """Operator norm of a single-diagonal matrix, i.e. its largest modulus.

    For such a matrix every row and every column holds at most one nonzero
    entry, so the bound ``||A||_op <= max |A_ij|`` is attained.
    """
    if isinstance(m, SymbolMatrix):
        m = m.matrix
    if not isinstance(m, ComplexMatrix) or m.band_offset is None:
        raise NotSingleDiagonal("diag_band_norm needs a band-tagged matrix")
    return m.max_abs()


def log_factorial_power(k, s: float):
    """``s * log(k!)``, i.e. ``log((k!)**s)``, via log-Gamma."""
    k = np.asarray(k)
    if np.any(k < 0) or s <= 0:
        raise ValueError("need k >= 0 and s > 0")
    out = s * gammaln(k + 1.0)
    return float(out) if out.ndim == 0 else out
