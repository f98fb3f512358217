"""Higher-order Riesz transforms ``R_w = Y_1 ... Y_n L^{-n/2}`` on the dual of
SU(2) and H1, their norm sweeps, and the sub-Laplacian power expansion.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import heisenberg, su2
from .algebra import (HEIS, SU2, GeneratorWord, HalfInt, SymbolMatrix,
                      diag_band_norm, op_norm)
from .errors import (EmptyWord, NeedLengthTwo, TrivialRepresentation, Unsupported,
                     WrongGroup)
from .heisenberg import HeisRep
from .multiplier import FracPower

THREADS_ENV = "GEVCALC_THREADS"


def sweep_threads() -> int:
    """Worker cap for sweeps, from ``GEVCALC_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class RieszContext:
    group: str
    operator: str = "SubL"
    heis_rep: HeisRep | None = None

    def __post_init__(self):
        if self.group not in (SU2, HEIS):
            raise WrongGroup(f"unknown group {self.group!r}")
        if self.operator not in ("SubL", "Beltrami"):
            raise ValueError(f"operator must be SubL or Beltrami, got {self.operator!r}")
        if self.operator == "Beltrami" and self.group != SU2:
            raise WrongGroup("the Laplace-Beltrami variant exists only on SU(2)")
        if self.group == HEIS and self.heis_rep is None:
            raise ValueError("a Heisenberg context needs heis_rep")


def _check_word(ctx: RieszContext, word: GeneratorWord):
    if word.alphabet != ctx.group:
        raise WrongGroup(f"word {word} is over {word.alphabet}, context is {ctx.group}")
    if len(word) == 0:
        raise EmptyWord("Riesz transforms need |word| >= 1")


def riesz_symbol(ctx: RieszContext, word: GeneratorWord, index=None) -> SymbolMatrix:
    """Symbol of ``word * L^{-|word|/2}``.

    ``index`` is the spin ``l`` on SU(2) and an optional :class:`HeisRep`
    overriding ``ctx.heis_rep`` on H1. H1 results are masked to the exact rows.
    """
    _check_word(ctx, word)
    n = len(word)
    if ctx.group == SU2:
        l = HalfInt.of(index)
        if l.twice_value == 0:
            raise TrivialRepresentation("l = 0 is the kernel of the sub-Laplacian")
        w = su2.su2_word_symbol(word, l).matrix
        mult = su2.su2_multiplier_symbol(FracPower(-n / 2), ctx.operator, l).matrix
        return SymbolMatrix(SU2, l, w @ mult)
    rep = index if isinstance(index, HeisRep) else ctx.heis_rep
    ws = heisenberg.heis_word_symbol(word, rep)
    scale = FracPower(-n / 2)(heisenberg.subl_diagonal(rep))
    mat = ws.matrix.scale_cols(scale).mask_rows(*ws.valid_rows)
    return SymbolMatrix(HEIS, rep, mat, window=ws.valid_rows)


def symbol_norm(sym: SymbolMatrix) -> float:
    """Operator norm, exact via the max modulus when the symbol is single-diagonal."""
    if sym.band_offset is not None:
        return diag_band_norm(sym)
    return op_norm(sym)


@dataclass(frozen=True)
class SweepReport:
    word: GeneratorWord
    samples: list[tuple[float, float]]
    sup_norm: float
    growth_slope: float
    stabilization_ratio: float
    group: str = SU2
    operator: str = "SubL"
    rep: dict | None = None
    window: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "word": self.word.to_dict(),
            "samples": [[i, v] for i, v in self.samples],
            "sup_norm": self.sup_norm,
            "growth_slope": self.growth_slope,
            "stabilization_ratio": self.stabilization_ratio,
            "group": self.group,
            "operator": self.operator,
            "rep": self.rep,
            "window": list(self.window) if self.window is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        return cls(
            word=GeneratorWord.from_dict(d["word"]),
            samples=[(float(i), float(v)) for i, v in d["samples"]],
            sup_norm=d["sup_norm"],
            growth_slope=d["growth_slope"],
            stabilization_ratio=d["stabilization_ratio"],
            group=d["group"],
            operator=d["operator"],
            rep=d["rep"],
            window=tuple(d["window"]) if d["window"] is not None else None,
        )


def loglog_slope(x, y) -> float:
    """OLS slope of ``log y`` against ``log x`` (positive pairs only)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def _summarize(samples: list[tuple[float, float]]) -> tuple[float, float, float]:
    idx = np.array([i for i, _ in samples])
    vals = np.array([v for _, v in samples])
    upper = slice(len(samples) // 2, None)
    slope = loglog_slope(idx[upper], vals[upper])
    half = idx[-1] / 2
    j = int(np.argmin(np.abs(idx - half)))
    ratio = float(vals[-1] / vals[j]) if vals[j] != 0 else math.nan
    return float(vals.max()), slope, ratio


def riesz_sweep(ctx: RieszContext, word: GeneratorWord, indices: Sequence) -> SweepReport:
    """Norms of the Riesz symbol across the dual.

    On SU(2) ``indices`` are spins ``l``. On H1 the representation is fixed by
    ``ctx.heis_rep`` and ``indices`` are Hermite row cut-offs ``K``: each sample
    is the operator norm restricted to exact rows ``<= K``, which tracks the
    truncated infinite matrix as the cut-off grows.

    The growth slope is an OLS fit of log norm on log index over the upper half
    of the samples; the stabilization ratio compares the last sample with the
    one nearest half its index.
    """
    _check_word(ctx, word)
    indices = list(indices)
    if not indices:
        raise ValueError("sweep range must be nonempty")
    if ctx.group == SU2:
        ls = [HalfInt.of(i) for i in indices]
        if ls != sorted(ls):
            raise ValueError("sweep range must be sorted ascending")
        if ls[0].twice_value == 0:
            raise TrivialRepresentation("SU(2) sweeps exclude l = 0")
        work = lambda l: (l.value, symbol_norm(riesz_symbol(ctx, word, l)))
        threads = sweep_threads()
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                samples = list(ex.map(work, ls))
        else:
            samples = [work(l) for l in ls]
        window = None
        rep = None
    else:
        ks = [int(i) for i in indices]
        if ks != sorted(ks) or ks[0] < 0:
            raise ValueError("row cut-offs must be non-negative and ascending")
        sym = riesz_symbol(ctx, word)
        window = sym.window
        if ks[-1] > window[1]:
            raise ValueError(f"cut-off {ks[-1]} exceeds the exact window {window}")
        samples = []
        for k in ks:
            part = sym.matrix.mask_rows(0, k)
            samples.append((float(k), part.max_abs() if part.band_offset is not None else op_norm(part)))
        rep = ctx.heis_rep.to_dict()
    sup, slope, ratio = _summarize(samples)
    return SweepReport(word, samples, sup, slope, ratio, ctx.group, ctx.operator, rep, window)


def default_cutoffs(window_top: int) -> list[int]:
    """Dyadic row cut-offs ``1, 2, 4, ...`` ending at the window top."""
    ks = [0]
    k = 1
    while k < window_top:
        ks.append(k)
        k *= 2
    ks.append(window_top)
    return ks


class FactorBounds(NamedTuple):
    t1: float
    t2: list[float]
    t3: float


def factor_decomposition(word: GeneratorWord, l) -> FactorBounds:
    """Max-modulus norms of the telescoped factors of ``w_1 ... w_n L^{-n/2}``:

    ``w_1 L^{-1/2}``, then ``L^{1/2} w_j L^{-1/2}`` for ``1 < j < n``, then
    ``L^{1/2} w_n L^{-n/2}``. Their product bounds the Riesz symbol's norm.
    """
    if word.alphabet != SU2 or any(a not in ("P", "M") for a in word):
        raise WrongGroup("factor decomposition is defined for words over {P, M}")
    if len(word) < 2:
        raise NeedLengthTwo("need |word| >= 2")
    l = HalfInt.of(l)
    if l.twice_value == 0:
        raise TrivialRepresentation("need l >= 1/2")
    n = len(word)
    d = su2.subl_diagonal(l)
    sym = {a: su2.su2_symbol(a, l).matrix for a in set(word)}
    t1 = sym[word.letters[0]].scale_cols(d ** -0.5).max_abs()
    t2 = [sym[a].scale_rows(d ** 0.5).scale_cols(d ** -0.5).max_abs() for a in word.letters[1:-1]]
    t3 = sym[word.letters[-1]].scale_rows(d ** 0.5).scale_cols(d ** (-n / 2)).max_abs()
    return FactorBounds(t1, t2, t3)


def factor_slopes(word: GeneratorWord, ls: Sequence) -> dict:
    """Log-log growth exponents of each factor over the given spins."""
    ls = [HalfInt.of(l) for l in ls]
    rows = [factor_decomposition(word, l) for l in ls]
    x = [l.value for l in ls]
    return {
        "t1": loglog_slope(x, [r.t1 for r in rows]),
        "t2": [loglog_slope(x, [r.t2[j] for r in rows]) for j in range(len(word) - 2)],
        "t3": loglog_slope(x, [r.t3 for r in rows]),
    }


def expand_subl_power(k: int) -> list[tuple[int, GeneratorWord]]:
    """``L^k = (-1)^k sum_S S_1^2 ... S_k^2`` over ``S_i in {R1, R2}``."""
    if not 1 <= k <= 6:
        raise Unsupported("expand_subl_power supports 1 <= k <= 6")
    coeff = (-1) ** k
    return [
        (coeff, GeneratorWord(SU2, tuple(a for s in choice for a in (s, s))))
        for choice in itertools.product(("R1", "R2"), repeat=k)
    ]


def evaluate_terms(terms, l) -> np.ndarray:
    """Dense matrix of ``sum coeff * sigma_word(l)``."""
    l = HalfInt.of(l)
    out = np.zeros((l.dim, l.dim), dtype=complex)
    for c, w in terms:
        out += c * su2.su2_word_symbol(w, l).array
    return out


def symmetrized_multinomial(mats: Sequence[np.ndarray], h: int) -> np.ndarray:
    """``(1/m!) sum_{|k|=h} h!/k! sum_{sigma in S_m} prod_t Y_{sigma(t)}^{k_t}``.

    Equals ``(Y_1 + ... + Y_m)^h`` only when the ``Y_j`` commute (or h <= 2).
    """
    m = len(mats)
    n = mats[0].shape[0]
    out = np.zeros((n, n), dtype=complex)
    for ks in itertools.product(range(h + 1), repeat=m):
        if sum(ks) != h:
            continue
        coeff = math.factorial(h) / math.prod(math.factorial(k) for k in ks)
        for perm in itertools.permutations(range(m)):
            term = np.eye(n, dtype=complex)
            for t in range(m):
                term = term @ np.linalg.matrix_power(mats[perm[t]], ks[t])
            out += coeff * term
    return out / math.factorial(m)


def multinomial_residual(h: int, l) -> float:
    """Max-modulus gap between ``(Y_1 + Y_2)^h`` and the symmetrized formula,
    with ``Y_j = sigma_{R_j}(l)^2``."""
    ys = [np.linalg.matrix_power(su2.su2_symbol(a, l).array, 2) for a in ("R1", "R2")]
    exact = np.linalg.matrix_power(ys[0] + ys[1], h)
    return float(np.max(np.abs(exact - symmetrized_multinomial(ys, h))))
