"""Scalar spectral multipliers and the calculus facts built on them.

Each multiplier ``m`` is applied to a self-adjoint operator through its
spectrum; on SU(2) the sub-Laplacian and Laplace-Beltrami symbols are
diagonal, so ``m`` acts entrywise on their diagonals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .algebra import HalfInt, half_integers
from .errors import SingularAtZero


@dataclass(frozen=True)
class MultiplierSpec:
    """Base class; subclasses implement :meth:`_evaluate` on arrays."""

    @property
    def kind(self) -> str:
        return type(self).__name__

    @property
    def singular_at_zero(self) -> bool:
        return False

    def _evaluate(self, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError("multipliers are defined on the non-negative reals")
        if self.singular_at_zero and np.any(lam == 0):
            raise SingularAtZero(f"{self} is singular at 0")
        with np.errstate(over="ignore"):
            out = self._evaluate(lam)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Power(MultiplierSpec):
    k: int

    @property
    def singular_at_zero(self) -> bool:
        return self.k < 0

    def _evaluate(self, lam):
        return lam ** self.k


@dataclass(frozen=True)
class FracPower(MultiplierSpec):
    a: float

    @property
    def singular_at_zero(self) -> bool:
        return self.a < 0

    def _evaluate(self, lam):
        return np.power(lam, self.a)


@dataclass(frozen=True)
class ExpFrac(MultiplierSpec):
    """``exp(D * lam**(1/(2s)))``; ``D`` may be negative."""

    D: float
    s: float

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("s must be positive")

    def _evaluate(self, lam):
        return np.exp(self.D * lam ** (1.0 / (2.0 * self.s)))


@dataclass(frozen=True)
class Heat(MultiplierSpec):
    t: float

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")

    def _evaluate(self, lam):
        return np.exp(-self.t * lam)


@dataclass(frozen=True)
class Bessel(MultiplierSpec):
    """``(1 + lam)**(-N)``."""

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")

    def _evaluate(self, lam):
        return (1.0 + lam) ** (-float(self.N))


@dataclass(frozen=True)
class PowerExp(MultiplierSpec):
    """``lam**k * exp(-D * lam**(1/(2s)))``."""

    k: float
    D: float
    s: float

    def __post_init__(self):
        if self.k < 0 or self.D <= 0 or self.s <= 0:
            raise ValueError("need k >= 0, D > 0, s > 0")

    def _evaluate(self, lam):
        return np.power(lam, self.k) * np.exp(-self.D * lam ** (1.0 / (2.0 * self.s)))


KINDS = {cls.__name__: cls for cls in (Power, FracPower, ExpFrac, Heat, Bessel, PowerExp)}


def multiplier_from_dict(d: dict) -> MultiplierSpec:
    d = dict(d)
    return KINDS[d.pop("kind")](**d)


def eval_multiplier(spec: MultiplierSpec, lam: float) -> float:
    return spec(lam)


def power_exp_sup(k: float, D: float, s: float) -> tuple[float, float]:
    """Maximizer and maximum of ``lam**k * exp(-D lam**(1/(2s)))`` on lam >= 0.

    Setting the log-derivative to zero gives ``lam* = (2ks/D)**(2s)`` and the
    maximum ``(2ks/(eD))**(2ks)``.
    """
    if k < 0 or D <= 0 or s <= 0:
        raise ValueError("need k >= 0, D > 0, s > 0")
    if k == 0:
        return 0.0, 1.0
    lam_star = (2.0 * k * s / D) ** (2.0 * s)
    log_sup = 2.0 * k * s * (math.log(2.0 * k * s / D) - 1.0)
    return lam_star, math.exp(log_sup)


def power_exp_grid(k: float, D: float, s: float, n: int = 10_000, decades: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Geometric grid spanning ``[lam*/10**decades, lam* 10**decades]`` and the
    multiplier evaluated on it (``[10**-decades, 10**decades]`` when k = 0)."""
    lam_star, _ = power_exp_sup(k, D, s)
    centre = lam_star if lam_star > 0 else 1.0
    grid = np.geomspace(centre * 10.0 ** -decades, centre * 10.0 ** decades, n)
    return grid, PowerExp(k, D, s)(grid)


def bessel_term(N: int, l) -> float:
    """``d_l * ||(I + L(l))^{-N}||_HS**2`` for the SU(2) sub-Laplacian."""
    l = HalfInt.of(l)
    m = l.ms()
    return float(l.dim * np.sum((1.0 + l.value * (l.value + 1.0) - m * m) ** (-2.0 * N)))


def bessel_hs_partial_sums(N: int, l_max) -> list[tuple[float, float]]:
    """Running sums of ``sum_l (2l+1) ||(I + L(l))^{-N}||_HS**2`` over
    half-integers ``0 <= l <= l_max``, in exact summation order."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = []
    total = 0.0
    for l in half_integers(0, l_max):
        total += bessel_term(N, l)
        out.append((l.value, total))
    return out


def bessel_tail_diagnostics(N: int, l_cut=50, l_max=400, fit_from=None) -> dict:
    """Convergence evidence for the Bessel Hilbert-Schmidt series.

    Returns the tail increment ``S(l_max) - S(l_cut)`` (absolute and relative
    to ``S(l_max)``), the increment between ``l_max/2`` and ``l_max``, and the
    log-log slope of the per-l terms over ``[fit_from, l_max]`` (default: upper
    half). A slope >= -1 means the terms are not summable.
    """
    sums = bessel_hs_partial_sums(N, l_max)
    ls = np.array([l for l, _ in sums])
    S = np.array([v for _, v in sums])
    terms = np.diff(np.concatenate([[0.0], S]))
    at = lambda x: S[int(round(2 * float(x)))]
    fit_from = l_max / 2 if fit_from is None else fit_from
    sel = ls >= fit_from
    slope = float(np.polyfit(np.log(ls[sel]), np.log(terms[sel]), 1)[0])
    tail = float(S[-1] - at(l_cut))
    return {
        "N": N,
        "l_cut": float(l_cut),
        "l_max": float(l_max),
        "total": float(S[-1]),
        "tail_increment": tail,
        "relative_tail_increment": tail / float(S[-1]),
        "half_to_full_increment": float(S[-1] - at(l_max / 2)),
        "term_slope": slope,
    }
