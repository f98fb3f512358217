"""Fourier-side Gevrey analysis on SU(2).

A coefficient profile assigns a matrix ``phi(l)`` to every spin up to a band
limit. Seminorms are Plancherel sums ``sum_l (2l+1) ||sigma(l) phi(l)||_HS^2``.

Profiles built from the default single-entry pattern (centre weight,
``m = n = 0`` or ``m = n = 1/2``) take a vectorized path: ``sigma(l) phi(l)``
is then one column of ``sigma(l)`` scaled by a scalar, so every spin is
handled at once. Other profiles go through dense per-spin products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from . import su2
from .algebra import SU2, GeneratorWord, HalfInt, enumerate_words, half_integers
from .errors import DegenerateProfile, InvalidProfile

PROFILE_KINDS = ("expfrac", "heat", "polynomial", "delta", "explicit")
_CENTRE_KINDS = ("expfrac", "heat", "polynomial")
_PARAMS = {
    "expfrac": ("B", "s"),
    "heat": ("t",),
    "polynomial": ("p",),
    "delta": ("l0", "i", "j", "scale"),
    "explicit": ("coeffs",),
}
ROUMIEU_B_GRID = tuple(2.0 ** e for e in range(-4, 3))
TAIL_FRACTION = 0.2
MONOTONE_RTOL = 1e-12


def centre_m(l: HalfInt) -> float:
    """Weight of the default pattern entry: 0 for integer spins, 1/2 otherwise."""
    return 0.0 if l.is_integer else 0.5


def centre_index(l: HalfInt) -> int:
    return int(round(l.value + centre_m(l)))


@dataclass(frozen=True)
class CoefficientProfile:
    """Band-limited Fourier coefficients; ``phi(l)`` is built on demand.

    ``pattern`` maps a spin to a ``(2l+1, 2l+1)`` matrix replacing the default
    single centre entry.
    """

    kind: str
    params: Mapping
    band_limit: HalfInt
    pattern: Callable[[HalfInt], np.ndarray] | None = None

    @property
    def centred(self) -> bool:
        return self.pattern is None and self.kind in _CENTRE_KINDS

    def spins(self, l_max=None) -> list[HalfInt]:
        top = self.band_limit if l_max is None else HalfInt.of(l_max)
        if top > self.band_limit:
            raise InvalidProfile(f"l_max {top} exceeds band limit {self.band_limit}")
        return half_integers(0, top)

    def _pattern(self, l: HalfInt) -> np.ndarray:
        if self.pattern is not None:
            p = np.asarray(self.pattern(l), dtype=complex)
            if p.shape != (l.dim, l.dim):
                raise InvalidProfile(f"pattern at l = {l} has shape {p.shape}, expected {(l.dim, l.dim)}")
            return p
        p = np.zeros((l.dim, l.dim), dtype=complex)
        i = centre_index(l)
        p[i, i] = 1.0
        return p

    def coefficient(self, l) -> np.ndarray:
        """Dense ``phi(l)``; zero above the band limit."""
        l = HalfInt.of(l)
        kind, q = self.kind, self.params
        if l > self.band_limit:
            return np.zeros((l.dim, l.dim), dtype=complex)
        if kind == "delta":
            out = np.zeros((l.dim, l.dim), dtype=complex)
            if l == q["l0"]:
                out[q["i"], q["j"]] = q["scale"]
            return out
        if kind == "explicit":
            mat = q["coeffs"].get(l)
            return np.zeros((l.dim, l.dim), dtype=complex) if mat is None else np.asarray(mat, dtype=complex)
        d = su2.subl_diagonal(l)
        if kind == "expfrac":
            rows = np.exp(-q["B"] * d ** (1.0 / (2.0 * q["s"])))
        elif kind == "heat":
            rows = np.exp(-q["t"] * d)
        else:
            rows = np.full(l.dim, (1.0 + l.value) ** -q["p"])
        return rows[:, None] * self._pattern(l)

    def to_dict(self) -> dict:
        if self.kind == "explicit" or self.pattern is not None:
            raise InvalidProfile("explicit and custom-pattern profiles are not serializable")
        params = dict(self.params)
        if self.kind == "delta":
            params["l0"] = str(params["l0"])
        return {"kind": self.kind, "params": params, "band_limit": str(self.band_limit)}

    @classmethod
    def from_dict(cls, d: dict) -> "CoefficientProfile":
        return make_profile(d["kind"], d["params"], d["band_limit"])


def _positive(name, v):
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise InvalidProfile(f"{name} must be a real number, got {v!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise InvalidProfile(f"{name} must be positive and finite, got {v!r}")
    return v


def make_profile(kind: str, params: Mapping, band_limit, pattern=None) -> CoefficientProfile:
    """Validated profile constructor.

    ``delta`` takes ``l0, i, j`` (matrix indices at spin ``l0``) and an
    optional ``scale`` (default 1); ``explicit`` takes ``coeffs``, a mapping
    from spin to matrix.
    """
    if kind not in PROFILE_KINDS:
        raise InvalidProfile(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")
    params = dict(params)
    unknown = set(params) - set(_PARAMS[kind])
    if unknown:
        raise InvalidProfile(f"unknown {kind} parameters {sorted(unknown)}")
    try:
        band = HalfInt.of(band_limit)
    except (TypeError, ValueError) as exc:
        raise InvalidProfile(f"band limit: {exc}") from None
    if band.value < 1:
        raise InvalidProfile("band limit must be >= 1")
    if kind == "delta":
        missing = {"l0", "i", "j"} - set(params)
        if missing:
            raise InvalidProfile(f"delta needs {sorted(missing)}")
        l0 = HalfInt.of(params["l0"])
        if l0 > band:
            raise InvalidProfile(f"l0 = {l0} exceeds band limit {band}")
        for key in ("i", "j"):
            v = params[key]
            if int(v) != v or not 0 <= int(v) < l0.dim:
                raise InvalidProfile(f"{key} must be an index in [0, {l0.dim}), got {v!r}")
            params[key] = int(v)
        params["l0"] = l0
        params["scale"] = complex(params.get("scale", 1.0))
        if params["scale"].imag == 0:
            params["scale"] = params["scale"].real
    elif kind == "explicit":
        coeffs = {}
        for l, mat in dict(params.get("coeffs", {})).items():
            l = HalfInt.of(l)
            mat = np.asarray(mat, dtype=complex)
            if l > band or mat.shape != (l.dim, l.dim):
                raise InvalidProfile(f"explicit coefficient at l = {l} is out of band or misshapen")
            coeffs[l] = mat
        params = {"coeffs": coeffs}
    else:
        missing = set(_PARAMS[kind]) - set(params)
        if missing:
            raise InvalidProfile(f"{kind} needs {sorted(missing)}")
        params = {k: _positive(k, params[k]) for k in _PARAMS[kind]}
    return CoefficientProfile(kind, params, band, pattern)


def parse_profile(text: str, band_limit) -> CoefficientProfile:
    """Parse ``kind:key=value,...``, e.g. ``expfrac:B=1,s=2`` or ``delta:l0=1,i=1,j=1``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise InvalidProfile(f"profile parameter {item!r} is not key=value")
        params[key.strip()] = value.strip() if key.strip() == "l0" else _number(value)
    return make_profile(kind.strip().lower(), params, band_limit)


def _number(text: str):
    try:
        return float(text)
    except ValueError:
        raise InvalidProfile(f"profile parameter value {text!r} is not a number") from None


# ---------- per-spin data ----------

@dataclass(frozen=True)
class _CentreData:
    """Arrays over spins for a centred profile."""

    l: np.ndarray
    m0: np.ndarray
    d0: np.ndarray
    log_c: np.ndarray

    @property
    def log_weight(self) -> np.ndarray:
        # log of (2l+1) |c_l|^2
        return np.log(2.0 * self.l + 1.0) + 2.0 * self.log_c


def _centre_data(profile: CoefficientProfile, l_max=None) -> _CentreData:
    top = profile.band_limit if l_max is None else HalfInt.of(l_max)
    if top > profile.band_limit:
        raise InvalidProfile(f"l_max {top} exceeds band limit {profile.band_limit}")
    l = np.arange(top.twice_value + 1) / 2.0
    m0 = np.where(np.arange(l.size) % 2 == 0, 0.0, 0.5)
    d0 = l * (l + 1.0) - m0 * m0
    q = profile.params
    if profile.kind == "expfrac":
        log_c = -q["B"] * d0 ** (1.0 / (2.0 * q["s"]))
    elif profile.kind == "heat":
        log_c = -q["t"] * d0
    else:
        log_c = -q["p"] * np.log1p(l)
    return _CentreData(l, m0, d0, log_c)


def _log_pow(d: np.ndarray, p: float) -> np.ndarray:
    """``p * log d`` with ``0**0 = 1``."""
    if p == 0:
        return np.zeros_like(d)
    with np.errstate(divide="ignore"):
        return p * np.log(d)


def log_power_norms(profile: CoefficientProfile, powers: Sequence[float], l_max=None) -> np.ndarray:
    """``log ||L^p phi||`` for each ``p``, with ``L^p`` acting by row scaling."""
    powers = [float(p) for p in powers]
    if profile.centred:
        c = _centre_data(profile, l_max)
        lw = c.log_weight
        return np.array([0.5 * logsumexp(lw + 2.0 * _log_pow(c.d0, p)) for p in powers])
    logs, dvals = [], []
    for l in profile.spins(l_max):
        phi = profile.coefficient(l)
        rows = np.sum(np.abs(phi) ** 2, axis=1)
        keep = rows > 0
        if keep.any():
            logs.append(math.log(l.dim) + np.log(rows[keep]))
            dvals.append(su2.subl_diagonal(l)[keep])
    if not logs:
        return np.full(len(powers), -np.inf)
    lw = np.concatenate(logs)
    d = np.concatenate(dvals)
    return np.array([0.5 * logsumexp(lw + 2.0 * _log_pow(d, p)) for p in powers])


def plancherel_norm(profile: CoefficientProfile, l_max=None) -> float:
    """``sqrt(sum_{l <= l_max} (2l+1) ||phi(l)||_HS^2)``."""
    return float(np.exp(log_power_norms(profile, [0.0], l_max)[0]))


def seminorm_sequence(profile: CoefficientProfile, k_max: int, l_max=None) -> np.ndarray:
    """``log ||L^k phi||`` for ``k = 0 .. k_max`` (log space avoids overflow)."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return log_power_norms(profile, range(k_max + 1), l_max)


# ---------- word seminorms ----------

def _centre_word_norms(profile, alphabet, max_len, l_max) -> dict[tuple, float]:
    """Squared word seminorms for a centred profile.

    Walks words depth-first, prepending letters, so ``sigma_w e_{m0}`` is
    built from the previous suffix. Coordinates are offsets ``t`` from ``m0``.
    ``R2 = i (P + M)/2`` is applied without its factor ``i``; a unit phase does
    not change norms, so all arithmetic stays real.
    """
    c = _centre_data(profile, l_max)
    lw = c.log_weight
    shift = lw.max()
    w = np.exp(lw - shift)
    keep = w > 0
    lv, m0, w = c.l[keep], c.m0[keep], w[keep]
    width = 2 * max_len + 1
    t = np.arange(width) - max_len
    m = m0[:, None] + t[None, :]
    plus = su2.ladder_plus(lv[:, None], m)
    minus = su2.ladder_minus(lv[:, None], m)

    def lift(v):
        out = np.zeros_like(v)
        out[:, 1:] = plus[:, :-1] * v[:, :-1]
        return out

    def lower(v):
        out = np.zeros_like(v)
        out[:, :-1] = minus[:, 1:] * v[:, 1:]
        return out

    ops = {
        "P": lift,
        "M": lower,
        "R1": lambda v: 0.5 * (lift(v) - lower(v)),
        "R2": lambda v: 0.5 * (lift(v) + lower(v)),
    }
    out: dict[tuple, float] = {}
    scale = math.exp(shift)

    def visit(v, suffix):
        for a in alphabet:
            nv = ops[a](v)
            word = (a,) + suffix
            out[word] = float(np.dot(w, np.einsum("ij,ij->i", nv, nv))) * scale
            if len(word) < max_len:
                visit(nv, word)

    start = np.zeros((lv.size, width))
    start[:, max_len] = 1.0
    visit(start, ())
    return out


def _dense_word_norms(profile, alphabet, max_len, l_max) -> dict[tuple, float]:
    out: dict[tuple, float] = {}
    for l in profile.spins(l_max):
        phi = profile.coefficient(l)
        if not np.any(phi):
            continue
        mats = {a: su2.su2_symbol(a, l).array for a in alphabet}

        def visit(v, suffix):
            for a in alphabet:
                nv = mats[a] @ v
                word = (a,) + suffix
                out[word] = out.get(word, 0.0) + l.dim * float(np.sum(np.abs(nv) ** 2))
                if len(word) < max_len:
                    visit(nv, word)

        visit(phi, ())
    return out


def word_seminorms(profile: CoefficientProfile, alphabet: Sequence[str], max_len: int,
                   l_max=None, dense: bool = False) -> dict[GeneratorWord, float]:
    """``||sigma_w phi||`` for every word over ``alphabet`` with ``|w| <= max_len``,
    the empty word included.

    ``dense=True`` forces the per-spin matrix route (used as a cross-check).
    """
    alphabet = tuple(alphabet)
    if set(alphabet) - {"P", "M", "R1", "R2"} or not alphabet:
        raise ValueError(f"alphabet must be drawn from P, M, R1, R2; got {alphabet}")
    if not 0 <= max_len <= 8:
        raise ValueError("max_len must be in 0..8")
    if max_len == 0:
        sq = {}
    elif profile.centred and not dense:
        sq = _centre_word_norms(profile, alphabet, max_len, l_max)
    else:
        sq = _dense_word_norms(profile, alphabet, max_len, l_max)
    out = {GeneratorWord(SU2, ()): plancherel_norm(profile, l_max)}
    if max_len:
        out.update((w, math.sqrt(sq.get(w.letters, 0.0))) for w in enumerate_words(alphabet, max_len))
    return out


# ---------- fitting ----------

@dataclass(frozen=True)
class GevreyFit:
    s_hat: float
    log_A: float
    log_C: float
    residual: float
    n_points: int

    def to_dict(self) -> dict:
        return {"s_hat": self.s_hat, "log_A": self.log_A, "log_C": self.log_C,
                "residual": self.residual, "n_points": self.n_points}

    @classmethod
    def from_dict(cls, d: dict) -> "GevreyFit":
        return cls(**d)


def _ols(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(np.sqrt(np.mean(resid ** 2)))


def _check_logs(y: np.ndarray):
    if not np.all(np.isfinite(y)):
        raise DegenerateProfile("a seminorm vanishes; the growth fit is undefined")


def fit_order(log_seminorms: Sequence[float], k_min: int = 2) -> GevreyFit:
    """Fit ``log n_k = log C + 2k log A + s log (2k)!`` by least squares over ``k >= k_min``."""
    y_all = np.asarray(log_seminorms, dtype=float)
    k = np.arange(y_all.size)[k_min:]
    y = y_all[k_min:]
    if y.size < 4:
        raise ValueError(f"need at least 4 points with k >= {k_min}, got {y.size}")
    _check_logs(y)
    design = np.column_stack([np.ones_like(y), 2.0 * k, gammaln(2.0 * k + 1.0)])
    (log_C, log_A, s), res = _ols(design, y)
    return GevreyFit(float(s), float(log_A), float(log_C), res, int(y.size))


def max_log_norm_by_length(norms: Mapping[GeneratorWord, float]) -> dict[int, float]:
    best: dict[int, float] = {}
    for w, v in norms.items():
        best[len(w)] = max(best.get(len(w), 0.0), v)
    with np.errstate(divide="ignore"):
        return {j: float(np.log(v)) for j, v in sorted(best.items())}


def fit_word_order(norms: Mapping[GeneratorWord, float], j_min: int = 2) -> GevreyFit:
    """Fit ``log max_{|w|=j} ||sigma_w phi|| = log C + j log A + s log j!`` over ``j >= j_min``."""
    by_len = max_log_norm_by_length(norms)
    j = np.array([n for n in by_len if n >= j_min], dtype=float)
    y = np.array([by_len[int(n)] for n in j])
    if y.size < 4:
        raise ValueError(f"need at least 4 word lengths >= {j_min}, got {y.size}")
    _check_logs(y)
    design = np.column_stack([np.ones_like(y), j, gammaln(j + 1.0)])
    (log_C, log_A, s), res = _ols(design, y)
    return GevreyFit(float(s), float(log_A), float(log_C), res, int(y.size))


# ---------- Roumieu test and interpolation ----------

class RoumieuResult(NamedTuple):
    K: float
    passed: bool


def roumieu_log_sequence(profile: CoefficientProfile, B: float, s: float, l_max=None) -> tuple[np.ndarray, np.ndarray]:
    """Spins and ``log ||exp(B L^{1/(2s)}) phi(l)||_HS`` for each of them."""
    if B <= 0 or s <= 0:
        raise ValueError("B and s must be positive")
    a = 1.0 / (2.0 * s)
    if profile.centred:
        c = _centre_data(profile, l_max)
        return c.l, B * c.d0 ** a + c.log_c
    ls, vals = [], []
    for l in profile.spins(l_max):
        phi = profile.coefficient(l)
        rows = np.sum(np.abs(phi) ** 2, axis=1)
        with np.errstate(divide="ignore"):
            v = 0.5 * logsumexp(2.0 * B * su2.subl_diagonal(l) ** a + np.log(rows))
        ls.append(l.value)
        vals.append(v)
    return np.array(ls), np.array(vals)


def roumieu_decay_test(profile: CoefficientProfile, B: float, s: float, l_max=None) -> RoumieuResult:
    """``K = max_l ||exp(B L^{1/(2s)}) phi(l)||_HS`` and a finite-range boundedness proxy.

    ``passed`` holds when the per-spin sequence does not increase (relative
    tolerance 1e-12) over the top 20% of the spin range. Values beyond the
    float range give ``K = inf`` and a failure.
    """
    l, logk = roumieu_log_sequence(profile, B, s, l_max)
    top = logk.max()
    if top > np.log(np.finfo(float).max):
        return RoumieuResult(math.inf, False)
    tail = logk[l >= (1.0 - TAIL_FRACTION) * l[-1]]
    steady = bool(np.all(tail[1:] <= tail[:-1] + MONOTONE_RTOL))
    return RoumieuResult(float(np.exp(top)), steady)


def interpolation_check(profile: CoefficientProfile, a: int, theta: float, l_max=None) -> float:
    """``||L^{b/2} phi|| / (||L^{a/2} phi||^theta ||L^{(a+2)/2} phi||^(1-theta))``
    with ``b = a theta + (a+2)(1-theta)``; Hoelder gives a ratio <= 1."""
    if a not in (0, 2, 4):
        raise ValueError("a must be 0, 2 or 4")
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    b = a * theta + (a + 2) * (1 - theta)
    lo, hi, mid = log_power_norms(profile, [a / 2, (a + 2) / 2, b / 2], l_max)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise DegenerateProfile("interpolation needs nonzero seminorms")
    return float(np.exp(mid - theta * lo - (1 - theta) * hi))


# ---------- battery ----------

@dataclass(frozen=True)
class BatteryReport:
    """Outcome of the three Gevrey membership tests.

    ``fit_iii`` fits ``||L^k phi||``; ``fit_ii`` fits the largest word
    seminorm per length; ``roumieu`` lists ``(B, K, passed)`` per grid value.
    A fitted order is accepted when it is at most ``1.2 * s_claim``. The
    Roumieu pass is a finite-range proxy (tail non-increase), not a proof of
    uniform boundedness.
    """

    s_claim: float
    fit_iii: GevreyFit
    fit_ii: GevreyFit
    roumieu: list[tuple[float, float, bool]]
    iii_pass: bool
    ii_pass: bool
    iii_prime_pass: bool
    consistent: bool
    k_max: int
    max_len: int
    alphabet: tuple[str, ...]
    proxy: str = "roumieu tail non-increase over top 20% of spin range"

    @property
    def all_pass(self) -> bool:
        return self.ii_pass and self.iii_pass and self.iii_prime_pass

    def to_dict(self) -> dict:
        return {
            "s_claim": self.s_claim,
            "fit_iii": self.fit_iii.to_dict(),
            "fit_ii": self.fit_ii.to_dict(),
            "roumieu": [[B, K, p] for B, K, p in self.roumieu],
            "iii_pass": self.iii_pass,
            "ii_pass": self.ii_pass,
            "iii_prime_pass": self.iii_prime_pass,
            "consistent": self.consistent,
            "k_max": self.k_max,
            "max_len": self.max_len,
            "alphabet": list(self.alphabet),
            "proxy": self.proxy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BatteryReport":
        return cls(
            s_claim=d["s_claim"],
            fit_iii=GevreyFit.from_dict(d["fit_iii"]),
            fit_ii=GevreyFit.from_dict(d["fit_ii"]),
            roumieu=[(B, K, p) for B, K, p in d["roumieu"]],
            iii_pass=d["iii_pass"],
            ii_pass=d["ii_pass"],
            iii_prime_pass=d["iii_prime_pass"],
            consistent=d["consistent"],
            k_max=d["k_max"],
            max_len=d["max_len"],
            alphabet=tuple(d["alphabet"]),
            proxy=d["proxy"],
        )


def equivalence_battery(profile: CoefficientProfile, s_claim: float, k_max: int = 6,
                        max_len: int = 8, alphabet: Sequence[str] = ("R1", "R2"),
                        b_grid: Sequence[float] = ROUMIEU_B_GRID) -> BatteryReport:
    if s_claim <= 0:
        raise ValueError("s_claim must be positive")
    if profile.band_limit.value < 40:
        raise InvalidProfile("the battery needs a band limit >= 40")
    fit_iii = fit_order(seminorm_sequence(profile, k_max))
    fit_ii = fit_word_order(word_seminorms(profile, alphabet, max_len))
    roumieu = []
    for B in b_grid:
        r = roumieu_decay_test(profile, B, s_claim)
        roumieu.append((float(B), r.K, r.passed))
    cap = 1.2 * s_claim
    return BatteryReport(
        s_claim=float(s_claim),
        fit_iii=fit_iii,
        fit_ii=fit_ii,
        roumieu=roumieu,
        iii_pass=fit_iii.s_hat <= cap,
        ii_pass=fit_ii.s_hat <= cap,
        iii_prime_pass=any(p for _, _, p in roumieu),
        consistent=abs(fit_ii.s_hat - fit_iii.s_hat) <= 0.15 * s_claim and any(p for _, _, p in roumieu),
        k_max=k_max,
        max_len=max_len,
        alphabet=tuple(alphabet),
    )
