"""Invariant suite behind ``gevcalc check-all``.

Each check returns a :class:`CheckResult`; a check's ``detail`` names the
worst offender so failures are diagnosable from the one-line summary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gevrey, heisenberg, multiplier, riesz, su2
from .algebra import HEIS, SU2, ComplexMatrix, HalfInt, enumerate_words, half_integers, op_norm
from .heisenberg import HeisRep

SEED = 20240607


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def order_one_riesz() -> CheckResult:
    worst = 0.0
    for op in ("SubL", "Beltrami"):
        ctx = riesz.RieszContext(SU2, op)
        for w in enumerate_words(("R1", "R2"), 1):
            for l in half_integers(0.5, 100):
                worst = max(worst, op_norm(riesz.riesz_symbol(ctx, w, l)))
    return CheckResult("order-1 Riesz bound", worst <= 1 + 1e-12, f"max norm {worst:.15g}")


def su2_uniform_bound(l_max=50) -> CheckResult:
    ctx = riesz.RieszContext(SU2)
    ls = half_integers(0.5, l_max)
    bad = []
    for w in enumerate_words(("P", "M"), 5):
        r = riesz.riesz_sweep(ctx, w, ls)
        if abs(r.growth_slope) > 0.05 or abs(r.stabilization_ratio - 1) > 1e-3:
            bad.append((abs(r.stabilization_ratio - 1), str(w), r.growth_slope))
    p = riesz.riesz_sweep(ctx, enumerate_words(("P",), 1)[0], ls)
    p_const = max(abs(v - math.sqrt(2)) for _, v in p.samples) <= 1e-12
    detail = f"{len(bad)}/62 words outside tolerance"
    if bad:
        dev, w, slope = max(bad)
        detail += f"; worst {w} (|ratio-1| = {dev:.3g}, slope {slope:.3g})"
    detail += f"; [P] constant sqrt2: {p_const}"
    return CheckResult("SU(2) uniform Riesz bound", not bad and p_const, detail)


def factor_scaling(max_len=5) -> CheckResult:
    ls = half_integers(5, 50)
    bad = []
    for w in enumerate_words(("P", "M"), max_len):
        if len(w) < 2:
            continue
        f = riesz.factor_slopes(w, ls)
        for s in f["t2"]:
            if abs(s - 1) > 0.1:
                bad.append((abs(s - 1), f"{w} type-2 slope {s:.3f}"))
        target = 2 - len(w)
        if abs(f["t3"] - target) > 0.1:
            bad.append((abs(f["t3"] - target), f"{w} type-3 slope {f['t3']:.3f} vs {target}"))
    detail = f"{len(bad)} factor slopes off" + (f"; worst {max(bad)[1]}" if bad else "")
    return CheckResult("factor scaling", not bad, detail)


def beltrami_words(l_max=50) -> CheckResult:
    ctx = riesz.RieszContext(SU2, "Beltrami")
    worst, arg = 0.0, ""
    for w in enumerate_words(("R1", "R2"), 4):
        for l in half_integers(0.5, l_max):
            v = op_norm(riesz.riesz_symbol(ctx, w, l))
            if v > worst:
                worst, arg = v, f"{w} at l={l}"
    return CheckResult("Beltrami Riesz words", worst <= 1 + 1e-12, f"max norm {worst:.15g} ({arg})")


def heisenberg_bound(trunc=2048) -> CheckResult:
    base = riesz.RieszContext(HEIS, heis_rep=HeisRep(1.0, trunc))
    over = []
    lam_gap = 0.0
    z_exact = None
    for w in enumerate_words(("Z", "Zb"), 6):
        sup = riesz.riesz_symbol(base, w).matrix.max_abs()
        if str(w) == "Z":
            z_exact = sup
        if sup > 2.0 ** len(w):
            over.append((sup / 2.0 ** len(w), str(w), sup))
        for lam in (0.25, 4.0):
            other = riesz.riesz_symbol(base, w, HeisRep(lam, trunc)).matrix.max_abs()
            lam_gap = max(lam_gap, abs(other - sup))
    ok_z = z_exact == math.sqrt(2)
    detail = f"{len(over)} words exceed 2^|w|"
    if over:
        ratio, w, sup = max(over)
        detail += f" (worst {w}: {sup:.6g})"
    detail += f"; [Z] sup {z_exact!r}; lambda gap {lam_gap:.3g}"
    return CheckResult("Heisenberg Riesz bound", not over and ok_z and lam_gap <= 1e-12, detail)


def operator_identities() -> CheckResult:
    errs = []
    for lam in (1.0, -2.5, 0.25):
        rep = HeisRep(lam, 256)
        s = {g: heisenberg.heis_symbol(g, rep).array for g in ("X", "Y", "Z", "Zb", "T", "SubL")}
        tol = 1e-12 * abs(lam) * rep.trunc
        top = rep.trunc - 2  # rows not touched by the truncation edge
        e1 = -(s["X"] @ s["X"] + s["Y"] @ s["Y"]) - s["SubL"]
        e2 = 0.5j * (s["Z"] @ s["Zb"] - s["Zb"] @ s["Z"]) - s["T"]
        e3 = -0.5 * (s["Z"] @ s["Zb"] + s["Zb"] @ s["Z"]) - s["SubL"]
        errs.append(max(np.abs(e[: top + 1]).max() for e in (e1, e2, e3)) / tol)
    for l in half_integers(0.5, 50):
        s = {g: su2.su2_symbol(g, l).array for g in ("P", "M", "R1", "R2", "R3", "SubL")}
        e1 = 0.5 * (s["P"] @ s["M"] + s["M"] @ s["P"]) - s["SubL"]
        e2 = -(s["R1"] @ s["R1"] + s["R2"] @ s["R2"]) - s["SubL"]
        e3 = -(s["R1"] @ s["R1"] + s["R2"] @ s["R2"] + s["R3"] @ s["R3"]) - l.value * (l.value + 1) * np.eye(l.dim)
        errs.append(max(np.abs(e).max() for e in (e1, e2, e3)) / 1e-12)
        # the bracket cancels entries of size l^2, so it gets a relative tolerance
        e4 = s["R1"] @ s["R2"] - s["R2"] @ s["R1"] - s["R3"]
        errs.append(np.abs(e4).max() / (1e-12 * (1 + l.value * (l.value + 1))))
    worst = max(errs)
    return CheckResult("exact operator identities", worst <= 1, f"worst error / tolerance {worst:.3g}")


def lemma_single_diagonal(n=100) -> CheckResult:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(n):
        rows, cols = rng.integers(1, 40, size=2)
        offset = int(rng.integers(-cols + 1, rows))
        m = _random_band(rng, int(rows), int(cols), offset)
        worst = max(worst, abs(op_norm(m.array) - m.max_abs()))
    return CheckResult("single-diagonal norm", worst <= 1e-12, f"max |op - max entry| {worst:.3g}")


def _random_band(rng, rows, cols, offset) -> ComplexMatrix:
    a = np.zeros((rows, cols), dtype=complex)
    idx = [(i, i - offset) for i in range(rows) if 0 <= i - offset < cols]
    for i, j in idx:
        a[i, j] = complex(rng.normal(), rng.normal())
    return ComplexMatrix(a, band_offset=offset)


def power_exp_and_interpolation() -> CheckResult:
    rng = np.random.default_rng(SEED + 1)
    worst_sup = 0.0
    for _ in range(50):
        k, D, s = rng.uniform(0.1, 5), rng.uniform(0.2, 5), rng.uniform(0.25, 3)
        _, sup = multiplier.power_exp_sup(k, D, s)
        _, vals = multiplier.power_exp_grid(k, D, s)
        worst_sup = max(worst_sup, (vals.max() - sup) / sup)
    worst_ratio = 0.0
    for _ in range(100):
        worst_ratio = max(worst_ratio, gevrey.interpolation_check(
            random_profile(rng), int(rng.choice([0, 2, 4])), float(rng.uniform(0.01, 0.99))))
    delta = gevrey.make_profile("delta", {"l0": 2, "i": 1, "j": 3}, 4)
    delta_gap = max(abs(gevrey.interpolation_check(delta, a, th) - 1)
                    for a in (0, 2, 4) for th in (0.1, 0.5, 0.9))
    ok = worst_sup <= 1e-10 and worst_ratio <= 1 + 1e-12 and delta_gap <= 1e-14
    return CheckResult("power-exp sup and interpolation", ok,
                       f"grid excess {worst_sup:.3g}; max ratio {worst_ratio:.15g}; delta gap {delta_gap:.3g}")


def random_profile(rng, band=5) -> gevrey.CoefficientProfile:
    """Random complex coefficients on a random subset of spins ``1/2 .. band``."""
    coeffs = {}
    for l in half_integers(0.5, band):
        if rng.random() < 0.6:
            coeffs[l] = rng.normal(size=(l.dim, l.dim)) + 1j * rng.normal(size=(l.dim, l.dim))
    if not coeffs:
        l = HalfInt.of(1)
        coeffs[l] = rng.normal(size=(3, 3)) + 0j
    return gevrey.make_profile("explicit", {"coeffs": coeffs}, band)


def bessel_series() -> CheckResult:
    two = multiplier.bessel_tail_diagnostics(2, 50, 400)
    one = multiplier.bessel_tail_diagnostics(1, 50, 400)
    conv = two["relative_tail_increment"] < 1e-6
    div = one["half_to_full_increment"] > 0.05 and one["term_slope"] >= -1.1
    return CheckResult("Bessel series threshold", conv and div,
                       f"N=2 relative tail {two['relative_tail_increment']:.3g}; "
                       f"N=1 increment {one['half_to_full_increment']:.4g}, slope {one['term_slope']:.4f}")


BATTERY_BANDS = {1: 60, 2: 2000, 3: 100000}


def gevrey_battery() -> CheckResult:
    notes, ok = [], True
    for s0, band in BATTERY_BANDS.items():
        rep = gevrey.equivalence_battery(gevrey.make_profile("expfrac", {"B": 1, "s": s0}, band), s0)
        good = (abs(rep.fit_iii.s_hat - s0) <= 0.2 * s0 and abs(rep.fit_ii.s_hat - s0) <= 0.2 * s0
                and rep.iii_prime_pass)
        ok &= good
        notes.append(f"s0={s0}: {rep.fit_iii.s_hat:.3f}/{rep.fit_ii.s_hat:.3f}")
    poly = gevrey.make_profile("polynomial", {"p": 4}, 100000)
    poly_fails = not any(gevrey.roumieu_decay_test(poly, B, 2).passed for B in gevrey.ROUMIEU_B_GRID)
    notes.append(f"polynomial rejected on whole grid: {poly_fails}")
    return CheckResult("Gevrey equivalence battery", ok and poly_fails, "; ".join(notes))


def subl_expansion() -> CheckResult:
    worst = 0.0
    d = su2.subl_diagonal(3)
    for k in (1, 2, 3):
        worst = max(worst, np.abs(riesz.evaluate_terms(riesz.expand_subl_power(k), 3) - np.diag(d ** k)).max())
    h2 = riesz.multinomial_residual(2, 2)
    h3 = riesz.multinomial_residual(3, 2)
    ok = worst <= 1e-12 and h2 <= 1e-12 and h3 > 1e-6
    return CheckResult("sub-Laplacian power expansion", ok,
                       f"expansion error {worst:.3g}; symmetrized residual h=2 {h2:.3g}, h=3 {h3:.4g}")


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "order1": order_one_riesz,
    "su2-bound": su2_uniform_bound,
    "factors": factor_scaling,
    "beltrami": beltrami_words,
    "heisenberg": heisenberg_bound,
    "identities": operator_identities,
    "single-diagonal": lemma_single_diagonal,
    "interpolation": power_exp_and_interpolation,
    "bessel": bessel_series,
    "battery": gevrey_battery,
    "expansion": subl_expansion,
}


def run_all(names=None) -> list[CheckResult]:
    return [CHECKS[n]() for n in (names or CHECKS)]
