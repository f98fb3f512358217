"""Command-line front end.

Exit codes: 0 success, 2 invalid input (the message names the flag),
1 numerical failure or a failing ``check-all``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile

from . import __version__, checks, gevrey, multiplier, riesz
from .algebra import HEIS, SU2, HalfInt, half_integers, parse_word
from .errors import GevcalcError
from .heisenberg import HeisRep

GRAMMAR = """\
words:    letter strings over one group, e.g. PMPM, R1R2, ZZb (Zb is one token)
profiles: kind:key=value,...  with kinds
            expfrac:B=<>0>,s=<>0>     heat:t=<>0>     polynomial:p=<>0>
            delta:l0=<spin>,i=<row>,j=<col>[,scale=<x>]
env:      GEVCALC_THREADS caps sweep parallelism (positive integer)
"""


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _convert(flag, fn, value):
    try:
        return fn(value)
    except (GevcalcError, ValueError, TypeError) as exc:
        raise UsageError(flag, str(exc)) from None


def _spin(text):
    l = HalfInt.of(text)
    if l.twice_value < 0:
        raise ValueError("spin must be >= 0")
    return l


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise ValueError("must be a positive integer")
    return n


def _positive_float(text):
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise ValueError("must be a positive finite number")
    return x


def _finite_float(text):
    x = float(text)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _word_for(group):
    return lambda text: parse_word(text, group)


def _alphabet(text):
    letters = {"R1R2": ("R1", "R2"), "PM": ("P", "M")}
    if text not in letters:
        raise ValueError("must be R1R2 or PM")
    return letters[text]


# ---------- commands ----------

def _cmd_su2_riesz(a):
    word = _convert("--word", _word_for(SU2), a.word)
    l_min = _convert("--l-min", _spin, a.l_min)
    l_max = _convert("--l-max", _spin, a.l_max)
    if l_min.twice_value == 0:
        raise UsageError("--l-min", "l = 0 is excluded (trivial representation)")
    if l_max < l_min:
        raise UsageError("--l-max", "must be >= --l-min")
    ctx = riesz.RieszContext(SU2, "Beltrami" if a.operator == "beltrami" else "SubL")
    params = {"word": str(word), "l_min": str(l_min), "l_max": str(l_max), "operator": ctx.operator}
    return "sweep", riesz.riesz_sweep(ctx, word, half_integers(l_min, l_max)), params


def _cmd_heis_riesz(a):
    word = _convert("--word", _word_for(HEIS), a.word)
    lam = _convert("--lambda", _finite_float, a.lam)
    if lam == 0:
        raise UsageError("--lambda", "must be nonzero")
    trunc = _convert("--trunc", _positive_int, a.trunc)
    rep = _convert("--trunc", lambda n: HeisRep(lam, n), trunc)
    if 2 * len(word) >= trunc:
        raise UsageError("--trunc", f"need 2*|word| < trunc, got |word| = {len(word)}")
    ctx = riesz.RieszContext(HEIS, heis_rep=rep)
    top = trunc - 1 - len(word)
    params = {"word": str(word), "lambda": lam, "trunc": trunc}
    return "sweep", riesz.riesz_sweep(ctx, word, riesz.default_cutoffs(top)), params


def _cmd_factor_bounds(a):
    word = _convert("--word", _word_for(SU2), a.word)
    if set(word) - {"P", "M"}:
        raise UsageError("--word", "factor bounds need a word over P and M")
    if len(word) < 2:
        raise UsageError("--word", "need at least two letters")
    l_min = _convert("--l-min", _spin, a.l_min)
    l_max = _convert("--l-max", _spin, a.l_max)
    if l_min.twice_value == 0:
        raise UsageError("--l-min", "must be >= 1/2")
    if l_max < l_min:
        raise UsageError("--l-max", "must be >= --l-min")
    ls = half_integers(l_min, l_max)
    rows = []
    for l in ls:
        f = riesz.factor_decomposition(word, l)
        rows.append({"l": l.value, "t1": f.t1, "t2": list(f.t2), "t3": f.t3})
    report = {"word": str(word), "rows": rows, "slopes": riesz.factor_slopes(word, ls) if len(ls) > 1 else None}
    return "dict", report, {"word": str(word), "l_min": str(l_min), "l_max": str(l_max)}


def _profile(a):
    band = _convert("--band", _spin, a.band)
    return _convert("--profile", lambda t: gevrey.parse_profile(t, band), a.profile)


def _cmd_gevrey_fit(a):
    profile = _profile(a)
    k_max = _convert("--k-max", _positive_int, a.k_max)
    max_len = _convert("--max-len", _positive_int, a.max_len)
    alphabet = _convert("--alphabet", _alphabet, a.alphabet)
    if a.method == "lk":
        if k_max < 5:
            raise UsageError("--k-max", "need k-max >= 5 (four fitted points with k >= 2)")
        fit = gevrey.fit_order(gevrey.seminorm_sequence(profile, k_max))
    else:
        if not 5 <= max_len <= 8:
            raise UsageError("--max-len", "must be in 5..8")
        fit = gevrey.fit_word_order(gevrey.word_seminorms(profile, alphabet, max_len))
    params = {"profile": profile.to_dict(), "method": a.method, "k_max": k_max,
              "max_len": max_len, "alphabet": "".join(alphabet)}
    return "fit", fit, params


def _cmd_gevrey_battery(a):
    profile = _profile(a)
    if profile.band_limit.value < 40:
        raise UsageError("--band", "the battery needs band >= 40")
    s_claim = _convert("--s-claim", _positive_float, a.s_claim)
    k_max = _convert("--k-max", _positive_int, a.k_max)
    if k_max < 5:
        raise UsageError("--k-max", "need k-max >= 5")
    max_len = _convert("--max-len", _positive_int, a.max_len)
    if not 5 <= max_len <= 8:
        raise UsageError("--max-len", "must be in 5..8")
    report = gevrey.equivalence_battery(profile, s_claim, k_max=k_max, max_len=max_len)
    params = {"profile": profile.to_dict(), "s_claim": s_claim, "k_max": k_max, "max_len": max_len}
    return "battery", report, params


def _cmd_multiplier_sup(a):
    k = _convert("--k", float, a.k)
    if not (math.isfinite(k) and k >= 0):
        raise UsageError("--k", "must be >= 0")
    D = _convert("--D", _positive_float, a.D)
    s = _convert("--s", _positive_float, a.s)
    lam_star, sup = multiplier.power_exp_sup(k, D, s)
    _, vals = multiplier.power_exp_grid(k, D, s)
    report = {"lam_star": lam_star, "sup_value": sup, "grid_max": float(vals.max()),
              "dominates_grid": bool(vals.max() <= sup * (1 + 1e-10))}
    return "dict", report, {"k": k, "D": D, "s": s}


def _cmd_bessel_series(a):
    N = _convert("--N", _positive_int, a.N)
    l_cut = _convert("--l-cut", _spin, a.l_cut)
    l_max = _convert("--l-max", _spin, a.l_max)
    if l_max.value < 1:
        raise UsageError("--l-max", "must be >= 1")
    if not l_cut < l_max:
        raise UsageError("--l-cut", "must be below --l-max")
    params = {"N": N, "l_cut": str(l_cut), "l_max": str(l_max)}
    if a.format == "csv":
        return "series", multiplier.bessel_hs_partial_sums(N, l_max), params
    return "dict", multiplier.bessel_tail_diagnostics(N, l_cut.value, l_max.value), params


COMMANDS = {
    "su2-riesz": _cmd_su2_riesz,
    "heis-riesz": _cmd_heis_riesz,
    "factor-bounds": _cmd_factor_bounds,
    "gevrey-fit": _cmd_gevrey_fit,
    "gevrey-battery": _cmd_gevrey_battery,
    "multiplier-sup": _cmd_multiplier_sup,
    "bessel-series": _cmd_bessel_series,
}


# ---------- output ----------

def _g(x) -> str:
    return format(float(x), ".17g")


def render(kind: str, report, params: dict, command: str, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        if kind == "sweep":
            index = "l" if report.group == SU2 else "k"
            buf.write(f"{index},norm\n")
            for i, v in report.samples:
                buf.write(f"{_g(i)},{_g(v)}\n")
            buf.write(f"sup,{_g(report.sup_norm)}\n")
            buf.write(f"slope,{_g(report.growth_slope)}\n")
            buf.write(f"stab_ratio,{_g(report.stabilization_ratio)}\n")
        elif kind == "series":
            buf.write("l,partial_sum\n")
            for l, v in report:
                buf.write(f"{_g(l)},{_g(v)}\n")
        else:
            raise ValueError(f"{command} has no CSV form")
        return buf.getvalue()
    data = report if isinstance(report, dict) else report.to_dict()
    meta = {"command": command, "parameters": params, "version": __version__}
    return json.dumps({"report": data, "metadata": meta}, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary sibling and rename, so no partial file survives a failure."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gevcalc-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------- parser ----------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gevcalc", description="Riesz transform and Gevrey class calculator.",
        epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"gevcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, fmt="json", formats=("csv", "json")):
        p = sub.add_parser(name, help=help_, epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--output", "-o", help="report path (default: standard output)")
        p.add_argument("--format", choices=formats, default=fmt)
        return p

    p = add("su2-riesz", "norm sweep of an SU(2) Riesz symbol over spins", fmt="csv")
    p.add_argument("--word", required=True)
    p.add_argument("--l-min", default="1/2")
    p.add_argument("--l-max", default="50")
    p.add_argument("--operator", choices=("subl", "beltrami"), default="subl")

    p = add("heis-riesz", "row cut-off sweep of a Heisenberg Riesz symbol")
    p.add_argument("--word", required=True)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--trunc", default="1024")

    p = add("factor-bounds", "telescoped factor norms of a word over P, M", formats=("json",))
    p.add_argument("--word", required=True)
    p.add_argument("--l-min", default="5")
    p.add_argument("--l-max", default="50")

    p = add("gevrey-fit", "Gevrey order fit for a coefficient profile", formats=("json",))
    p.add_argument("--profile", required=True)
    p.add_argument("--band", required=True)
    p.add_argument("--method", choices=("lk", "words"), default="lk")
    p.add_argument("--k-max", default="6")
    p.add_argument("--max-len", default="8")
    p.add_argument("--alphabet", default="R1R2")

    p = add("gevrey-battery", "Gevrey membership battery for a profile", formats=("json",))
    p.add_argument("--profile", required=True)
    p.add_argument("--band", required=True)
    p.add_argument("--s-claim", required=True)
    p.add_argument("--k-max", default="6")
    p.add_argument("--max-len", default="8")

    p = add("multiplier-sup", "sup of lam^k exp(-D lam^(1/(2s)))", formats=("json",))
    p.add_argument("--k", required=True)
    p.add_argument("--D", required=True)
    p.add_argument("--s", required=True)

    p = add("bessel-series", "Hilbert-Schmidt series of (I + L)^-N")
    p.add_argument("--N", required=True)
    p.add_argument("--l-cut", default="50")
    p.add_argument("--l-max", default="400")

    p = sub.add_parser("check-all", help="run the invariant suite")
    p.add_argument("--only", nargs="+", choices=sorted(checks.CHECKS), help="run a subset")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        riesz.sweep_threads()
    except ValueError as exc:
        print(f"gevcalc: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "check-all":
        results = checks.run_all(args.only)
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else 1
    try:
        kind, report, params = COMMANDS[args.command](args)
        text = render(kind, report, params, args.command, args.format)
    except UsageError as exc:
        print(f"gevcalc: error: {exc}", file=sys.stderr)
        return 2
    except (GevcalcError, ArithmeticError, ValueError, OverflowError, MemoryError) as exc:
        print(f"gevcalc: numerical failure: {exc}", file=sys.stderr)
        return 1
    if args.output:
        try:
            write_atomic(args.output, text)
        except OSError as exc:
            print(f"gevcalc: error: --output: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
