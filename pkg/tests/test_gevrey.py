import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from gevcalc import gevrey, riesz, su2
from gevcalc.algebra import SU2, GeneratorWord, HalfInt, half_integers, parse_word
from gevcalc.checks import random_profile
from gevcalc.errors import DegenerateProfile, InvalidProfile


def entrywise_norm(profile, power, l_max):
    """Plancherel norm of L^power phi by explicit loops over l, m, n."""
    total = 0.0
    for l in half_integers(0, l_max):
        phi = profile.coefficient(l)
        for i in range(l.dim):
            m = -l.value + i
            d = l.value * (l.value + 1) - m * m
            for j in range(l.dim):
                if phi[i, j] != 0:
                    total += (2 * l.value + 1) * abs(d ** power * phi[i, j]) ** 2
    return math.sqrt(total)


class TestProfiles:
    def test_delta(self):
        p = gevrey.make_profile("delta", {"l0": 1, "i": 0, "j": 0}, 10)
        expected = np.zeros((3, 3))
        expected[0, 0] = 1
        np.testing.assert_array_equal(p.coefficient(1), expected)
        assert not np.any(p.coefficient(2)) and not np.any(p.coefficient("1/2"))

    def test_expfrac_and_heat_entries(self):
        p = gevrey.make_profile("expfrac", {"B": 1, "s": 2}, 60)
        c = p.coefficient(7)
        assert c[7, 7] == pytest.approx(math.exp(-(56 ** 0.25)), rel=1e-14)
        assert np.count_nonzero(c) == 1
        h = gevrey.make_profile("heat", {"t": 1}, 40).coefficient("5/2")
        assert h[3, 3] == pytest.approx(math.exp(-(35 / 4 - 1 / 4)), rel=1e-14)

    def test_validation(self):
        with pytest.raises(InvalidProfile):
            gevrey.make_profile("expfrac", {"B": -1, "s": 2}, 10)
        with pytest.raises(InvalidProfile):
            gevrey.make_profile("heat", {"t": 1, "q": 2}, 10)
        with pytest.raises(InvalidProfile):
            gevrey.make_profile("delta", {"l0": 1, "i": 3, "j": 0}, 10)
        with pytest.raises(InvalidProfile):
            gevrey.make_profile("nope", {}, 10)
        with pytest.raises(InvalidProfile):
            gevrey.make_profile("heat", {"t": 1}, 0)

    def test_parse(self):
        p = gevrey.parse_profile("expfrac:B=1,s=2", 60)
        assert p.kind == "expfrac" and p.params == {"B": 1.0, "s": 2.0}
        d = gevrey.parse_profile("delta:l0=3/2,i=1,j=2", 5)
        assert d.params["l0"] == HalfInt(3)
        assert gevrey.CoefficientProfile.from_dict(d.to_dict()) == d

    def test_custom_pattern(self):
        pattern = lambda l: np.ones((l.dim, l.dim))
        p = gevrey.make_profile("polynomial", {"p": 2}, 4, pattern=pattern)
        assert not p.centred
        assert gevrey.plancherel_norm(p) == pytest.approx(entrywise_norm(p, 0, 4), rel=1e-12)


class TestNorms:
    def test_plancherel_examples(self):
        assert gevrey.plancherel_norm(gevrey.make_profile("delta", {"l0": 1, "i": 0, "j": 0}, 10)) == pytest.approx(math.sqrt(3))
        zero = gevrey.make_profile("explicit", {"coeffs": {}}, 3)
        assert gevrey.plancherel_norm(zero) == 0.0
        scaled = gevrey.make_profile("delta", {"l0": "1/2", "i": 0, "j": 0, "scale": 2}, 3)
        assert gevrey.plancherel_norm(scaled) == pytest.approx(2 * math.sqrt(2), rel=1e-15)

    def test_additivity(self):
        rng = np.random.default_rng(7)
        p = random_profile(rng, band=6)
        parts = sum(gevrey.plancherel_norm(p, l) ** 2 - (gevrey.plancherel_norm(p, HalfInt(l.twice_value - 1)) ** 2
                                                          if l.twice_value else 0)
                    for l in half_integers(0, 6))
        per_l = math.sqrt(sum(l.dim * np.sum(np.abs(p.coefficient(l)) ** 2) for l in half_integers(0, 6)))
        assert gevrey.plancherel_norm(p) == pytest.approx(per_l, rel=1e-12)
        assert math.sqrt(parts) == pytest.approx(per_l, rel=1e-12)

    def test_centre_row_powers(self):
        p = gevrey.make_profile("delta", {"l0": 1, "i": 1, "j": 1}, 10)
        seq = gevrey.seminorm_sequence(p, 6)
        np.testing.assert_allclose(np.exp(seq), math.sqrt(3) * 2.0 ** np.arange(7), rtol=1e-14)

    def test_heat_against_entrywise_oracle(self):
        p = gevrey.make_profile("heat", {"t": 1}, 40)
        seq = np.exp(gevrey.seminorm_sequence(p, 1))
        assert seq[0] == pytest.approx(gevrey.plancherel_norm(p), rel=1e-15)
        assert seq[1] == pytest.approx(entrywise_norm(p, 1, 40), rel=1e-12)

    @pytest.mark.parametrize("kind,params", [("expfrac", {"B": 1, "s": 2}), ("polynomial", {"p": 1.5}),
                                             ("heat", {"t": 0.1})])
    def test_fast_path_matches_dense(self, kind, params):
        p = gevrey.make_profile(kind, params, 12)
        dense = gevrey.make_profile(kind, params, 12, pattern=p._pattern)
        np.testing.assert_allclose(gevrey.seminorm_sequence(p, 5), gevrey.seminorm_sequence(dense, 5), rtol=1e-12)
        for alphabet in (("R1", "R2"), ("P", "M")):
            fast = gevrey.word_seminorms(p, alphabet, 5)
            slow = gevrey.word_seminorms(p, alphabet, 5, dense=True)
            assert fast.keys() == slow.keys()
            for w in fast:
                assert fast[w] == pytest.approx(slow[w], rel=1e-11)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_subl_power_matches_word_expansion(self, k):
        rng = np.random.default_rng(k)
        p = random_profile(rng, band=10)
        total = 0.0
        terms = riesz.expand_subl_power(k)
        for l in half_integers(0, 10):
            total += l.dim * np.sum(np.abs(riesz.evaluate_terms(terms, l) @ p.coefficient(l)) ** 2)
        assert math.exp(gevrey.seminorm_sequence(p, k)[k]) == pytest.approx(math.sqrt(total), rel=1e-10)


class TestWords:
    def test_examples(self):
        p = gevrey.make_profile("delta", {"l0": 1, "i": 1, "j": 1}, 10)
        norms = gevrey.word_seminorms(p, ("P", "M"), 1)
        assert norms[parse_word("P")] == pytest.approx(math.sqrt(3) * math.sqrt(2), rel=1e-15)
        assert norms[GeneratorWord(SU2)] == pytest.approx(math.sqrt(3), rel=1e-15)
        half = gevrey.make_profile("delta", {"l0": "1/2", "i": 0, "j": 0}, 3)
        assert gevrey.word_seminorms(half, ("R1", "R2"), 1)[parse_word("R1")] == pytest.approx(math.sqrt(2) / 2, rel=1e-15)

    def test_dense_words_match_symbols(self):
        rng = np.random.default_rng(3)
        p = random_profile(rng, band=4)
        norms = gevrey.word_seminorms(p, ("R1", "R2"), 3)
        w = parse_word("R1R2R2")
        direct = math.sqrt(sum(l.dim * np.sum(np.abs(su2.su2_word_symbol(w, l).array @ p.coefficient(l)) ** 2)
                               for l in half_integers(0, 4)))
        assert norms[w] == pytest.approx(direct, rel=1e-12)


class TestFits:
    def test_exact_models(self):
        k = np.arange(10)
        fit = gevrey.fit_order(gammaln(2 * k + 1))
        assert fit.s_hat == pytest.approx(1, abs=1e-10) and abs(fit.log_A) < 1e-9 and abs(fit.log_C) < 1e-8
        assert fit.residual < 1e-10
        fit = gevrey.fit_order(2 * k * math.log(3) + 2 * gammaln(2 * k + 1))
        assert fit.s_hat == pytest.approx(2, abs=1e-10) and fit.log_A == pytest.approx(math.log(3), abs=1e-9)

    @given(st.floats(0.3, 4), st.floats(-2, 2), st.floats(-5, 5))
    def test_planted_recovery(self, s, log_a, log_c):
        k = np.arange(12)
        fit = gevrey.fit_order(log_c + 2 * k * log_a + s * gammaln(2 * k + 1))
        assert fit.s_hat == pytest.approx(s, abs=1e-8)
        assert fit.log_A == pytest.approx(log_a, abs=1e-7)
        assert fit.log_C == pytest.approx(log_c, abs=1e-6)
        assert fit.residual < 1e-10

    def test_word_fit_planted(self):
        norms = {GeneratorWord(SU2, ("R1",) * j): math.exp(1.5 * gammaln(j + 1) + 0.3 * j)
                 for j in range(1, 9)}
        fit = gevrey.fit_word_order(norms)
        assert fit.s_hat == pytest.approx(1.5, abs=1e-10) and fit.residual < 1e-10

    def test_degenerate(self):
        with pytest.raises(DegenerateProfile):
            gevrey.fit_order([0, 0, -np.inf, 1, 2, 3])
        with pytest.raises(ValueError):
            gevrey.fit_order([0, 1, 2, 3, 4])

    def test_expfrac_band_60(self):
        p = gevrey.make_profile("expfrac", {"B": 1, "s": 1}, 60)
        assert gevrey.fit_order(gevrey.seminorm_sequence(p, 6)).s_hat == pytest.approx(1, abs=0.2)


class TestRoumieu:
    def test_heat_passes(self):
        r = gevrey.roumieu_decay_test(gevrey.make_profile("heat", {"t": 1}, 40), 0.5, 1)
        assert r.passed and math.isfinite(r.K)

    def test_polynomial_fails(self):
        p = gevrey.make_profile("polynomial", {"p": 4}, 200)
        assert not gevrey.roumieu_decay_test(p, 1, 1).passed

    def test_zero_profile(self):
        r = gevrey.roumieu_decay_test(gevrey.make_profile("explicit", {"coeffs": {}}, 5), 1, 1)
        assert r == (0.0, True)

    def test_overflow(self):
        r = gevrey.roumieu_decay_test(gevrey.make_profile("polynomial", {"p": 1}, 1000), 4, 0.5)
        assert r == (math.inf, False)

    def test_dense_agrees(self):
        p = gevrey.make_profile("heat", {"t": 0.2}, 20)
        dense = gevrey.make_profile("heat", {"t": 0.2}, 20, pattern=p._pattern)
        a, b = gevrey.roumieu_decay_test(p, 1, 1), gevrey.roumieu_decay_test(dense, 1, 1)
        assert a.passed == b.passed and a.K == pytest.approx(b.K, rel=1e-12)

    @pytest.mark.parametrize("kind,params,band", [("expfrac", {"B": 1, "s": 1.5}, 300), ("heat", {"t": 0.5}, 60),
                                                  ("polynomial", {"p": 4}, 3000)])
    def test_monotone_in_s(self, kind, params, band):
        p = gevrey.make_profile(kind, params, band)
        for B in gevrey.ROUMIEU_B_GRID:
            s_values = [0.5, 1, 1.5, 2, 3, 4]
            results = [gevrey.roumieu_decay_test(p, B, s).passed for s in s_values]
            first = results.index(True) if True in results else len(results)
            assert all(results[first:])


class TestInterpolation:
    def test_delta_equality(self):
        p = gevrey.make_profile("delta", {"l0": 3, "i": 2, "j": 5}, 4)
        for a in (0, 2, 4):
            assert gevrey.interpolation_check(p, a, 0.3) == pytest.approx(1, rel=1e-14)

    def test_examples(self):
        assert gevrey.interpolation_check(gevrey.make_profile("heat", {"t": 1}, 40), 2, 0.5) <= 1
        assert gevrey.interpolation_check(gevrey.make_profile("expfrac", {"B": 1, "s": 2}, 60), 0, 0.25) <= 1

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0, 2, 4]), st.floats(0.01, 0.99))
    def test_hoelder(self, seed, a, theta):
        p = random_profile(np.random.default_rng(seed))
        assert gevrey.interpolation_check(p, a, theta) <= 1 + 1e-12

    def test_zero_profile(self):
        with pytest.raises(DegenerateProfile):
            gevrey.interpolation_check(gevrey.make_profile("explicit", {"coeffs": {}}, 3), 2, 0.5)


class TestBattery:
    def test_heat(self):
        rep = gevrey.equivalence_battery(gevrey.make_profile("heat", {"t": 1}, 40), 1)
        assert rep.all_pass

    def test_round_trip(self):
        rep = gevrey.equivalence_battery(gevrey.make_profile("expfrac", {"B": 1, "s": 1}, 60), 1)
        assert rep.all_pass and rep.consistent
        assert gevrey.BatteryReport.from_dict(rep.to_dict()) == rep

    def test_small_band_rejected(self):
        with pytest.raises(InvalidProfile):
            gevrey.equivalence_battery(gevrey.make_profile("heat", {"t": 1}, 20), 1)
