import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gevcalc.algebra import (HEIS, SU2, ComplexMatrix, GeneratorWord, HalfInt, enumerate_words,
                             half_integers, log_factorial_power, op_norm, diag_band_norm, parse_word)
from gevcalc.errors import InvalidAlphabet, InvalidMatrix, NotSingleDiagonal, WrongGroup


class TestHalfInt:
    def test_coercion(self):
        assert HalfInt.of("3/2") == HalfInt(3)
        assert HalfInt.of(0.5) == HalfInt(1)
        assert HalfInt.of(2) == HalfInt(4)
        assert HalfInt.of(HalfInt(7)).dim == 8

    def test_rejects_non_half_integers(self):
        with pytest.raises(ValueError):
            HalfInt.of(0.25)
        with pytest.raises(ValueError):
            HalfInt.of(-1)

    def test_weights_and_str(self):
        l = HalfInt.of("3/2")
        np.testing.assert_array_equal(l.ms(), [-1.5, -0.5, 0.5, 1.5])
        assert str(l) == "3/2" and str(HalfInt.of(4)) == "4"

    def test_range(self):
        assert [str(l) for l in half_integers(0, 1)] == ["0", "1/2", "1"]


class TestWords:
    def test_parse(self):
        w = parse_word("ZZbZ")
        assert w.alphabet == HEIS and w.letters == ("Z", "Zb", "Z")
        assert parse_word("R1R2P").letters == ("R1", "R2", "P")

    def test_parse_rejects_mixed_or_wrong_group(self):
        with pytest.raises(InvalidAlphabet):
            parse_word("PZ")
        with pytest.raises(WrongGroup):
            parse_word("PM", group=HEIS)

    def test_letter_validation(self):
        with pytest.raises(InvalidAlphabet):
            GeneratorWord(SU2, ("Z",))

    def test_round_trip(self):
        w = parse_word("PMMP")
        assert GeneratorWord.from_dict(w.to_dict()) == w

    def test_enumerate_examples(self):
        assert [str(w) for w in enumerate_words(("P", "M"), 1)] == ["P", "M"]
        assert [str(w) for w in enumerate_words(("P", "M"), 2)] == ["P", "M", "PP", "PM", "MP", "MM"]
        assert len(enumerate_words(("Z", "Zb"), 5)) == 62

    def test_enumerate_empty_alphabet(self):
        with pytest.raises(InvalidAlphabet):
            enumerate_words((), 3)

    @given(st.integers(1, 6), st.sampled_from([("P", "M"), ("R1", "R2"), ("X", "Y", "Z"), ("P",)]))
    def test_enumerate_cardinality(self, n, alphabet):
        words = enumerate_words(alphabet, n)
        assert len(words) == len(set(words)) == sum(len(alphabet) ** j for j in range(1, n + 1))


class TestNorms:
    def test_op_norm_examples(self):
        assert op_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-15)
        assert op_norm(np.array([[0, 1], [-1, 0]]) / 2) == pytest.approx(0.5, abs=1e-15)
        assert op_norm(np.array([[0, 0], [-1, 0]])) == pytest.approx(1.0, abs=1e-15)

    def test_op_norm_rejects_nan(self):
        with pytest.raises(InvalidMatrix):
            op_norm(np.array([[np.nan]]))

    def test_band_norm_examples(self):
        m = ComplexMatrix.from_band(4, 4, 1, [-1, 3j, 0.5])
        assert diag_band_norm(m) == 3.0
        assert diag_band_norm(ComplexMatrix.from_band(3, 3, 1, [0, 0])) == 0.0

    def test_band_norm_needs_tag(self):
        with pytest.raises(NotSingleDiagonal):
            diag_band_norm(ComplexMatrix(np.ones((2, 2))))

    def test_tag_is_checked(self):
        with pytest.raises(NotSingleDiagonal):
            ComplexMatrix(np.ones((2, 2)), band_offset=0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 200), st.integers(1, 200), st.data())
    def test_band_norm_matches_svd(self, rows, cols, data):
        offset = data.draw(st.integers(-cols + 1, rows - 1))
        seed = data.draw(st.integers(0, 2 ** 32 - 1))
        rng = np.random.default_rng(seed)
        a = np.zeros((rows, cols), dtype=complex)
        for i in range(rows):
            if 0 <= i - offset < cols:
                a[i, i - offset] = complex(*rng.normal(size=2))
        m = ComplexMatrix(a, band_offset=offset)
        assert abs(diag_band_norm(m) - np.linalg.svd(a, compute_uv=False).max()) <= 1e-12


class TestBandAlgebra:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 12), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 1000))
    def test_band_product_matches_dense(self, n, a, b, seed):
        rng = np.random.default_rng(seed)

        def rand(offset):
            start, stop = max(0, offset), max(max(0, offset), min(n, n + offset))
            return ComplexMatrix.from_band(n, n, offset, rng.normal(size=stop - start) + 0j)

        x, y = rand(a), rand(b)
        prod = x @ y
        np.testing.assert_allclose(prod.array, x.array @ y.array, atol=1e-14)
        assert prod.band_offset == a + b

    def test_mixed_and_transpose(self):
        p = ComplexMatrix.from_band(3, 3, 1, [1, 2])
        d = ComplexMatrix(np.arange(9).reshape(3, 3))
        np.testing.assert_allclose((p @ d).array, p.array @ d.array)
        np.testing.assert_allclose(p.T.array, p.array.T)
        np.testing.assert_allclose((p + p.T).array, p.array + p.array.T)
        assert p.T.band_offset == -1

    def test_detect(self):
        assert ComplexMatrix.detect(np.diag([1, 2], -1)).band_offset == 1
        assert ComplexMatrix.detect(np.ones((2, 2))).band_offset is None


class TestLogFactorial:
    def test_examples(self):
        assert log_factorial_power(0, 3) == 0.0
        assert log_factorial_power(4, 1) == pytest.approx(math.log(24), rel=1e-14)
        assert log_factorial_power(6, 2) == pytest.approx(2 * math.log(720), rel=1e-14)

    def test_multi_index_inequalities(self):
        lf = lambda k: log_factorial_power(k, 1)
        for n in range(1, 5):
            for alpha in itertools.product(range(5), repeat=n):
                size = sum(alpha)
                if size > 12:
                    continue
                a_fact = sum(lf(a) for a in alpha)
                assert a_fact <= lf(size) + 1e-12
                assert lf(size) <= size * math.log(n) + a_fact + 1e-12
        for b in range(13):
            for c in range(13):
                assert lf(b + c) <= (b + c) * math.log(2) + lf(b) + lf(c) + 1e-12
