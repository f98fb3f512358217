import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gevcalc import su2
from gevcalc.algebra import GeneratorWord, HalfInt, SU2, half_integers, parse_word
from gevcalc.errors import TrivialRepresentation, WrongGroup
from gevcalc.multiplier import FracPower, Heat, Power

spins = st.integers(0, 100).map(HalfInt)


def ladder_oracle(l):
    """J+ from the textbook formula sqrt(l(l+1) - m(m+1)), with the minus sign convention."""
    n = l.dim
    a = np.zeros((n, n))
    for i in range(n - 1):
        m = -l.value + i
        a[i + 1, i] = -math.sqrt(l.value * (l.value + 1) - m * (m + 1))
    return a


def test_examples():
    np.testing.assert_array_equal(su2.su2_symbol("P", "1/2").array, [[0, 0], [-1, 0]])
    np.testing.assert_array_equal(su2.su2_symbol("SubL", 1).array, np.diag([1, 2, 1]))
    np.testing.assert_array_equal(su2.su2_symbol("P", 0).array, [[0]])
    np.testing.assert_array_equal(su2.su2_symbol("Beltrami", 1).array, 2 * np.eye(3))


def test_p_is_lower_band():
    assert su2.su2_symbol("P", 3).band_offset == 1
    assert su2.su2_symbol("M", 3).band_offset == -1


@given(spins)
def test_ladder_matches_textbook(l):
    np.testing.assert_allclose(su2.su2_symbol("P", l).array, ladder_oracle(l), atol=1e-12)


def test_word_examples():
    np.testing.assert_array_equal(su2.su2_word_symbol(GeneratorWord(SU2), 1).array, np.eye(3))
    np.testing.assert_array_equal(su2.su2_word_symbol(parse_word("PM"), "1/2").array, [[0, 0], [0, 1]])
    with pytest.raises(WrongGroup):
        su2.su2_word_symbol(parse_word("ZZb"), 1)
    with pytest.raises(WrongGroup):
        su2.su2_symbol("Z", 1)


def test_multiplier_examples():
    np.testing.assert_allclose(su2.su2_multiplier_symbol(Power(1), "SubL", 1).array, np.diag([1, 2, 1]))
    np.testing.assert_allclose(su2.su2_multiplier_symbol(FracPower(-0.5), "SubL", "1/2").array,
                               np.diag([math.sqrt(2)] * 2), rtol=1e-15)
    np.testing.assert_allclose(su2.su2_multiplier_symbol(Heat(1), "SubL", 1).array,
                               np.diag(np.exp([-1, -2, -1])), rtol=1e-15)
    with pytest.raises(TrivialRepresentation):
        su2.su2_multiplier_symbol(FracPower(-0.5), "SubL", 0)


@pytest.mark.parametrize("l", half_integers(0, 50))
def test_identities(l):
    s = {g: su2.su2_symbol(g, l).array for g in ("P", "M", "R1", "R2", "R3", "SubL")}
    assert np.array_equal(s["M"], s["P"].T)
    np.testing.assert_allclose(0.5 * (s["P"] @ s["M"] + s["M"] @ s["P"]), s["SubL"], atol=1e-12, rtol=0)
    np.testing.assert_allclose(-(s["R1"] @ s["R1"] + s["R2"] @ s["R2"]), s["SubL"], atol=1e-12, rtol=0)
    casimir = -(s["R1"] @ s["R1"] + s["R2"] @ s["R2"] + s["R3"] @ s["R3"])
    np.testing.assert_allclose(casimir, l.value * (l.value + 1) * np.eye(l.dim), atol=1e-12, rtol=0)
    bracket = s["R1"] @ s["R2"] - s["R2"] @ s["R1"]
    np.testing.assert_allclose(bracket, s["R3"], atol=1e-12 * (1 + l.value ** 2), rtol=0)
    assert np.array_equal(s["R1"].conj().T, -s["R1"])
    assert np.array_equal(s["R2"].conj().T, -s["R2"])


@given(spins, st.floats(0.01, 3), st.floats(0.01, 3))
def test_heat_semigroup(l, t1, t2):
    a = su2.su2_multiplier_symbol(Heat(t1), "SubL", l).array
    b = su2.su2_multiplier_symbol(Heat(t2), "SubL", l).array
    c = su2.su2_multiplier_symbol(Heat(t1 + t2), "SubL", l).array
    np.testing.assert_allclose(a @ b, c, atol=1e-12, rtol=0)


@given(spins.filter(lambda l: l.twice_value > 0))
def test_subl_positive(l):
    assert np.all(su2.subl_diagonal(l) > 0)
