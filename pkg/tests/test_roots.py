from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from bmstab._roots import PI_HI, PI_LO, iroot, nth_root_brackets


def test_iroot_small_cases():
    assert iroot(0, 3) == 0
    assert iroot(1, 5) == 1
    assert iroot(124, 3) == 4
    assert iroot(125, 3) == 5
    assert iroot(2 ** 60 - 1, 2) == 2 ** 30 - 1


@given(st.integers(min_value=0, max_value=10 ** 30), st.integers(min_value=1, max_value=6))
def test_iroot_is_floor_root(x, n):
    r = iroot(x, n)
    assert r ** n <= x < (r + 1) ** n


def test_exact_powers_are_exact():
    assert nth_root_brackets(Fraction(9, 4), 2) == (Fraction(3, 2), Fraction(3, 2))
    assert nth_root_brackets(Fraction(27, 8), 3) == (Fraction(3, 2), Fraction(3, 2))
    assert nth_root_brackets(Fraction(0), 4) == (0, 0)
    assert nth_root_brackets(Fraction(7), 1) == (7, 7)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1000)),
       st.integers(min_value=2, max_value=4))
def test_brackets_contain_root(x, n):
    lo, hi = nth_root_brackets(x, n, bits=48)
    assert lo ** n <= x
    assert hi ** n >= x
    assert hi - lo <= Fraction(1, 2 ** 47)


def test_brackets_vs_mpmath():
    with mp.workprec(120):
        for x in (Fraction(2), Fraction(5, 7), Fraction(123456, 7)):
            for n in (2, 3):
                lo, hi = nth_root_brackets(x, n, bits=80)
                ref = mp.root(mp.mpf(x.numerator) / x.denominator, n)
                assert mp.mpf(lo.numerator) / lo.denominator <= ref
                assert mp.mpf(hi.numerator) / hi.denominator >= ref


def test_pi_brackets():
    with mp.workprec(200):
        pi = mp.pi
        assert mp.mpf(PI_LO.numerator) / PI_LO.denominator < pi
        assert mp.mpf(PI_HI.numerator) / PI_HI.denominator > pi
    assert PI_HI - PI_LO == Fraction(1, 10 ** 29)


def test_negative_rejected():
    with pytest.raises(ValueError):
        nth_root_brackets(Fraction(-1), 2)
