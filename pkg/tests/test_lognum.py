from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsestab import lognum as ln
from sparsestab.lognum import LogReal

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda x: x == 0 or abs(x) > 1e-6)


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_float_arithmetic_agrees(x, y):
    assert ln.add(x, y) == pytest.approx(x + y, rel=1e-12, abs=1e-9)
    assert ln.mul(x, y) == pytest.approx(x * y, rel=1e-12)
    if y != 0:
        assert ln.div(x, y) == pytest.approx(x / y, rel=1e-12)
    assert ln.compare(x, y) == (x > y) - (x < y)


def test_overflow_moves_to_log_form():
    big = ln.mul(1e200, 1e200)
    assert isinstance(big, LogReal) and big.log10 == pytest.approx(400)
    assert ln.to_float(big) == math.inf
    small = ln.div(1e-200, 1e200)
    assert isinstance(small, LogReal) and small.log10 == pytest.approx(-400)
    assert ln.to_float(small) == 0.0
    # coming back into range gives a plain float
    assert ln.div(big, 1e300) == pytest.approx(1e100)


def test_big_integers_match_exact_logs():
    n = 7**2000
    x = ln.normalize(n)
    assert x.log10 == pytest.approx(2000 * math.log10(7), rel=1e-12)
    y = ln.mul(x, x)
    assert y.log10 == pytest.approx(4000 * math.log10(7), rel=1e-12)


def test_nested_towers():
    L = 1e5
    R = ln.normalize(10**400)  # beyond double range
    LR = ln.power(L, R)  # 10^(5 * 10^400)
    assert isinstance(LR, LogReal) and isinstance(LR.log10, LogReal)
    assert ln.close(LR.log10, ln.mul(5.0, R))
    # multiplying by an ordinary number is invisible at this magnitude
    assert ln.close(ln.mul(LR, 1e10), LR)
    assert ln.compare(ln.mul(LR, LR), LR) > 0
    inv = ln.div(1.0, LR)
    assert ln.sign(inv) == 1 and ln.compare(inv, 1e-300) < 0
    assert ln.compare(ln.mul(inv, LR), 2.0) < 0


def test_addition_near_cancellation_and_negligible_terms():
    a = ln.normalize(10**400)
    assert ln.close(ln.add(a, 1.0), a)
    b = ln.add(a, ln.neg(ln.normalize(10**399)))
    assert ln.close(b, ln.normalize(9 * 10**399))
    assert ln.add(a, ln.neg(a)) == 0.0


def test_minimum_tie_goes_to_first():
    val, idx = ln.minimum(0.5, 0.25, 0.25)
    assert val == 0.25 and idx == 1


def test_json_round_trip():
    for x in [0.0, -3.5, 1e-250, ln.normalize(10**500), ln.power(1e5, ln.normalize(10**400))]:
        back = ln.from_json(ln.to_json(x))
        assert ln.close(back, x, 1e-12)


def test_close_and_errors():
    assert ln.close(1.0, 1.0 + 1e-12)
    assert not ln.close(1.0, -1.0)
    assert not ln.close(10.0, 11.0)
    with pytest.raises(ValueError):
        ln.power(-2.0, 0.5)
    with pytest.raises(ZeroDivisionError):
        ln.div(1.0, 0.0)
    with pytest.raises(OverflowError):
        ln.normalize(float("inf"))


def test_operators():
    x = ln.normalize(10**400)
    assert ln.close(x * 2, ln.mul(x, 2.0))
    assert ln.close(2 / x, ln.div(2.0, x))
    assert x > 1e300 and (x - x) == 0.0
    assert ln.to_str(1.5) == "1.5" and ln.to_str(x).startswith("10^(")


def test_exact_fraction_comparison():
    # (3/2)^5000 vs 10^(5000 log10 1.5)
    exact = Fraction(3, 2) ** 5000
    approx = ln.power(1.5, 5000.0)
    lg = math.log10(exact.numerator) - math.log10(exact.denominator)
    assert ln.close(approx, ln.from_log10(1, lg), 1e-12)
