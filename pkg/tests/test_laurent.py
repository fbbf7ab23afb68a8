from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbound.errors import DivisionByZeroSeries, InputError, WindowExhausted
from symbound.laurent import LaurentSeries, series_from_json

coeff = st.fractions(min_value=-9, max_value=9, max_denominator=6)
polys = st.tuples(st.integers(-3, 3), st.lists(coeff, min_size=1, max_size=5))


def series(p):
    return LaurentSeries(p[0], tuple(p[1]))


def value(p, z):
    """Exact Laurent polynomial evaluated at a rational point."""
    return sum(c * z ** (p[0] + i) for i, c in enumerate(p[1]))


def ev(s, z):
    return sum(F(int(c.numerator), int(c.denominator)) * z ** (s.low + i) for i, c in enumerate(s.coeffs))


Z = F(3, 7)


def test_examples():
    assert LaurentSeries(-1, (1, 1)) + 1 == LaurentSeries(-1, (1, 2))
    geo = LaurentSeries(0, (1, -1)).inverse(terms=8)
    assert geo.coeffs == tuple([1] * 8) and geo.prec == 8
    assert LaurentSeries.monomial(1, -2) * LaurentSeries.monomial(1, 3) == LaurentSeries.monomial(1, 1)


@settings(max_examples=150, deadline=None)
@given(polys, polys)
def test_ring_operations_match_evaluation(p, q):
    a, b = series(p), series(q)
    assert ev(a + b, Z) == value(p, Z) + value(q, Z)
    assert ev(a - b, Z) == value(p, Z) - value(q, Z)
    assert ev(a * b, Z) == value(p, Z) * value(q, Z)


@settings(max_examples=100, deadline=None)
@given(polys)
def test_inverse_is_exact_in_window(p):
    a = series(p)
    if not a.has_value():
        return
    prod = a * a.inverse(terms=10)
    if len(a.coeffs) == 1:
        assert prod == LaurentSeries.const(1)
        return
    assert prod.prec >= 10
    assert prod.coeff(0) == 1
    assert all(prod.coeff(k) == 0 for k in range(1, prod.prec))


@settings(max_examples=100, deadline=None)
@given(st.lists(coeff, min_size=0, max_size=4))
def test_sqrt_unit_squares_back(tail):
    u = LaurentSeries(0, (F(1),) + tuple(tail))
    r = u.sqrt_unit(terms=10)
    assert (r * r - u).coeffs == ()


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.integers(0, 3), st.lists(coeff, min_size=1, max_size=4)), st.lists(coeff, min_size=1, max_size=3))
def test_compose_matches_substitution(p, u):
    if u[0] == 0:
        u[0] = F(1)
    inner = LaurentSeries(1, tuple(u))
    assert ev(series(p).compose(inner), Z) == value(p, ev(inner, Z))


def test_windows_are_tracked():
    a = LaurentSeries(0, (1, 2, 3), prec=3)
    b = LaurentSeries.monomial(1, -2)
    assert (a * b).prec == 1
    with pytest.raises(WindowExhausted):
        (a * b).coeff(1)
    with pytest.raises(WindowExhausted):
        LaurentSeries(0, (), prec=4).valuation()
    with pytest.raises(DivisionByZeroSeries):
        LaurentSeries.zero().inverse()


def test_json_round_trip_and_rejection():
    s = LaurentSeries(-2, (F(1, 3), 0, F(-5, 2)), prec=4)
    assert series_from_json(s.to_json()) == s
    for bad in ({"low": 0, "coeffs": ["e^k"]}, {"coeffs": ["1"]}, {"low": 0, "coeffs": ["1/0"]}):
        with pytest.raises(InputError):
            series_from_json(bad)
