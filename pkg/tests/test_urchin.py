from fractions import Fraction as F

import numpy as np
import pytest

from helpers import random_curve, random_unit_series
from symbound.errors import InputError, NotPositive, WindowExhausted
from symbound.laurent import LaurentSeries
from symbound.pencils import null_data_equal, null_pencil_data
from symbound.spd import Geodesic, Velocity
from symbound.urchin import (curve_from_json, curve_from_rows, factor_curve, factor_with_retry,
                             limit_from_factorization, refactor_invariance_check, reparametrize, urchin_limit,
                             urchin_limits_equal)

Z = LaurentSeries.monomial


def s(*coeffs, low=0):
    return LaurentSeries(low, coeffs)


DIAG = curve_from_rows([[Z(1, -2), 0], [0, 1]])
COUPLED = curve_from_rows([[Z(1, -2), 1], [1, 1]])
PERTURBED = curve_from_rows([[s(1, 0, 1, low=-2), 1], [1, s(1, 1)]])


def as_int(m):
    return [[int(x) for x in row] for row in m]


# factorization

def test_factor_diagonal():
    fac = factor_curve(DIAG)
    assert fac.exponents == (2, 0) and fac.scales == (1, 1)
    assert [[x for x in row] for row in fac.g] == [[LaurentSeries.const(1), LaurentSeries.zero()],
                                                   [LaurentSeries.zero(), LaurentSeries.const(1)]]


def test_factor_coupled_example():
    fac = factor_curve(COUPLED)
    assert fac.exponents == (2, 0) and fac.scales == (1, 1)
    assert as_int(fac.g0()) == [[1, 0], [0, 1]]
    assert fac.g[1][0] == Z(1, 2)
    assert fac.residual_is_zero(COUPLED)


def test_factor_perturbed_example():
    fac = factor_curve(PERTURBED)
    assert fac.exponents == (2, 0)
    assert fac.residual_is_zero(PERTURBED)


def test_residual_and_exponents_on_random_curves(rng):
    for _ in range(40):
        curve, known = random_curve(rng)
        fac = factor_with_retry(curve)
        assert fac.residual_is_zero(curve)
        assert fac.exponents == known.exponents
        assert all(isinstance(k, int) for k in fac.exponents)
        assert all(c > 0 for c in fac.scales)


def test_exponents_invariant_under_congruence(rng):
    for _ in range(20):
        curve, known = random_curve(rng, n=3)
        h = [[s(int(i == j) * 2 + int(rng.integers(-1, 2)) * (i > j), *rng.integers(-2, 3, size=2).tolist())
              for j in range(3)] for i in range(3)]
        assert factor_with_retry(curve.congruent(h)).exponents == known.exponents


def test_factor_errors():
    with pytest.raises(NotPositive):
        factor_curve(curve_from_rows([[-1]]))
    with pytest.raises(NotPositive):
        factor_curve(curve_from_rows([[1, 1], [1, 1]]))
    with pytest.raises(WindowExhausted):
        factor_with_retry(curve_from_rows([[LaurentSeries(0, (), prec=3)]]))
    with pytest.raises(InputError):
        curve_from_rows([[1, 2], [3, 1]])


# limits

def test_limit_of_diagonal_curve():
    lim = urchin_limit(DIAG)
    assert lim.values == (2, 0) and lim.block_sizes == (1, 1)
    assert as_int(lim.subspaces[1]) == [[0, 1]]
    assert as_int(lim.forms[0]) == [[1, 0], [0, 0]] and as_int(lim.forms[1]) == [[1]]
    data = lim.null_pencil_data()
    np.testing.assert_allclose(data.flag.projectors()[0], np.diag([0, 1]), atol=1e-12)


def test_limit_examples():
    assert not urchin_limits_equal(urchin_limit(DIAG), urchin_limit(DIAG.scaled(5)))
    assert urchin_limits_equal(urchin_limit(COUPLED), urchin_limit(DIAG))
    one_block = curve_from_rows([[Z(1, -1), 0], [0, Z(1, -1)]])
    assert urchin_limits_equal(urchin_limit(one_block), urchin_limit(one_block.scaled(F(1, 4))))


def test_limit_matches_known_factorization(rng):
    for _ in range(30):
        curve, known = random_curve(rng)
        lim = urchin_limit(curve)
        assert urchin_limits_equal(lim, limit_from_factorization(known))
        if len(lim.values) > 1 or lim.values[0] != 0:
            g = limit_from_factorization(known).frame()
            ref = null_pencil_data(Geodesic(g, Velocity(lim.block_sizes, lim.values)))
            assert null_data_equal(lim.null_pencil_data(), ref, 1e-6, 1e-6)


def test_reparametrize_examples():
    assert urchin_limits_equal(urchin_limit(reparametrize(COUPLED, 1)), urchin_limit(COUPLED))
    x = curve_from_rows([[Z(1, -1), 0], [0, 1]])
    y = reparametrize(x, 2)
    assert y[0, 0] == Z(F(1, 2), -1) and y[1, 1] == LaurentSeries.const(1)
    with pytest.raises(InputError):
        reparametrize(x, s(-1, 1))


def test_invariance_under_reparametrization_and_pivoting(rng):
    for _ in range(15):
        curve, _ = random_curve(rng)
        ref = urchin_limit(curve)
        for seed in range(4):
            assert refactor_invariance_check(curve, seed)
            assert urchin_limits_equal(ref, urchin_limit(reparametrize(curve, random_unit_series(rng))))


def test_refactor_through_other_representation(rng):
    for _ in range(10):
        curve, _ = random_curve(rng, n=3)
        # h(0) unit lower triangular, hence invertible.
        h = [[s(1 if i == j else int(rng.integers(-2, 3)) * (i > j), int(rng.integers(-1, 2))) for j in range(3)]
             for i in range(3)]
        assert refactor_invariance_check(curve, int(rng.integers(0, 100)), h)


def test_curve_json():
    obj = {"n": 2, "T": 16, "entries": [[{"low": -2, "coeffs": ["1"]}, {"low": 0, "coeffs": ["1"]}],
                                        [{"low": 0, "coeffs": ["1"]}]]}
    curve = curve_from_json(obj)
    assert curve[1, 0] == LaurentSeries.const(1)
    assert curve_from_json(curve.to_json())[0, 0] == curve[0, 0]
    with pytest.raises(InputError):
        curve_from_json({"n": 1, "entries": [[{"low": 0, "coeffs": ["exp(k)"]}]]})
