import math

import pytest

from mimowpt.errors import InvalidInputError
from mimowpt.scaling_laws import (
    GAMMA_1_5,
    ScalingInputs,
    analytic_average,
    chi2_moment,
    falling_factorial,
    miso_mrt_average,
    monte_carlo_average,
    simo_dc_average,
    simo_rf_analog_lower_bound,
    simo_rf_mrc_average,
)

B2, B4 = 920.708577321106323, 5203257.37090226753


def x(n, trunc=4, power=1.0):
    return ScalingInputs(n, power, B2, B4, trunc)


def test_chi2_moment_values():
    assert chi2_moment(1, 2) == 2
    assert chi2_moment(2, 2) == 6
    assert chi2_moment(5, 0) == 1
    assert chi2_moment(1, 4) == 24
    with pytest.raises(InvalidInputError):
        chi2_moment(0, 1)


def test_falling_factorial():
    assert falling_factorial(3, 4) == 0
    assert falling_factorial(4, 4) == 24
    assert falling_factorial(8, 2) == 56
    assert falling_factorial(5, 0) == 1


def test_gamma_constant():
    assert GAMMA_1_5 == pytest.approx(math.gamma(1.5), rel=1e-15)


def test_single_antenna_formulas_coincide():
    a = miso_mrt_average(x(1))
    assert simo_dc_average(x(1)) == pytest.approx(a, rel=1e-15)
    assert simo_rf_mrc_average(x(1)) == a


def test_miso_formula_by_hand():
    M, P = 3, 0.5
    expected = (B2**2 * P**2 * M * (M + 1) + 3 * B2 * B4 * P**3 * M * (M + 1) * (M + 2)
                + 9 * B4**2 * P**4 / 4 * M * (M + 1) * (M + 2) * (M + 3))
    assert miso_mrt_average(x(M, power=P)) == pytest.approx(expected, rel=1e-14)


def test_second_order_truncation():
    assert miso_mrt_average(x(4, 2)) == pytest.approx(B2**2 * 4 * 5, rel=1e-14)
    assert simo_dc_average(x(4, 2)) == pytest.approx(2 * B2**2 * 4, rel=1e-14)
    assert simo_rf_analog_lower_bound(x(8, 2)) == pytest.approx(
        B2**2 * GAMMA_1_5**4 * falling_factorial(8, 4) / 64, rel=1e-14)


def test_dc_linear_in_q():
    assert simo_dc_average(x(8)) == pytest.approx(2 * simo_dc_average(x(4)), rel=1e-15)


@pytest.mark.parametrize("q", [1, 2, 4, 8, 16])
def test_symmetry_and_ordering(q):
    assert simo_rf_mrc_average(x(q)) == miso_mrt_average(x(q))
    if q >= 2:
        assert simo_rf_mrc_average(x(q)) > simo_dc_average(x(q))


def test_lower_bound_vanishes_for_small_q():
    assert simo_rf_analog_lower_bound(x(3)) == 0.0


def test_unknown_scheme():
    with pytest.raises(InvalidInputError):
        analytic_average("nope", x(2))
    with pytest.raises(InvalidInputError):
        ScalingInputs(2, 1.0, B2, B4, truncation=6)


@pytest.mark.parametrize("scheme,n", [("miso_mrt", 4), ("simo_dc", 8), ("simo_rf_mrc", 4)])
def test_monte_carlo_second_order(coeffs_unit_load, scheme, n):
    # second-order truncation has light tails, so 4e4 samples give ~1%
    mc, se = monte_carlo_average(scheme, n, 1.0, coeffs_unit_load, 40_000, seed=1, truncation=2)
    a = analytic_average(scheme, x(n, 2))
    assert abs(mc - a) <= max(4 * se, 0.03 * a)


def test_monte_carlo_deterministic(coeffs_unit_load):
    a = monte_carlo_average("simo_rf_analog", 8, 1.0, coeffs_unit_load, 5000, seed=4, batch=1000)
    b = monte_carlo_average("simo_rf_analog", 8, 1.0, coeffs_unit_load, 5000, seed=4, batch=1000)
    assert a == b


def test_calibrated_variance_equivalence(coeffs_unit_load):
    # P |h|^2 is what matters: variance s2 at power P equals unit variance at P s2
    a, _ = monte_carlo_average("miso_mrt", 2, 4.0, coeffs_unit_load, 2000, seed=2, variance=0.25)
    b, _ = monte_carlo_average("miso_mrt", 2, 1.0, coeffs_unit_load, 2000, seed=2)
    assert a == pytest.approx(b, rel=1e-12)
