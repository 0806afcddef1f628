import math

import numpy as np
import pytest
from hamcrest import assert_that, close_to, equal_to, has_length, less_than

from riesz_kit.algebra import AlgebraMatrix
from riesz_kit.characteristic import (
    CfQuery,
    cf_kr1,
    mc_cf_estimate,
    mc_stiefel_cf,
    pairing,
)
from riesz_kit.distributions import KotzRieszParams, matrix_normal_params
from riesz_kit.errors import DegreeTooLarge, DomainViolation, UnsupportedVariant
from riesz_kit.jack import stiefel_cf_series
from riesz_kit.samplers import RngStream

from .matchers import within_standard_errors


@pytest.fixture
def two_column():
    return KotzRieszParams.spherical("I", (1,), n=3, m=2, beta=1)


@pytest.fixture
def small_t():
    values = np.array([[0.3, -0.2], [0.1, 0.25], [-0.15, 0.2]])
    return AlgebraMatrix.from_real(values)


def test_scalar_normal_characteristic_function():
    params = matrix_normal_params(AlgebraMatrix.zeros(1, 1))
    value = cf_kr1(CfQuery(params, AlgebraMatrix.from_real([[0.5]])))
    assert_that(value.real, close_to(math.exp(-0.125), 1e-12))
    assert_that(value.imag, close_to(0.0, 1e-15))
    assert_that(value.converged, equal_to(True))


def test_location_adds_a_phase():
    params = matrix_normal_params(AlgebraMatrix.from_real([[0.3]]))
    value = cf_kr1(CfQuery(params, AlgebraMatrix.from_real([[0.5]]))).value
    expected = math.exp(-0.125) * complex(math.cos(0.15), math.sin(0.15))
    assert_that(abs(value - expected), close_to(0.0, 1e-12))


def test_pairing_is_the_real_trace_inner_product(small_t):
    assert_that(
        float(pairing(small_t.native[None], small_t)[0]),
        close_to(float(np.sum(small_t.native**2)), 1e-15),
    )


def test_series_needs_type_one():
    params = KotzRieszParams.spherical("II", (1,), n=4, m=2, beta=1)
    with pytest.raises(UnsupportedVariant):
        cf_kr1(CfQuery(params, AlgebraMatrix.zeros(4, 2)))


def test_series_argument_must_match_the_parameters(two_column):
    with pytest.raises(DomainViolation):
        cf_kr1(CfQuery(two_column, AlgebraMatrix.zeros(2, 2)))
    with pytest.raises(DegreeTooLarge):
        cf_kr1(CfQuery(two_column, AlgebraMatrix.zeros(3, 2), t_max=9))


def test_series_at_zero_is_one(two_column):
    value = cf_kr1(CfQuery(two_column, AlgebraMatrix.zeros(3, 2)))
    assert_that(value.real, close_to(1.0, 1e-12))


@pytest.mark.integration
def test_series_of_a_non_invariant_law_agrees_with_monte_carlo(two_column, small_t):
    series = cf_kr1(CfQuery(two_column, small_t))
    estimate = mc_cf_estimate(two_column, small_t, 20_000, RngStream(9))
    assert_that(estimate.real, within_standard_errors(series.real))
    assert_that(estimate.imag, within_standard_errors(series.imag))


@pytest.mark.integration
def test_frame_characteristic_function_agrees_with_monte_carlo():
    t = AlgebraMatrix.from_real([[0.9], [0.4], [-0.3]], 2)
    series = stiefel_cf_series(t, 3, 2)
    estimate = mc_stiefel_cf(t, 20_000, RngStream(10))
    assert_that(estimate.real, within_standard_errors(series.value))


def test_series_stops_at_the_node_budget(two_column, small_t):
    truncated = cf_kr1(CfQuery(two_column, small_t), node_budget=100)
    assert_that(truncated.converged, equal_to(False))
    assert_that(truncated.contributions, has_length(6))
    complete = cf_kr1(CfQuery(two_column, small_t, t_max=5), node_budget=100)
    assert_that(truncated.real, equal_to(complete.real))
    assert_that(truncated.tail, equal_to(abs(complete.contributions[-1])))


@pytest.mark.integration
def test_three_column_complex_series_is_truncated_not_refused():
    params = KotzRieszParams.spherical("I", (1,), n=3, m=3, beta=2)
    t = AlgebraMatrix.from_components(np.full((3, 3, 2), 0.05), 2)
    value = cf_kr1(CfQuery(params, t))
    assert_that(value.contributions, has_length(6))
    assert_that(value.converged, equal_to(False))
    assert_that(value.tail, less_than(1e-6))
    assert_that(value.real, close_to(1.0, 0.1))
