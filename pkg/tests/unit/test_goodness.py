import numpy as np
import pytest
import scipy.stats
from hamcrest import assert_that, equal_to, greater_than, less_than

from riesz_kit.errors import TooFewSamples
from riesz_kit.goodness import KsResult, ks_two_way


@pytest.fixture
def generator():
    return np.random.default_rng(2024)


def test_one_sample_test_against_a_named_distribution(generator):
    result = ks_two_way(generator.gamma(2.0, 0.5, 2000), "gamma", 2.0, 0.0, 0.5)
    assert_that(result.two_sample, equal_to(False))
    assert_that(result.p_value, greater_than(1e-4))


def test_one_sample_test_against_a_cdf(generator):
    result = ks_two_way(generator.standard_normal(2000), scipy.stats.norm.cdf)
    assert_that(result.p_value, greater_than(1e-4))


def test_two_sample_test(generator):
    result = ks_two_way(generator.normal(size=2000), generator.normal(size=2000))
    assert_that(result.two_sample, equal_to(True))
    assert_that(result.p_value, greater_than(1e-4))


def test_shifted_samples_are_detected(generator):
    result = ks_two_way(generator.normal(1.0, size=2000), "norm")
    assert_that(result.p_value, less_than(1e-6))
    assert_that(result.passes(), equal_to(False))


def test_small_samples_are_refused(generator):
    with pytest.raises(TooFewSamples):
        ks_two_way(generator.normal(size=20), "norm")
    with pytest.raises(TooFewSamples):
        ks_two_way(generator.normal(size=200), generator.normal(size=50))


def test_passes_uses_the_significance_level():
    assert_that(KsResult(0.1, 0.02, False).passes(0.01), equal_to(True))
    assert_that(KsResult(0.1, 0.02, False).passes(0.05), equal_to(False))


def test_a_sample_agrees_with_itself(generator):
    draws = generator.gamma(3.0, 1.0, 500)
    result = ks_two_way(draws, draws)
    assert_that(result.statistic, equal_to(0.0))
    assert_that(result.p_value, equal_to(1.0))
    assert_that(result.passes(), equal_to(True))


def test_both_ways_agree_on_a_correct_model(generator):
    draws = generator.gamma(3.0, 1.0, 4000)
    reference = generator.gamma(3.0, 1.0, 4000)
    assert_that(ks_two_way(draws, "gamma", 3.0).p_value, greater_than(1e-4))
    assert_that(ks_two_way(draws, reference).p_value, greater_than(1e-4))
