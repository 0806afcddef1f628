from fractions import Fraction

import numpy as np
import pytest
import scipy.special
from hamcrest import assert_that, close_to, contains_exactly, equal_to
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_kit.algebra import AlgebraMatrix
from riesz_kit.errors import DegreeTooLarge, DomainViolation, PochhammerZero
from riesz_kit.jack import (
    enumerate_partitions,
    hyper_0F1,
    jack_at_identity,
    jack_C,
    jack_C_batch,
    jack_table,
    monomial_symmetric,
    stiefel_cf_series,
)
from riesz_kit.special import Partition

from .matchers import relatively_close_to

EIGS = np.array([2.0, 3.0])

positive_eigs = st.lists(
    st.floats(min_value=0.1, max_value=3.0), min_size=1, max_size=4
).map(np.array)


@pytest.mark.parametrize(
    "beta,expected", [(1, Fraction(2, 3)), (2, Fraction(1)), (4, Fraction(4, 3))]
)
def test_degree_two_monomial_coefficients(beta, expected):
    table = jack_table(beta)
    assert_that(table.coefficient((2,), (2,)), equal_to(Fraction(1)))
    assert_that(table.coefficient((2,), (1, 1)), equal_to(expected))
    assert_that(table.coefficient((1, 1), (1, 1)), equal_to(2 - expected))
    assert_that(table.coefficient((1, 1), (2,)), equal_to(Fraction(0)))


@pytest.mark.parametrize(
    "beta,two,one_one", [(1, 17.0, 8.0), (2, 19.0, 6.0), (4, 21.0, 4.0)]
)
def test_degree_two_values(beta, two, one_one):
    assert_that(jack_C((2,), EIGS, beta), close_to(two, 1e-12))
    assert_that(jack_C((1, 1), EIGS, beta), close_to(one_one, 1e-12))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_single_variable_reduces_to_a_power(beta):
    for t in range(1, 9):
        assert_that(jack_C((t,), [1.5], beta), relatively_close_to(1.5**t))


@settings(max_examples=40, deadline=None)
@given(
    eigs=positive_eigs,
    t=st.integers(min_value=0, max_value=6),
    beta=st.sampled_from([1, 2, 4]),
)
def test_degree_sums_to_a_trace_power(eigs, t, beta):
    total = sum(jack_C(tau, eigs, beta) for tau in enumerate_partitions(t, len(eigs)))
    assert_that(total, relatively_close_to(float(np.sum(eigs)) ** t, 1e-9))


@settings(max_examples=25, deadline=None)
@given(eigs=positive_eigs, beta=st.sampled_from([1, 2, 4]))
def test_jack_polynomials_are_symmetric_and_homogeneous(eigs, beta):
    tau = Partition.of(3, 1)
    value = jack_C(tau, eigs, beta)
    assert_that(jack_C(tau, eigs[::-1], beta), close_to(value, 1e-9 * abs(value)))
    assert_that(
        jack_C(tau, 2.0 * eigs, beta), close_to(16 * value, 1e-9 * abs(16 * value))
    )


def test_partition_longer_than_the_eigenvalues_vanishes():
    assert_that(jack_C((1, 1, 1), EIGS, 1), equal_to(0.0))


def test_degree_beyond_the_table_is_rejected():
    with pytest.raises(DegreeTooLarge):
        jack_C((9,), EIGS, 2)


def test_trace_at_the_identity():
    assert_that(jack_at_identity((1,), 3, 4), close_to(3.0, 1e-12))


def test_partitions_are_enumerated_in_reverse_lexicographic_order():
    partitions = [p.parts for p in enumerate_partitions(4, 2)]
    assert_that(partitions, contains_exactly((4,), (3, 1), (2, 2)))


def test_scalar_hypergeometric_matches_scipy():
    result = hyper_0F1(1.5, [0.5], 1)
    assert_that(result.value, close_to(scipy.special.hyp0f1(1.5, 0.5), 1e-12))
    assert_that(result.converged, equal_to(True))
    assert_that(len(result.contributions), equal_to(9))


def test_hypergeometric_at_zero_is_one():
    assert_that(hyper_0F1(2.0, [0.0, 0.0, 0.0], 2).value, equal_to(1.0))


def test_hypergeometric_with_a_vanishing_pochhammer():
    with pytest.raises(PochhammerZero):
        hyper_0F1(0.5, [1.0, 1.0], 1)


def test_hypergeometric_degree_limit():
    with pytest.raises(DegreeTooLarge):
        hyper_0F1(1.5, [0.5], 1, t_max=9)
    with pytest.raises(DomainViolation):
        hyper_0F1(1.5, [0.5], 1, t_max=-1)


def test_stiefel_series_of_a_planar_frame_is_bessel_j0():
    t = AlgebraMatrix.from_real([[0.6], [0.8]])
    result = stiefel_cf_series(t, 2, 1)
    assert_that(result.value, close_to(scipy.special.j0(1.0), 1e-12))


def test_monomial_symmetric_functions():
    x = np.array([1.0, 2.0, 3.0])
    assert_that(float(monomial_symmetric((2, 1), x)), equal_to(48.0))
    assert_that(float(monomial_symmetric((1, 1), x)), equal_to(11.0))
    assert_that(float(monomial_symmetric((1, 1, 1, 1), x)), equal_to(0.0))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_batched_polynomials_of_one_degree(beta):
    eigs = np.random.default_rng(beta).uniform(0.2, 1.5, (5, 3))
    values = jack_C_batch(3, eigs, beta)
    assert_that(set(values), equal_to(set(enumerate_partitions(3, 3))))
    total = sum(values.values())
    power = eigs.sum(axis=1) ** 3
    assert_that(np.allclose(total, power, rtol=1e-12), equal_to(True))
    for tau, batch in values.items():
        expected = jack_C(tau, eigs[2], beta)
        assert_that(float(batch[2]), relatively_close_to(expected))
