import math

import numpy as np
import pytest
from hamcrest import assert_that, close_to, equal_to
from hypothesis import given
from hypothesis import strategies as st

from riesz_kit.algebra import AlgebraMatrix, HermitianPD
from riesz_kit.errors import DomainViolation, InvalidPartition
from riesz_kit.special import (
    GammaDomain,
    Partition,
    gen_pochhammer,
    log_mv_gamma,
    log_mv_gamma_weighted,
    log_q_kappa,
    q_kappa,
    stiefel_log_volume,
)
from riesz_kit.suites import congruence, random_hermitian_pd, random_lower_triangular

from .matchers import relatively_close_to


def test_partition_drops_trailing_zeros():
    assert_that(Partition.of(2, 1, 0, 0).parts, equal_to((2, 1)))
    assert_that(Partition.of(2, 1, 0).padded(4), equal_to((2, 1, 0, 0)))


@pytest.mark.parametrize("parts", [(1, 2), (2, -1), (1.5,), (True,)])
def test_partition_rejects_bad_parts(parts):
    with pytest.raises(InvalidPartition):
        Partition(parts)


def test_partition_parses_its_own_rendering():
    kappa = Partition.parse("(3, 1)")
    assert_that(kappa, equal_to(Partition.of(3, 1)))
    assert_that(Partition.parse(str(kappa)), equal_to(kappa))
    assert_that(str(Partition.zero()), equal_to("0"))
    assert_that(Partition.parse("0"), equal_to(Partition.zero()))


def test_partitions_add_part_by_part():
    assert_that(Partition.of(2, 1) + Partition.of(1), equal_to(Partition.of(3, 1)))


@given(st.lists(st.integers(min_value=0, max_value=9), max_size=6))
def test_partition_weight_is_the_sum_of_parts(values):
    kappa = Partition.coerce(sorted(values, reverse=True))
    assert_that(kappa.weight, equal_to(sum(values)))
    assert_that(kappa.length, equal_to(sum(1 for v in values if v)))


def test_pochhammer_of_a_two_part_partition():
    assert_that(gen_pochhammer(2.0, (2, 1), 1).value, close_to(9.0, 1e-12))


def test_pochhammer_sign_follows_negative_factors():
    result = gen_pochhammer(-0.5, (1,), 1)
    assert_that(result.sign, equal_to(-1))
    assert_that(result.value, close_to(-0.5, 1e-15))


def test_pochhammer_vanishes_on_a_zero_factor():
    result = gen_pochhammer(0.5, (1, 1), 1)
    assert_that(result.sign, equal_to(0))
    assert_that(result.value, equal_to(0.0))


def test_weighted_gamma_plus_example():
    domain = GammaDomain.plus(2.0, (1, 0), 2, 2)
    assert_that(math.exp(log_mv_gamma_weighted(domain)), close_to(2 * math.pi, 1e-12))


def test_weighted_gamma_minus_example():
    domain = GammaDomain.minus(3.0, (1, 0), 2, 2)
    assert_that(math.exp(log_mv_gamma_weighted(domain)), close_to(2 * math.pi, 1e-12))


def test_weighted_gamma_at_zero_weight_is_the_plain_gamma():
    domain = GammaDomain.plus(5.5, Partition.zero(), 3, 4)
    assert_that(
        log_mv_gamma_weighted(domain), relatively_close_to(log_mv_gamma(5.5, 3, 4))
    )


@pytest.mark.parametrize(
    "domain",
    [
        GammaDomain.plus(0.5, (), 2, 2),
        GammaDomain.minus(2.0, (1, 0), 2, 2),
        GammaDomain.plus(4.0, (1, 1, 1), 2, 1),
    ],
)
def test_weighted_gamma_outside_its_domain(domain):
    with pytest.raises(DomainViolation):
        log_mv_gamma_weighted(domain)


@pytest.mark.parametrize(
    "n,m,beta,expected",
    [
        (1, 1, 1, 2.0),
        (1, 1, 2, 2 * math.pi),
        (1, 1, 4, 2 * math.pi**2),
        (2, 1, 1, 2 * math.pi),
    ],
)
def test_stiefel_volumes_of_spheres(n, m, beta, expected):
    assert_that(math.exp(stiefel_log_volume(n, m, beta)), close_to(expected, 1e-12))


def test_q_kappa_of_a_diagonal_matrix():
    a = HermitianPD.from_diagonal([5.0, 2.0])
    assert_that(q_kappa(a, (3, 1)), close_to(250.0, 1e-9))


def test_q_kappa_needs_at_most_m_parts():
    with pytest.raises(InvalidPartition):
        q_kappa(HermitianPD.identity(2), (1, 1, 1))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_q_kappa_with_equal_parts_is_a_determinant_power(beta):
    a = random_hermitian_pd(np.random.default_rng(3), 3, beta)
    assert_that(log_q_kappa(a, (2, 2, 2)), close_to(2 * a.log_det(), 1e-9))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_q_kappa_is_multiplicative_in_the_partition(beta):
    a = random_hermitian_pd(np.random.default_rng(5), 3, beta)
    kappa, tau = Partition.of(3, 1), Partition.of(2, 2, 1)
    assert_that(
        log_q_kappa(a, kappa + tau),
        close_to(log_q_kappa(a, kappa) + log_q_kappa(a, tau), 1e-9),
    )


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_q_kappa_is_homogeneous(beta):
    a = random_hermitian_pd(np.random.default_rng(9), 3, beta)
    scaled = HermitianPD.from_matrix(a.matrix.scaled(2.5))
    assert_that(
        log_q_kappa(scaled, (4, 2, 1)),
        close_to(log_q_kappa(a, (4, 2, 1)) + 7 * math.log(2.5), 1e-9),
    )


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_q_kappa_factors_through_lower_triangular_congruence(beta):
    generator = np.random.default_rng(17)
    a = random_hermitian_pd(generator, 3, beta)
    lower = random_lower_triangular(generator, 3, beta)
    gram = HermitianPD.from_matrix(lower @ lower.conj_transpose())
    assert_that(
        log_q_kappa(congruence(lower, a), (3, 1)),
        close_to(log_q_kappa(gram, (3, 1)) + log_q_kappa(a, (3, 1)), 1e-9),
    )


def test_q_kappa_of_a_diagonal_inverse_is_reciprocal():
    a = HermitianPD(AlgebraMatrix.from_real(np.diag([4.0, 3.0, 0.5]), 2))
    assert_that(
        q_kappa(a.inverse(), (2, 1)) * q_kappa(a, (2, 1)), close_to(1.0, 1e-12)
    )
