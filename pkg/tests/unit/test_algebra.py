import numpy as np
import pytest
from hamcrest import assert_that, close_to, equal_to
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_kit.algebra import (
    AlgebraMatrix,
    AlgebraScalar,
    DivisionAlgebra,
    HermitianPD,
    cholesky_lower,
    hermitian_eigenvalues,
    leading_minor_dets,
    pd_sqrt,
    quaternion_complex_embedding,
)
from riesz_kit.errors import NotHermitian, NotPositiveDefinite, WrongAlgebra
from riesz_kit.suites import random_hermitian_pd, random_matrix

UNIT_I = AlgebraScalar((0.0, 1.0, 0.0, 0.0))
UNIT_J = AlgebraScalar((0.0, 0.0, 1.0, 0.0))


@pytest.mark.parametrize("beta", [0, 3, 8, 1.5, True])
def test_unsupported_beta_is_rejected(beta):
    with pytest.raises(WrongAlgebra):
        DivisionAlgebra.of(beta)


def test_quaternion_units_multiply_like_quaternions():
    ij, ji = UNIT_I * UNIT_J, UNIT_J * UNIT_I
    assert_that(np.allclose(ij.components, (0, 0, 0, 1)), equal_to(True))
    assert_that(np.allclose(ji.components, (0, 0, 0, -1)), equal_to(True))


def test_quaternion_conjugate_negates_imaginary_parts():
    q = AlgebraScalar((1.0, 2.0, -3.0, 4.0))
    assert_that(q.conj().components, equal_to((1.0, -2.0, 3.0, -4.0)))
    assert_that((q * q.conj()).components[0], close_to(30.0, 1e-12))
    assert_that(q.norm(), close_to(np.sqrt(30.0), 1e-12))


def test_quaternion_components_survive_the_embedding():
    components = np.random.default_rng(7).standard_normal((2, 3, 4))
    matrix = AlgebraMatrix.from_components(components, 4)
    assert_that(matrix.shape, equal_to((2, 3)))
    assert_that(matrix.native.shape, equal_to((4, 6)))
    assert_that(np.allclose(matrix.components, components), equal_to(True))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_conj_transpose_reverses_products(beta):
    generator = np.random.default_rng(beta)
    a = random_matrix(generator, 2, 3, beta)
    b = random_matrix(generator, 3, 2, beta)
    lhs = (a @ b).conj_transpose()
    rhs = b.conj_transpose() @ a.conj_transpose()
    assert_that(lhs.allclose(rhs), equal_to(True))


def test_matrices_over_different_algebras_do_not_combine():
    with pytest.raises(WrongAlgebra):
        AlgebraMatrix.identity(2, 1) @ AlgebraMatrix.identity(2, 2)


def test_entries_must_match_the_declared_shape():
    with pytest.raises(WrongAlgebra):
        AlgebraMatrix.from_entries([[1.0, 0.0]], 2, 2, 2)


def test_non_hermitian_matrix_is_rejected():
    with pytest.raises(NotHermitian):
        HermitianPD.from_matrix(AlgebraMatrix.from_real([[1.0, 2.0], [0.0, 1.0]]))


def test_indefinite_matrix_is_rejected():
    with pytest.raises(NotPositiveDefinite):
        HermitianPD.from_matrix(AlgebraMatrix.from_real([[1.0, 2.0], [2.0, 1.0]]))


def test_quaternion_eigenvalues_are_not_doubled():
    p = HermitianPD.from_diagonal([1.0, 3.0, 2.0], beta=4)
    eigenvalues = hermitian_eigenvalues(p)
    assert_that(np.allclose(eigenvalues, [3.0, 2.0, 1.0]), equal_to(True))


def test_leading_minor_dets_of_a_diagonal_matrix():
    p = HermitianPD.from_diagonal([5.0, 2.0], beta=2)
    assert_that(np.allclose(leading_minor_dets(p), [5.0, 10.0]), equal_to(True))


def test_real_trace_counts_algebra_rows():
    assert_that(AlgebraMatrix.identity(3, 4).real_trace(), equal_to(3.0))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_cholesky_factor_is_lower_and_reproduces_the_matrix(beta):
    p = random_hermitian_pd(np.random.default_rng(11), 3, beta)
    lower = cholesky_lower(p)
    assert_that(np.allclose(np.triu(lower.native, k=1), 0), equal_to(True))
    assert_that((lower @ lower.conj_transpose()).allclose(p.matrix), equal_to(True))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_square_root_squares_back(beta):
    p = random_hermitian_pd(np.random.default_rng(13), 3, beta)
    root = pd_sqrt(p).matrix
    assert_that((root @ root).allclose(p.matrix, rtol=1e-9), equal_to(True))


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    m=st.integers(min_value=1, max_value=4),
    beta=st.sampled_from([1, 2, 4]),
)
def test_log_det_matches_eigenvalues(seed, m, beta):
    p = random_hermitian_pd(np.random.default_rng(seed), m, beta)
    expected = float(np.sum(np.log(hermitian_eigenvalues(p))))
    assert_that(p.log_det(), close_to(expected, 1e-9 * max(1.0, abs(expected))))


def test_quaternion_embedding_is_a_homomorphism():
    generator = np.random.default_rng(31)
    a = random_matrix(generator, 2, 3, 4)
    b = random_matrix(generator, 3, 2, 4)
    c = random_matrix(generator, 2, 3, 4)
    product = quaternion_complex_embedding(a) @ quaternion_complex_embedding(b)
    assert_that(
        np.allclose(quaternion_complex_embedding(a @ b), product), equal_to(True)
    )
    total = quaternion_complex_embedding(a) + quaternion_complex_embedding(c)
    assert_that(
        np.allclose(quaternion_complex_embedding(a + c), total), equal_to(True)
    )
    assert_that(quaternion_complex_embedding(a).shape, equal_to((4, 6)))


@pytest.mark.parametrize("beta", [1, 2])
def test_embedding_needs_quaternions(beta):
    matrix = random_matrix(np.random.default_rng(0), 2, 2, beta)
    with pytest.raises(WrongAlgebra):
        quaternion_complex_embedding(matrix)


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_conjugate_transpose_is_an_exact_involution(beta):
    matrix = random_matrix(np.random.default_rng(5), 3, 2, beta)
    twice = matrix.conj_transpose().conj_transpose()
    assert_that(np.array_equal(twice.native, matrix.native), equal_to(True))
    assert_that(matrix.conj_transpose().shape, equal_to((2, 3)))


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    beta=st.sampled_from([1, 2, 4]),
)
def test_scalar_norm_is_multiplicative(seed, beta):
    generator = np.random.default_rng(seed)
    p = AlgebraScalar(tuple(generator.standard_normal(beta)))
    q = AlgebraScalar(tuple(generator.standard_normal(beta)))
    expected = p.norm() * q.norm()
    assert_that((p * q).norm(), close_to(expected, 1e-12 * max(1.0, expected)))
    square = p.norm() ** 2
    assert_that((p * p.conj()).norm(), close_to(square, 1e-12 * max(1.0, square)))
