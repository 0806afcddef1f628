"""Matrices over the real, complex and quaternion division algebras.

Every matrix is stored in its native numerical form: a real array for
beta=1, a complex array for beta=2 and, for beta=4, the interleaved complex
embedding where the quaternion q = a + b*j (a, b complex) becomes the 2x2
block [[a, b], [-conj(b), conj(a)]]. The embedding is an algebra
homomorphism, so products, inverses, Cholesky factors and square roots are
all computed on the native arrays.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, WrongAlgebra

SUPPORTED_BETAS = (1, 2, 4)
ALGEBRA_NAMES = {1: "real", 2: "complex", 4: "quaternion"}
SELF_ADJOINT_TOLERANCE = 1e-12
DEGENERATE_EIGENVALUE = 1e-300


@dataclass(slots=True, frozen=True)
class DivisionAlgebra:
    beta: int

    def __post_init__(self) -> None:
        if self.beta not in SUPPORTED_BETAS:
            raise WrongAlgebra(
                f"beta must be one of {SUPPORTED_BETAS}, got {self.beta!r}"
            )

    @classmethod
    def of(cls, beta: Union[int, "DivisionAlgebra"]) -> "DivisionAlgebra":
        if isinstance(beta, DivisionAlgebra):
            return beta
        if isinstance(beta, bool) or int(beta) != beta:
            raise WrongAlgebra(f"beta must be an integer, got {beta!r}")
        return cls(int(beta))

    @property
    def name(self) -> str:
        return ALGEBRA_NAMES[self.beta]

    @property
    def scale(self) -> int:
        """Rows of the native form per algebra row."""
        return 2 if self.beta == 4 else 1

    @property
    def dtype(self):
        return np.float64 if self.beta == 1 else np.complex128


def embed_quaternion(components: np.ndarray) -> np.ndarray:
    a = components[..., 0] + 1j * components[..., 1]
    b = components[..., 2] + 1j * components[..., 3]
    *lead, rows, cols = a.shape
    native = np.empty((*lead, 2 * rows, 2 * cols), dtype=np.complex128)
    native[..., 0::2, 0::2] = a
    native[..., 0::2, 1::2] = b
    native[..., 1::2, 0::2] = -np.conj(b)
    native[..., 1::2, 1::2] = np.conj(a)
    return native


def unembed_quaternion(native: np.ndarray) -> np.ndarray:
    # Both copies of each block are averaged, which projects rounding noise
    # back onto the image of the embedding.
    a = (native[..., 0::2, 0::2] + np.conj(native[..., 1::2, 1::2])) / 2
    b = (native[..., 0::2, 1::2] - np.conj(native[..., 1::2, 0::2])) / 2
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def native_from_components(components: np.ndarray, beta: int) -> np.ndarray:
    components = np.asarray(components, dtype=np.float64)
    if components.shape[-1] != beta:
        raise WrongAlgebra(
            f"entries need {beta} components, got {components.shape[-1]}"
        )
    if beta == 1:
        return components[..., 0].copy()
    if beta == 2:
        return components[..., 0] + 1j * components[..., 1]
    return embed_quaternion(components)


def components_from_native(native: np.ndarray, beta: int) -> np.ndarray:
    if beta == 1:
        return np.real(native)[..., None].astype(np.float64)
    if beta == 2:
        return np.stack([native.real, native.imag], axis=-1)
    return unembed_quaternion(native)


def stacked_adjoint(natives: np.ndarray) -> np.ndarray:
    return np.conj(natives).swapaxes(-1, -2)


def stacked_hermitian_part(natives: np.ndarray) -> np.ndarray:
    return (natives + stacked_adjoint(natives)) / 2


def stacked_eigenvalues(natives: np.ndarray, beta: int) -> np.ndarray:
    """Descending eigenvalues of a stack of self-adjoint natives."""
    eigenvalues = np.linalg.eigvalsh(stacked_hermitian_part(natives))[..., ::-1]
    if beta == 4:
        # The embedding doubles every eigenvalue.
        return eigenvalues[..., 0::2]
    return eigenvalues


def stacked_log_leading_minors(
    natives: np.ndarray, beta: int, count: int = None
) -> np.ndarray:
    scale = 2 if beta == 4 else 1
    dim = natives.shape[-1] // scale
    count = dim if count is None else count
    log_minors = np.empty(natives.shape[:-2] + (count,))
    for p in range(1, count + 1):
        block = natives[..., : p * scale, : p * scale]
        sign, log_det = np.linalg.slogdet(block)
        if np.any(np.real(sign) <= 0) or not np.all(np.isfinite(log_det)):
            raise NotPositiveDefinite(f"leading minor of order {p} is not positive")
        log_minors[..., p - 1] = log_det / scale
    return log_minors


def self_adjoint_defect(native: np.ndarray) -> float:
    norm = np.linalg.norm(native)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(native - stacked_adjoint(native)) / norm)


@dataclass(slots=True, frozen=True, eq=False)
class AlgebraMatrix:
    algebra: DivisionAlgebra
    native: np.ndarray

    @classmethod
    def from_native(cls, native, beta) -> "AlgebraMatrix":
        algebra = DivisionAlgebra.of(beta)
        native = np.asarray(native)
        if native.ndim != 2:
            raise WrongAlgebra(f"expected a 2-d array, got shape {native.shape}")
        if algebra.beta == 1 and np.iscomplexobj(native):
            if np.any(native.imag != 0):
                raise WrongAlgebra("complex entries in a real matrix")
            native = native.real
        if algebra.beta == 4:
            if native.shape[0] % 2 or native.shape[1] % 2:
                raise WrongAlgebra("quaternion natives need even dimensions")
            native = embed_quaternion(unembed_quaternion(native))
        native = np.array(native, dtype=algebra.dtype)
        native.setflags(write=False)
        return cls(algebra, native)

    @classmethod
    def from_components(cls, components, beta) -> "AlgebraMatrix":
        components = np.asarray(components, dtype=np.float64)
        if components.ndim != 3:
            raise WrongAlgebra(
                f"components must have shape (rows, cols, beta), got {components.shape}"
            )
        return cls.from_native(native_from_components(components, beta), beta)

    @classmethod
    def from_entries(
        cls, entries: Sequence[Sequence[float]], rows: int, cols: int, beta: int
    ) -> "AlgebraMatrix":
        components = np.asarray(entries, dtype=np.float64)
        if components.shape != (rows * cols, beta):
            raise WrongAlgebra(
                f"expected {rows * cols} entries of {beta} components, "
                f"got shape {components.shape}"
            )
        return cls.from_components(components.reshape(rows, cols, beta), beta)

    @classmethod
    def from_real(cls, values, beta: int = 1) -> "AlgebraMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        components = np.zeros(values.shape + (beta,))
        components[..., 0] = values
        return cls.from_components(components, beta)

    @classmethod
    def identity(cls, dim: int, beta: int = 1) -> "AlgebraMatrix":
        return cls.from_real(np.eye(dim), beta)

    @classmethod
    def zeros(cls, rows: int, cols: int, beta: int = 1) -> "AlgebraMatrix":
        return cls.from_real(np.zeros((rows, cols)), beta)

    @property
    def beta(self) -> int:
        return self.algebra.beta

    @property
    def rows(self) -> int:
        return self.native.shape[0] // self.algebra.scale

    @property
    def cols(self) -> int:
        return self.native.shape[1] // self.algebra.scale

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def components(self) -> np.ndarray:
        return components_from_native(self.native, self.beta)

    def entry(self, row: int, col: int) -> "AlgebraScalar":
        return AlgebraScalar(tuple(float(c) for c in self.components[row, col]))

    def conj_transpose(self) -> "AlgebraMatrix":
        return AlgebraMatrix.from_native(stacked_adjoint(self.native), self.beta)

    def inverse(self) -> "AlgebraMatrix":
        return AlgebraMatrix.from_native(np.linalg.inv(self.native), self.beta)

    def scaled(self, factor: float) -> "AlgebraMatrix":
        return AlgebraMatrix.from_native(self.native * float(factor), self.beta)

    def real_trace(self) -> float:
        return float(np.trace(self.native).real) / self.algebra.scale

    def allclose(self, other: "AlgebraMatrix", rtol=1e-10, atol=1e-12) -> bool:
        return self.beta == other.beta and np.allclose(
            self.native, other.native, rtol=rtol, atol=atol
        )

    def _check_partner(self, other: "AlgebraMatrix") -> None:
        if not isinstance(other, AlgebraMatrix):
            raise TypeError(f"cannot combine AlgebraMatrix with {type(other)!r}")
        if other.beta != self.beta:
            raise WrongAlgebra(
                f"cannot combine beta={self.beta} with beta={other.beta}"
            )

    def __matmul__(self, other: "AlgebraMatrix") -> "AlgebraMatrix":
        self._check_partner(other)
        return AlgebraMatrix.from_native(self.native @ other.native, self.beta)

    def __add__(self, other: "AlgebraMatrix") -> "AlgebraMatrix":
        self._check_partner(other)
        return AlgebraMatrix.from_native(self.native + other.native, self.beta)

    def __sub__(self, other: "AlgebraMatrix") -> "AlgebraMatrix":
        self._check_partner(other)
        return AlgebraMatrix.from_native(self.native - other.native, self.beta)

    def __neg__(self) -> "AlgebraMatrix":
        return self.scaled(-1.0)


@dataclass(slots=True, frozen=True)
class AlgebraScalar:
    components: tuple

    def __post_init__(self) -> None:
        DivisionAlgebra.of(len(self.components))

    @classmethod
    def from_matrix(cls, matrix: AlgebraMatrix) -> "AlgebraScalar":
        if matrix.shape != (1, 1):
            raise WrongAlgebra(f"expected a 1x1 matrix, got {matrix.shape}")
        return matrix.entry(0, 0)

    @property
    def beta(self) -> int:
        return len(self.components)

    def as_matrix(self) -> AlgebraMatrix:
        return AlgebraMatrix.from_components([[list(self.components)]], self.beta)

    def conj(self) -> "AlgebraScalar":
        head, *tail = self.components
        return AlgebraScalar((head, *(-c for c in tail)))

    def norm(self) -> float:
        return math.hypot(*self.components)

    def __mul__(self, other: "AlgebraScalar") -> "AlgebraScalar":
        return AlgebraScalar.from_matrix(self.as_matrix() @ other.as_matrix())


@dataclass(slots=True, frozen=True, eq=False)
class HermitianPD:
    matrix: AlgebraMatrix

    @classmethod
    def from_matrix(
        cls, matrix: AlgebraMatrix, tolerance: float = SELF_ADJOINT_TOLERANCE
    ) -> "HermitianPD":
        if matrix.rows != matrix.cols:
            raise NotHermitian(f"matrix of shape {matrix.shape} is not square")
        defect = self_adjoint_defect(matrix.native)
        if defect > tolerance:
            raise NotHermitian(
                f"self-adjointness defect {defect:.3e} exceeds {tolerance}"
            )
        native = stacked_hermitian_part(matrix.native)
        smallest = np.linalg.eigvalsh(native)[0]
        if not smallest > DEGENERATE_EIGENVALUE:
            raise NotPositiveDefinite(
                f"smallest eigenvalue {smallest:.3e} is not positive"
            )
        return cls(AlgebraMatrix.from_native(native, matrix.beta))

    @classmethod
    def identity(cls, dim: int, beta: int = 1) -> "HermitianPD":
        return cls(AlgebraMatrix.identity(dim, beta))

    @classmethod
    def from_diagonal(cls, values: Sequence[float], beta: int = 1) -> "HermitianPD":
        return cls.from_matrix(AlgebraMatrix.from_real(np.diag(values), beta))

    @property
    def dim(self) -> int:
        return self.matrix.rows

    @property
    def beta(self) -> int:
        return self.matrix.beta

    @property
    def native(self) -> np.ndarray:
        return self.matrix.native

    def inverse(self) -> "HermitianPD":
        return HermitianPD.from_matrix(self.matrix.inverse())

    def log_det(self) -> float:
        return float(log_leading_minor_dets(self)[-1])


def conj_transpose(matrix: AlgebraMatrix) -> AlgebraMatrix:
    return matrix.conj_transpose()


def cholesky_lower(p: HermitianPD) -> AlgebraMatrix:
    try:
        lower = np.linalg.cholesky(p.native)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite("Cholesky pivot is not positive") from e
    return AlgebraMatrix.from_native(lower, p.beta)


def pd_sqrt(p: HermitianPD) -> HermitianPD:
    eigenvalues, vectors = np.linalg.eigh(p.native)
    if not eigenvalues[0] > 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {eigenvalues[0]:.3e}")
    root = (vectors * np.sqrt(eigenvalues)) @ stacked_adjoint(vectors)
    return HermitianPD.from_matrix(AlgebraMatrix.from_native(root, p.beta))


def hermitian_eigenvalues(p: Union[HermitianPD, AlgebraMatrix]) -> np.ndarray:
    matrix = p.matrix if isinstance(p, HermitianPD) else p
    if matrix.rows != matrix.cols:
        raise NotHermitian(f"matrix of shape {matrix.shape} is not square")
    defect = self_adjoint_defect(matrix.native)
    if defect > SELF_ADJOINT_TOLERANCE:
        raise NotHermitian(f"self-adjointness defect {defect:.3e}")
    return stacked_eigenvalues(matrix.native, matrix.beta)


def log_leading_minor_dets(p: HermitianPD) -> np.ndarray:
    return stacked_log_leading_minors(p.native, p.beta)


def leading_minor_dets(p: HermitianPD) -> np.ndarray:
    return np.exp(log_leading_minor_dets(p))


def quaternion_complex_embedding(matrix: AlgebraMatrix) -> np.ndarray:
    if matrix.beta != 4:
        raise WrongAlgebra(f"embedding needs beta=4, got beta={matrix.beta}")
    return np.array(matrix.native)
