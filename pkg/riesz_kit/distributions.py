from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .algebra import (
    AlgebraMatrix,
    DivisionAlgebra,
    HermitianPD,
    cholesky_lower,
    pd_sqrt,
    stacked_adjoint,
    stacked_hermitian_part,
)
from .errors import (
    DomainViolation,
    InvalidParams,
    NotPositiveDefinite,
    UnsupportedVariant,
    WrongAlgebra,
)
from .special import (
    LOG_PI,
    GammaDomain,
    Partition,
    PartitionLike,
    log_mv_gamma,
    log_mv_gamma_weighted,
    log_q_kappa,
    stacked_log_q_kappa,
)


MatrixLike = Union[AlgebraMatrix, HermitianPD]


class Variant(str, Enum):
    TYPE_I = "I"
    TYPE_II = "II"

    @classmethod
    def parse(cls, value: Union[str, int, "Variant"]) -> "Variant":
        if isinstance(value, Variant):
            return value
        text = str(value).strip().upper().removeprefix("TYPE").strip(" _")
        aliases = {
            "I": cls.TYPE_I,
            "1": cls.TYPE_I,
            "II": cls.TYPE_II,
            "2": cls.TYPE_II,
        }
        if text not in aliases:
            raise InvalidParams([f"unknown variant {value!r}, expected I or II"])
        return aliases[text]


class SigmaFactorConvention(str, Enum):
    SYMMETRIC_ROOT = "symmetric_root"
    CHOLESKY_LOWER = "cholesky_lower"

    @classmethod
    def parse(
        cls, value: Union[str, "SigmaFactorConvention"]
    ) -> "SigmaFactorConvention":
        try:
            return cls(value)
        except ValueError as e:
            raise InvalidParams(
                [f"unknown sigma_factor_convention {value!r}"]
            ) from e

    def factor(self, sigma: HermitianPD) -> AlgebraMatrix:
        if self == SigmaFactorConvention.SYMMETRIC_ROOT:
            return pd_sqrt(sigma).matrix
        return cholesky_lower(sigma)


def _as_hermitian_pd(value: Optional[MatrixLike], dim: int, beta: int) -> HermitianPD:
    if value is None:
        return HermitianPD.identity(dim, beta)
    if isinstance(value, HermitianPD):
        return value
    return HermitianPD.from_matrix(value)


def _variant_bound(variant: Variant, kappa: Partition, m: int, beta: int) -> float:
    base = (m - 1) * beta / 2
    if variant == Variant.TYPE_I:
        return base - (kappa.padded(m)[-1] if kappa.length <= m else 0)
    return base + kappa.first


def _shape_violation(name: str, matrix: MatrixLike, shape, beta: int) -> List[str]:
    matrix = matrix.matrix if isinstance(matrix, HermitianPD) else matrix
    problems = []
    if matrix.beta != beta:
        problems.append(f"{name} has beta={matrix.beta}, expected beta={beta}")
    if matrix.shape != shape:
        problems.append(f"{name} has shape {matrix.shape}, expected {shape}")
    return problems


def _kernel_log_q(natives: np.ndarray, beta: int, kappa: Partition, inverted: bool):
    if kappa.weight == 0:
        return np.zeros(natives.shape[:-2])
    if inverted:
        try:
            natives = stacked_hermitian_part(np.linalg.inv(natives))
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefinite("argument of q_kappa is singular") from e
    return stacked_log_q_kappa(natives, beta, kappa)


@dataclass(slots=True, frozen=True, eq=False)
class KotzRieszParams:
    variant: Variant
    kappa: Partition
    n: int
    m: int
    beta: DivisionAlgebra
    mu: AlgebraMatrix
    theta: HermitianPD
    sigma: HermitianPD
    sigma_factor_convention: SigmaFactorConvention = (
        SigmaFactorConvention.CHOLESKY_LOWER
    )

    @classmethod
    def spherical(
        cls,
        variant: Union[str, Variant],
        kappa: PartitionLike,
        n: int,
        m: int,
        beta: int,
        sigma_factor_convention: Union[str, SigmaFactorConvention] = "cholesky_lower",
    ) -> "KotzRieszParams":
        return cls.from_file_data(
            variant=variant,
            kappa=kappa,
            n=n,
            m=m,
            beta=beta,
            sigma_factor_convention=sigma_factor_convention,
        )

    @classmethod
    def from_file_data(
        cls,
        variant: Union[str, Variant],
        kappa: PartitionLike,
        n: int,
        m: int,
        beta: int,
        mu: Optional[AlgebraMatrix] = None,
        theta: Optional[MatrixLike] = None,
        sigma: Optional[MatrixLike] = None,
        sigma_factor_convention: Union[str, SigmaFactorConvention] = "cholesky_lower",
        family: str = "kotz_riesz",
    ) -> "KotzRieszParams":
        if family != "kotz_riesz":
            raise InvalidParams([f"family {family!r} is not kotz_riesz"])
        algebra = DivisionAlgebra.of(beta)
        n, m = int(n), int(m)
        if n < 1 or m < 1:
            raise InvalidParams([f"dimensions must be positive, got n={n}, m={m}"])
        return cls(
            variant=Variant.parse(variant),
            kappa=Partition.coerce(kappa),
            n=n,
            m=m,
            beta=algebra,
            mu=AlgebraMatrix.zeros(n, m, algebra.beta) if mu is None else mu,
            theta=_as_hermitian_pd(theta, n, algebra.beta),
            sigma=_as_hermitian_pd(sigma, m, algebra.beta),
            sigma_factor_convention=SigmaFactorConvention.parse(
                sigma_factor_convention
            ),
        )

    def violations(self) -> List[str]:
        beta = self.beta.beta
        problems = []
        if self.n < self.m:
            problems.append(f"n={self.n} must be at least m={self.m}")
        if self.kappa.length > self.m:
            problems.append(f"kappa={self.kappa} has more than m={self.m} parts")
        else:
            bound = _variant_bound(self.variant, self.kappa, self.m, beta)
            if not self.n * beta / 2 > bound:
                problems.append(
                    f"variant {self.variant.value} needs n*beta/2={self.n * beta / 2} "
                    f"> {bound}"
                )
        problems += _shape_violation("mu", self.mu, (self.n, self.m), beta)
        problems += _shape_violation("theta", self.theta, (self.n, self.n), beta)
        problems += _shape_violation("sigma", self.sigma, (self.m, self.m), beta)
        return problems

    def validate(self) -> "KotzRieszParams":
        problems = self.violations()
        if problems:
            raise InvalidParams(problems)
        return self

    def sigma_factor(self) -> AlgebraMatrix:
        return self.sigma_factor_convention.factor(self.sigma)

    @property
    def a(self) -> float:
        return self.n * self.beta.beta / 2

    def log_normalizer(self) -> float:
        beta, m, n = self.beta.beta, self.m, self.n
        weight = self.kappa.weight
        if self.variant == Variant.TYPE_I:
            log_beta_power = m * n * beta / 2 + weight
            domain = GammaDomain.plus(self.a, self.kappa, m, beta)
        else:
            log_beta_power = m * n * beta / 2 - weight
            domain = GammaDomain.minus(self.a, self.kappa, m, beta)
        return (
            log_beta_power * np.log(beta)
            + log_mv_gamma(self.a, m, beta)
            - m * n * beta / 2 * LOG_PI
            - log_mv_gamma_weighted(domain)
            - m * beta / 2 * self.theta.log_det()
            - n * beta / 2 * self.sigma.log_det()
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "family": "kotz_riesz",
            "variant": self.variant.value,
            "kappa": list(self.kappa.parts),
            "n": self.n,
            "m": self.m,
            "beta": self.beta.beta,
            "sigma_factor_convention": self.sigma_factor_convention.value,
            "mu": self.mu.components.tolist(),
            "theta": self.theta.matrix.components.tolist(),
            "sigma": self.sigma.matrix.components.tolist(),
        }


@dataclass(slots=True, frozen=True, eq=False)
class RieszParams:
    variant: Variant
    a: float
    kappa: Partition
    sigma: HermitianPD
    beta: DivisionAlgebra

    @classmethod
    def from_file_data(
        cls,
        variant: Union[str, Variant],
        a: float,
        kappa: PartitionLike,
        beta: int,
        sigma: Optional[MatrixLike] = None,
        m: Optional[int] = None,
        family: str = "riesz",
    ) -> "RieszParams":
        if family != "riesz":
            raise InvalidParams([f"family {family!r} is not riesz"])
        algebra = DivisionAlgebra.of(beta)
        if sigma is None and m is None:
            raise InvalidParams(["riesz parameters need sigma or m"])
        dim = int(m) if sigma is None else None
        return cls(
            variant=Variant.parse(variant),
            a=float(a),
            kappa=Partition.coerce(kappa),
            sigma=_as_hermitian_pd(sigma, dim, algebra.beta),
            beta=algebra,
        )

    @property
    def m(self) -> int:
        return self.sigma.dim

    def violations(self) -> List[str]:
        beta = self.beta.beta
        problems = _shape_violation("sigma", self.sigma, (self.m, self.m), beta)
        if self.kappa.length > self.m:
            problems.append(f"kappa={self.kappa} has more than m={self.m} parts")
            return problems
        bound = _variant_bound(self.variant, self.kappa, self.m, beta)
        if not self.a > bound:
            problems.append(f"variant {self.variant.value} needs a={self.a} > {bound}")
        return problems

    def validate(self) -> "RieszParams":
        problems = self.violations()
        if problems:
            raise InvalidParams(problems)
        return self

    def gamma_domain(self) -> GammaDomain:
        if self.variant == Variant.TYPE_I:
            return GammaDomain.plus(self.a, self.kappa, self.m, self.beta.beta)
        return GammaDomain.minus(self.a, self.kappa, self.m, self.beta.beta)

    def log_normalizer(self) -> float:
        beta, m = self.beta.beta, self.m
        weight = self.kappa.weight
        if self.variant == Variant.TYPE_I:
            sigma_weight = log_q_kappa(self.sigma, self.kappa) if weight else 0.0
            power = self.a * m + weight
        else:
            # Y = U Z U* with U upper triangular and U U* = Sigma pulls out
            # q_kappa(Sigma^-1) for every Sigma.
            sigma_weight = (
                log_q_kappa(self.sigma.inverse(), self.kappa) if weight else 0.0
            )
            power = self.a * m - weight
        return (
            power * np.log(beta)
            - log_mv_gamma_weighted(self.gamma_domain())
            - self.a * self.sigma.log_det()
            - sigma_weight
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "family": "riesz",
            "variant": self.variant.value,
            "a": self.a,
            "kappa": list(self.kappa.parts),
            "beta": self.beta.beta,
            "sigma": self.sigma.matrix.components.tolist(),
        }


Params = Union[KotzRieszParams, RieszParams]


def validate(params: Params) -> Params:
    return params.validate()


def stacked_log_density_kr(params: KotzRieszParams, natives: np.ndarray) -> np.ndarray:
    """Log densities of a stack of natives; the params are assumed validated."""
    deviation = natives - params.mu.native
    theta_inverse = np.linalg.inv(params.theta.native)
    gram = stacked_adjoint(deviation) @ theta_inverse @ deviation
    factor_inverse = np.linalg.inv(params.sigma_factor().native)
    standardized = stacked_hermitian_part(
        factor_inverse @ gram @ stacked_adjoint(factor_inverse)
    )
    trace = np.trace(standardized, axis1=-2, axis2=-1).real / params.beta.scale
    inverted = params.variant == Variant.TYPE_II
    log_q = _kernel_log_q(standardized, params.beta.beta, params.kappa, inverted)
    return params.log_normalizer() - params.beta.beta * trace + log_q


def log_density_kr(params: KotzRieszParams, x: AlgebraMatrix) -> float:
    params.validate()
    beta = params.beta.beta
    if x.beta != beta:
        raise WrongAlgebra(f"point has beta={x.beta}, params have beta={beta}")
    if x.shape != (params.n, params.m):
        raise DomainViolation(
            f"point has shape {x.shape}, expected {(params.n, params.m)}"
        )
    return float(stacked_log_density_kr(params, x.native))


def stacked_log_density_riesz(params: RieszParams, natives: np.ndarray) -> np.ndarray:
    beta, m = params.beta.beta, params.m
    sigma_inverse = np.linalg.inv(params.sigma.native)
    trace = np.trace(sigma_inverse @ natives, axis1=-2, axis2=-1).real
    trace = trace / params.beta.scale
    log_det = np.linalg.slogdet(natives)[1] / params.beta.scale
    inverted = params.variant == Variant.TYPE_II
    log_q = _kernel_log_q(natives, beta, params.kappa, inverted)
    return (
        params.log_normalizer()
        - beta * trace
        + (params.a - (m - 1) * beta / 2 - 1) * log_det
        + log_q
    )


def log_density_riesz(params: RieszParams, y: HermitianPD) -> float:
    params.validate()
    beta, m = params.beta.beta, params.m
    if y.beta != beta:
        raise WrongAlgebra(f"point has beta={y.beta}, params have beta={beta}")
    if y.dim != m:
        raise DomainViolation(f"point has dimension {y.dim}, expected {m}")
    return float(stacked_log_density_riesz(params, y.native))


def matrix_normal_params(
    mu: AlgebraMatrix,
    theta: Optional[MatrixLike] = None,
    sigma: Optional[MatrixLike] = None,
) -> KotzRieszParams:
    """The weight-zero member with Sigma doubled.

    For beta=1 this is the matrix normal law with row covariance theta and
    column covariance sigma.
    """
    n, m = mu.shape
    sigma = _as_hermitian_pd(sigma, m, mu.beta)
    return KotzRieszParams.from_file_data(
        variant=Variant.TYPE_I,
        kappa=Partition.zero(),
        n=n,
        m=m,
        beta=mu.beta,
        mu=mu,
        theta=theta,
        sigma=HermitianPD.from_matrix(sigma.matrix.scaled(2.0)),
    )


def kotz_type_params(
    exponent: int,
    r: float,
    mu: AlgebraMatrix,
    theta: Optional[MatrixLike] = None,
    sigma: Optional[MatrixLike] = None,
    variant: Union[str, Variant] = Variant.TYPE_I,
) -> KotzRieszParams:
    """Kotz type law with density proportional to |W|^exponent etr(-beta r W)."""
    if not r > 0:
        raise InvalidParams([f"r={r} must be positive"])
    n, m = mu.shape
    sigma = _as_hermitian_pd(sigma, m, mu.beta)
    return KotzRieszParams.from_file_data(
        variant=variant,
        kappa=Partition((int(exponent),) * m),
        n=n,
        m=m,
        beta=mu.beta,
        mu=mu,
        theta=theta,
        sigma=HermitianPD.from_matrix(sigma.matrix.scaled(1.0 / r)),
    )


def _is_diagonal(p: HermitianPD) -> bool:
    native = p.native
    return bool(np.all(native == np.diag(np.diag(native))))


def riesz_pushforward_params(params: KotzRieszParams) -> RieszParams:
    """Law of X* theta^-1 X for a centred Kotz-Riesz matrix X."""
    params.validate()
    if np.any(params.mu.native != 0):
        raise DomainViolation("the pushforward needs mu = 0")
    conjugation_free = params.kappa.equal_parts(params.m) or _is_diagonal(params.sigma)
    if params.variant == Variant.TYPE_II and not conjugation_free:
        raise UnsupportedVariant(
            "variant II pushforward needs diagonal sigma or equal parts"
        )
    if (
        params.sigma_factor_convention == SigmaFactorConvention.SYMMETRIC_ROOT
        and not conjugation_free
    ):
        raise DomainViolation(
            "the symmetric_root convention has no Riesz pushforward for this kappa"
        )
    return RieszParams(
        variant=params.variant,
        a=params.a,
        kappa=params.kappa,
        sigma=params.sigma,
        beta=params.beta,
    )


def with_convention(
    params: KotzRieszParams, convention: Union[str, SigmaFactorConvention]
) -> KotzRieszParams:
    return replace(
        params, sigma_factor_convention=SigmaFactorConvention.parse(convention)
    )
