import math
import warnings
from dataclasses import dataclass
from logging import getLogger
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gammaln

from .algebra import AlgebraMatrix, HermitianPD
from .distributions import (
    KotzRieszParams,
    RieszParams,
    log_density_kr,
    log_density_riesz,
)
from .errors import DomainViolation, QuadratureFailure
from .special import LOG_PI, Partition

QUADRATURE_TOLERANCE = 1e-9
QUADRATURE_LIMIT = 200

QUADRATURE_KINDS = (
    "gamma_weighted",
    "gamma_weighted_inverse",
    "wishart_radial",
    "laplace_jack",
    "density_kr",
    "density_riesz",
)


@dataclass(slots=True, frozen=True)
class QuadratureValue:
    value: float
    expected: float
    error: float

    @property
    def relative_error(self) -> float:
        if self.expected == 0:
            return abs(self.value)
        return abs(self.value - self.expected) / abs(self.expected)


def integrate_half_line(
    integrand: Callable[[float], float], tolerance: float = QUADRATURE_TOLERANCE
) -> tuple:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error = quad(
                integrand, 0, np.inf, epsabs=0, epsrel=tolerance, limit=QUADRATURE_LIMIT
            )
        except IntegrationWarning as e:
            raise QuadratureFailure(f"quadrature did not reach {tolerance}") from e
    if not math.isfinite(value) or error > max(tolerance * abs(value), 1e-300):
        raise QuadratureFailure(
            f"quadrature error estimate {error:.3e} exceeds {tolerance} of {value:.6e}"
        )
    return value, error


class QuadratureOracle:
    """Scalar reductions of the cone integrals, evaluated on the half line.

    Each ``integrate_<kind>`` method returns the adaptive quadrature of the
    left-hand side together with its closed form.
    """

    def __init__(self, tolerance: float = QUADRATURE_TOLERANCE) -> None:
        self.tolerance = tolerance
        self.logger = getLogger(self.__class__.__name__)

    def integrate(self, kind: str, **params) -> QuadratureValue:
        if kind not in QUADRATURE_KINDS:
            raise DomainViolation(
                f"unknown quadrature kind {kind!r}, expected one of {QUADRATURE_KINDS}"
            )
        result = getattr(self, f"integrate_{kind}")(**params)
        self.logger.debug(
            "Evaluated quadrature oracle",
            extra={"kind": kind, "value": result.value, "expected": result.expected},
        )
        return result

    def _quad(self, integrand, expected: float) -> QuadratureValue:
        value, error = integrate_half_line(integrand, self.tolerance)
        return QuadratureValue(value, expected, error)

    def integrate_gamma_weighted(self, a: float, k: int = 0) -> QuadratureValue:
        shape = a + k
        if not shape > 0:
            raise DomainViolation(f"a + k = {shape} must be positive")
        return self._quad(
            lambda x: math.exp(-x + (shape - 1) * math.log(x)) if x > 0 else 0.0,
            math.exp(gammaln(shape)),
        )

    def integrate_gamma_weighted_inverse(self, a: float, k: int = 0) -> QuadratureValue:
        shape = a - k
        if not shape > 0:
            raise DomainViolation(f"a - k = {shape} must be positive")
        return self._quad(
            lambda x: math.exp(-x + (shape - 1) * math.log(x)) if x > 0 else 0.0,
            math.exp(gammaln(shape)),
        )

    def integrate_wishart_radial(
        self, n: int, beta: int = 1, c: float = 1.0
    ) -> QuadratureValue:
        half_dim = n * beta / 2
        log_sphere = math.log(2) + half_dim * LOG_PI - gammaln(half_dim)
        return self._quad(
            lambda rho: (
                math.exp(log_sphere + (2 * half_dim - 1) * math.log(rho) - c * rho**2)
                if rho > 0
                else 0.0
            ),
            math.exp(half_dim * LOG_PI - half_dim * math.log(c)),
        )

    def integrate_laplace_jack(
        self, a: float, t: int, u: float = 1.0, z: float = 1.0
    ) -> QuadratureValue:
        # C_(t)(x u) = (x u)^t for a single variable.
        if not (a > 0 and z > 0 and u > 0):
            raise DomainViolation("laplace_jack needs a, u and z positive")
        return self._quad(
            lambda x: (
                math.exp(-z * x + (a - 1) * math.log(x) + t * math.log(x * u))
                if x > 0
                else 0.0
            ),
            math.exp(t * math.log(u) + gammaln(a + t) - (a + t) * math.log(z)),
        )

    def integrate_density_kr(
        self,
        variant: str = "I",
        k: int = 0,
        n: int = 1,
        beta: int = 1,
        sigma: float = 1.0,
    ) -> QuadratureValue:
        """Total mass of an m = 1 Kotz-Riesz density, integrated radially."""
        params = KotzRieszParams.from_file_data(
            variant=variant,
            kappa=Partition.of(k),
            n=n,
            m=1,
            beta=beta,
            sigma=AlgebraMatrix.from_real([[sigma]], beta),
        ).validate()
        half_dim = n * beta / 2
        log_area = half_dim * LOG_PI - gammaln(half_dim)
        point = np.zeros((n, 1))

        def integrand(r: float) -> float:
            if r <= 0:
                return 0.0
            point[0, 0] = math.sqrt(r)
            log_density = log_density_kr(params, AlgebraMatrix.from_real(point, beta))
            return math.exp(log_area + (half_dim - 1) * math.log(r) + log_density)

        return self._quad(integrand, 1.0)

    def integrate_density_riesz(
        self,
        variant: str = "I",
        a: float = 1.0,
        k: int = 0,
        beta: int = 1,
        sigma: float = 1.0,
    ) -> QuadratureValue:
        params = RieszParams.from_file_data(
            variant=variant,
            a=a,
            kappa=Partition.of(k),
            beta=beta,
            sigma=AlgebraMatrix.from_real([[sigma]], beta),
        ).validate()

        def integrand(y: float) -> float:
            if y <= 0:
                return 0.0
            point = HermitianPD(AlgebraMatrix.from_real([[y]], beta))
            return math.exp(log_density_riesz(params, point))

        return self._quad(integrand, 1.0)


def quadrature_oracle_1d(
    kind: str, tolerance: float = QUADRATURE_TOLERANCE, **params
) -> QuadratureValue:
    return QuadratureOracle(tolerance).integrate(kind, **params)
