"""Characteristic functions of type I Kotz-Riesz matrices.

The pairing is Re tr(X T*). Writing X = mu + theta^(1/2) H A G* with H a
uniform frame and A*A = R ~ Riesz-I(n beta/2, kappa, I), averaging over H
gives the series

    phi(T) = etr(i mu T*) sum_t sum_tau E[C_tau(B R)] / ([n beta/2]_tau t!)

with B = -(theta^(1/2) T G)*(theta^(1/2) T G)/4.
"""

import math
from dataclasses import dataclass
from logging import getLogger
from math import factorial
from typing import Tuple

import numpy as np

from .algebra import AlgebraMatrix, pd_sqrt, stacked_adjoint
from .distributions import KotzRieszParams, Variant
from .errors import (
    DegreeTooLarge,
    DomainViolation,
    MomentBudgetExceeded,
    UnsupportedVariant,
)
from .jack import DEFAULT_DEGREE_MAX, enumerate_partitions, jack_table
from .moments import (
    DEFAULT_NODE_BUDGET,
    MomentSpec,
    MonteCarloEstimate,
    congruence_eigenvalues,
    factor_expectation,
    riesz_moment_ctau,
)
from .samplers import DEFAULT_CHUNK_SIZE, RngStream, draw_stiefel_natives, sample_kr
from .special import gen_pochhammer

LOGGER = getLogger(__name__)


@dataclass(slots=True, frozen=True, eq=False)
class CfQuery:
    params: KotzRieszParams
    t: AlgebraMatrix
    t_max: int = DEFAULT_DEGREE_MAX

    def validate(self) -> "CfQuery":
        self.params.validate()
        if self.params.variant != Variant.TYPE_I:
            raise UnsupportedVariant("the series is available for type I only")
        if self.t.beta != self.params.beta.beta:
            raise DomainViolation(
                f"T has beta={self.t.beta}, params have beta={self.params.beta.beta}"
            )
        if self.t.shape != (self.params.n, self.params.m):
            raise DomainViolation(
                f"T has shape {self.t.shape}, expected {(self.params.n, self.params.m)}"
            )
        if not 0 <= self.t_max <= DEFAULT_DEGREE_MAX:
            raise DegreeTooLarge(f"t_max={self.t_max} exceeds {DEFAULT_DEGREE_MAX}")
        return self

    def series_argument(self) -> AlgebraMatrix:
        params = self.params
        u = pd_sqrt(params.theta).matrix @ self.t @ params.sigma_factor()
        return (u.conj_transpose() @ u).scaled(-0.25)


@dataclass(slots=True, frozen=True)
class CfValue:
    real: float
    imag: float
    tail: float
    converged: bool
    contributions: Tuple[float, ...]

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)


@dataclass(slots=True, frozen=True)
class CfEstimate:
    real: MonteCarloEstimate
    imag: MonteCarloEstimate

    @property
    def value(self) -> complex:
        return complex(self.real.mean, self.imag.mean)


def pairing(natives: np.ndarray, t: AlgebraMatrix) -> np.ndarray:
    """Re tr(X T*) for a stack of natives X."""
    products = natives @ stacked_adjoint(t.native)
    return np.trace(products, axis1=-2, axis2=-1).real / t.algebra.scale


def _degree_moments(query: CfQuery, degree: int, node_budget: int) -> np.ndarray:
    params = query.params
    beta, m = params.beta.beta, params.m
    argument = query.series_argument()
    partitions = enumerate_partitions(degree, m).partitions
    spec_template = dict(a=params.a, kappa=params.kappa, matrix=argument, beta=beta)
    if degree == 0 or m == 1 or params.kappa.equal_parts(m):
        return np.array(
            [
                riesz_moment_ctau(MomentSpec.of(tau=tau, **spec_template)).value
                for tau in partitions
            ]
        )
    table = jack_table(beta)

    def integrand(factors: np.ndarray) -> np.ndarray:
        eigs = congruence_eigenvalues(factors, argument.native, beta)
        return np.stack([table.evaluate(tau, eigs) for tau in partitions], axis=-1)

    moments, _ = factor_expectation(
        params.a, params.kappa, m, beta, degree, integrand, node_budget
    )
    return moments


def cf_kr1(query: CfQuery, node_budget: int = DEFAULT_NODE_BUDGET) -> CfValue:
    query.validate()
    params = query.params
    beta, m = params.beta.beta, params.m
    contributions = []
    truncated = False
    for degree in range(query.t_max + 1):
        try:
            moments = _degree_moments(query, degree, node_budget)
        except MomentBudgetExceeded as e:
            LOGGER.warning(
                "Characteristic function series truncated by the node budget",
                extra={"degree": degree, "node_budget": node_budget},
                exc_info=e,
            )
            truncated = True
            break
        total = 0.0
        for tau, moment in zip(enumerate_partitions(degree, m), moments):
            pochhammer = gen_pochhammer(params.a, tau, beta, m)
            total += moment / (pochhammer.value * factorial(degree))
        contributions.append(float(total))
    series = math.fsum(contributions)
    phase = float(pairing(params.mu.native[None], query.t)[0])
    converged = not truncated and (
        len(contributions) == 1 or not abs(contributions[-1]) > abs(contributions[-2])
    )
    if not converged and not truncated:
        LOGGER.warning(
            "Characteristic function series is still growing at t_max",
            extra={"t_max": query.t_max, "last": contributions[-1]},
        )
    return CfValue(
        real=series * math.cos(phase),
        imag=series * math.sin(phase),
        tail=abs(contributions[-1]),
        converged=converged,
        contributions=tuple(contributions),
    )


def _estimate(phases: np.ndarray) -> CfEstimate:
    return CfEstimate(
        real=MonteCarloEstimate.from_values(np.cos(phases)),
        imag=MonteCarloEstimate.from_values(np.sin(phases)),
    )


def mc_cf_estimate(
    params: KotzRieszParams,
    t: AlgebraMatrix,
    count: int,
    rng: RngStream,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> CfEstimate:
    CfQuery(params, t, 0).validate()
    batch = sample_kr(params, count, rng, chunk_size, workers)
    return _estimate(pairing(batch.natives, t))


def mc_stiefel_cf(t: AlgebraMatrix, count: int, rng: RngStream) -> CfEstimate:
    """Monte Carlo characteristic function of a uniform frame shaped like T."""
    frames = draw_stiefel_natives(t.rows, t.cols, t.beta, rng.generator, count)
    return _estimate(pairing(frames, t))
