"""Jack polynomials C_tau in the normalization where sum_tau C_tau(X) = (tr X)^t.

Each polynomial is expanded in monomial symmetric functions. The expansion
of the monic polynomial P_kappa is built from the dominance-order recurrence
at Jack parameter alpha = 2/beta; the C-normalization then follows from the
triangular system sum_kappa d_kappa P_kappa = p_1^t. All coefficients are
exact rationals and do not depend on the number of variables.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from logging import getLogger
from math import factorial, prod
from threading import Lock
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .algebra import AlgebraMatrix, hermitian_eigenvalues
from .errors import DegreeTooLarge, DomainViolation, PochhammerZero
from .special import Partition, PartitionLike, gen_pochhammer

DEFAULT_DEGREE_MAX = 8
MAX_VARIABLES = 6

Parts = Tuple[int, ...]


def _partitions(t: int, max_parts: int, largest: int = None) -> Iterator[Parts]:
    if t == 0:
        yield ()
        return
    if max_parts == 0:
        return
    largest = t if largest is None else min(largest, t)
    for first in range(largest, 0, -1):
        for rest in _partitions(t - first, max_parts - 1, first):
            yield (first,) + rest


@dataclass(slots=True, frozen=True)
class PartitionSet:
    degree: int
    max_parts: int
    partitions: Tuple[Partition, ...]

    def __iter__(self) -> Iterator[Partition]:
        return iter(self.partitions)

    def __len__(self) -> int:
        return len(self.partitions)


@cache
def enumerate_partitions(t: int, m: int) -> PartitionSet:
    if t < 0 or m < 1:
        raise DomainViolation(f"need t >= 0 and m >= 1, got t={t}, m={m}")
    return PartitionSet(t, m, tuple(Partition(p) for p in _partitions(t, m)))


def _dominates(upper: Parts, lower: Parts) -> bool:
    upper_sum = lower_sum = 0
    for i in range(max(len(upper), len(lower))):
        upper_sum += upper[i] if i < len(upper) else 0
        lower_sum += lower[i] if i < len(lower) else 0
        if upper_sum < lower_sum:
            return False
    return True


def _rho(parts: Parts, beta: int) -> int:
    return sum(p * (p - 1 - beta * i) for i, p in enumerate(parts))


def _monic_coefficients(
    kappa: Parts, beta: int, candidates: Sequence[Parts]
) -> Dict[Parts, Fraction]:
    coefficients = {kappa: Fraction(1)}
    rho_kappa = _rho(kappa, beta)
    # candidates run in reverse lexicographic order, a linear extension of
    # dominance, so every raised partition is solved before it is needed.
    for lam in candidates:
        if lam == kappa or not _dominates(kappa, lam):
            continue
        total = Fraction(0)
        for i in range(len(lam)):
            for j in range(i + 1, len(lam)):
                for t in range(1, lam[j] + 1):
                    raised = list(lam)
                    raised[i] += t
                    raised[j] -= t
                    nu = tuple(sorted((p for p in raised if p), reverse=True))
                    coefficient = coefficients.get(nu)
                    if coefficient:
                        total += (lam[i] - lam[j] + 2 * t) * coefficient
        if total:
            coefficients[lam] = beta * total / (rho_kappa - _rho(lam, beta))
    return coefficients


def _normalised_degree(t: int, beta: int) -> Dict[Parts, Dict[Parts, Fraction]]:
    candidates = list(_partitions(t, t))
    monic = {
        kappa: _monic_coefficients(kappa, beta, candidates) for kappa in candidates
    }
    scale: Dict[Parts, Fraction] = {}
    for lam in candidates:
        target = Fraction(factorial(t), prod(factorial(p) for p in lam))
        for kappa, d in scale.items():
            target -= d * monic[kappa].get(lam, 0)
        scale[lam] = target
    return {
        kappa: {lam: scale[kappa] * c for lam, c in monic[kappa].items()}
        for kappa in candidates
    }


@cache
def _exponent_rows(lam: Parts, m: int) -> Tuple[Parts, ...]:
    padded = lam + (0,) * (m - len(lam))
    return tuple(sorted(set(_distinct_permutations(padded))))


def _distinct_permutations(values: Parts) -> Iterator[Parts]:
    if len(values) <= 1:
        yield values
        return
    for value in sorted(set(values)):
        rest = list(values)
        rest.remove(value)
        for tail in _distinct_permutations(tuple(rest)):
            yield (value,) + tail


def monomial_symmetric(lam: PartitionLike, eigs: np.ndarray) -> np.ndarray:
    lam = Partition.coerce(lam)
    eigs = np.asarray(eigs, dtype=np.float64)
    m = eigs.shape[-1]
    if lam.length > m:
        return np.zeros(eigs.shape[:-1])
    total = np.zeros(eigs.shape[:-1])
    for row in _exponent_rows(lam.parts, m):
        term = np.ones(eigs.shape[:-1])
        for i, exponent in enumerate(row):
            if exponent:
                term = term * eigs[..., i] ** exponent
        total = total + term
    return total


class JackTable:
    """Monomial expansions of C_tau for every |tau| <= degree_max at one beta."""

    def __init__(self, beta: int, degree_max: int = DEFAULT_DEGREE_MAX) -> None:
        self.beta = beta
        self.degree_max = degree_max
        self.logger = getLogger(self.__class__.__name__)
        self.coefficients: Dict[Partition, Dict[Partition, Fraction]] = {}
        for t in range(degree_max + 1):
            for kappa, expansion in _normalised_degree(t, beta).items():
                self.coefficients[Partition(kappa)] = {
                    Partition(lam): c for lam, c in expansion.items()
                }
        self._float_terms = {
            kappa: tuple((lam, float(c)) for lam, c in expansion.items())
            for kappa, expansion in self.coefficients.items()
        }
        self.logger.debug(
            "Built Jack table",
            extra={
                "beta": beta,
                "degree_max": degree_max,
                "size": len(self.coefficients),
            },
        )

    def check_degree(self, tau: Partition) -> None:
        if tau.weight > self.degree_max:
            raise DegreeTooLarge(
                f"|tau|={tau.weight} exceeds the table degree {self.degree_max}"
            )

    def coefficient(self, tau: PartitionLike, lam: PartitionLike) -> Fraction:
        tau = Partition.coerce(tau)
        self.check_degree(tau)
        return self.coefficients[tau].get(Partition.coerce(lam), Fraction(0))

    def evaluate(self, tau: PartitionLike, eigs) -> Union[float, np.ndarray]:
        tau = Partition.coerce(tau)
        self.check_degree(tau)
        eigs = np.asarray(eigs, dtype=np.float64)
        if eigs.shape[-1] > MAX_VARIABLES:
            raise DomainViolation(f"at most {MAX_VARIABLES} variables are supported")
        total = np.zeros(eigs.shape[:-1])
        if tau.length > eigs.shape[-1]:
            return total if total.ndim else 0.0
        for lam, coefficient in self._float_terms[tau]:
            if lam.length <= eigs.shape[-1]:
                total = total + coefficient * monomial_symmetric(lam, eigs)
        return total if total.ndim else float(total)

    def evaluate_degree(
        self, t: int, eigs
    ) -> Dict[Partition, Union[float, np.ndarray]]:
        eigs = np.asarray(eigs, dtype=np.float64)
        return {
            tau: self.evaluate(tau, eigs)
            for tau in enumerate_partitions(t, eigs.shape[-1])
        }


_TABLE_LOCK = Lock()


@cache
def _cached_table(beta: int, degree_max: int) -> JackTable:
    return JackTable(beta, degree_max)


def jack_table(beta: int, degree_max: int = DEFAULT_DEGREE_MAX) -> JackTable:
    with _TABLE_LOCK:
        return _cached_table(beta, degree_max)


def jack_C(tau: PartitionLike, eigs, beta: int) -> float:
    return jack_table(beta).evaluate(tau, eigs)


def jack_at_identity(tau: PartitionLike, m: int, beta: int) -> float:
    return jack_C(tau, np.ones(m), beta)


@dataclass(slots=True, frozen=True)
class HypergeometricSum:
    value: float
    tail: float
    converged: bool
    contributions: Tuple[float, ...]


def _eigenvalues_of(argument: Union[AlgebraMatrix, Sequence[float]]) -> np.ndarray:
    if isinstance(argument, AlgebraMatrix):
        return hermitian_eigenvalues(argument)
    return np.asarray(argument, dtype=np.float64)


def hyper_0F1(
    b: float,
    eigs: Union[AlgebraMatrix, Sequence[float]],
    beta: int,
    t_max: int = DEFAULT_DEGREE_MAX,
) -> HypergeometricSum:
    eigs = _eigenvalues_of(eigs)
    m = eigs.shape[-1]
    if t_max < 0:
        raise DomainViolation(f"t_max must be nonnegative, got {t_max}")
    if t_max > DEFAULT_DEGREE_MAX:
        raise DegreeTooLarge(f"t_max={t_max} exceeds {DEFAULT_DEGREE_MAX}")
    table = jack_table(beta)
    contributions: List[float] = []
    for t in range(t_max + 1):
        degree_total = 0.0
        for tau in enumerate_partitions(t, m):
            pochhammer = gen_pochhammer(b, tau, beta, m)
            if pochhammer.sign == 0:
                raise PochhammerZero(f"[{b}]_{tau} vanishes at beta={beta}")
            degree_total += table.evaluate(tau, eigs) / (
                pochhammer.value * factorial(t)
            )
        contributions.append(degree_total)
    converged = t_max == 0 or not abs(contributions[-1]) > abs(contributions[-2])
    return HypergeometricSum(
        value=float(sum(contributions)),
        tail=abs(contributions[-1]),
        converged=converged,
        contributions=tuple(contributions),
    )


def jack_C_batch(
    t: int, eigs: np.ndarray, beta: int
) -> Dict[Partition, np.ndarray]:
    """C_tau for every tau of weight t, evaluated on a stack of eigenvalue vectors."""
    return jack_table(beta).evaluate_degree(t, eigs)


def stiefel_cf_series(
    t: AlgebraMatrix, n: int, beta: int, t_max: int = DEFAULT_DEGREE_MAX
) -> HypergeometricSum:
    """Characteristic function of a uniform n x m frame, 0F1(n beta/2; -T*T/4)."""
    argument = (t.conj_transpose() @ t).scaled(-0.25)
    return hyper_0F1(n * beta / 2, argument, beta, t_max)
