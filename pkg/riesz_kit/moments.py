"""Expectations of Jack polynomials and generalized powers under Riesz type I laws.

For Y ~ Riesz-I(a, kappa, I) the generalized power moment is available in
closed form for every kappa. The Jack moment E[C_tau(AY)] has the closed
form only when the law of Y is unitarily invariant (m = 1 or kappa with
equal parts). Otherwise it is computed exactly by a product Gauss rule over
the triangular factor Y = T*T: Gauss-Hermite for the Gaussian entries and
generalized Gauss-Laguerre for the squared diagonal. The integrand is a
polynomial of known degree in those variables, so the rule is exact.
"""

import math
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln, roots_genlaguerre, roots_hermite

from .algebra import (
    SELF_ADJOINT_TOLERANCE,
    AlgebraMatrix,
    DivisionAlgebra,
    HermitianPD,
    native_from_components,
    self_adjoint_defect,
    stacked_adjoint,
    stacked_eigenvalues,
)
from .distributions import RieszParams, Variant
from .errors import InvalidParams, MomentBudgetExceeded
from .jack import jack_table
from .samplers import DEFAULT_CHUNK_SIZE, RngStream, riesz_factor_shapes, sample_riesz
from .special import (
    GammaDomain,
    Partition,
    PartitionLike,
    log_mv_gamma_weighted,
    log_q_kappa,
)

DEFAULT_NODE_BUDGET = 2_000_000
NODE_CHUNK = 65536

LOGGER = getLogger(__name__)


class MomentMethod(str, Enum):
    TRIVIAL = "trivial"
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(slots=True, frozen=True)
class MomentValue:
    value: float
    method: MomentMethod
    nodes: int = 0

    def __float__(self) -> float:
        return self.value


@dataclass(slots=True, frozen=True)
class MonteCarloEstimate:
    mean: float
    standard_error: float
    count: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MonteCarloEstimate":
        values = np.asarray(values, dtype=np.float64)
        count = len(values)
        if count < 2:
            return cls(float(np.mean(values)) if count else math.nan, math.inf, count)
        return cls(
            float(np.mean(values)),
            float(np.std(values, ddof=1) / math.sqrt(count)),
            count,
        )

    def sigmas_from(self, expected: float) -> float:
        if self.standard_error == 0:
            return 0.0 if self.mean == expected else math.inf
        return abs(self.mean - expected) / self.standard_error


@dataclass(slots=True, frozen=True, eq=False)
class MomentSpec:
    a: float
    kappa: Partition
    tau: Partition
    matrix: AlgebraMatrix
    beta: int

    @classmethod
    def of(
        cls,
        a: float,
        kappa: PartitionLike,
        tau: PartitionLike,
        matrix: Union[AlgebraMatrix, HermitianPD, None] = None,
        beta: int = 1,
        m: Optional[int] = None,
    ) -> "MomentSpec":
        if matrix is None:
            matrix = AlgebraMatrix.identity(m, beta)
        elif isinstance(matrix, HermitianPD):
            matrix = matrix.matrix
        return cls(
            float(a), Partition.coerce(kappa), Partition.coerce(tau), matrix, beta
        ).validate()

    @property
    def m(self) -> int:
        return self.matrix.rows

    def violations(self):
        problems = []
        if self.matrix.beta != self.beta:
            problems.append(f"matrix has beta={self.matrix.beta}, expected {self.beta}")
        if self.matrix.rows != self.matrix.cols:
            problems.append(f"matrix of shape {self.matrix.shape} is not square")
            return problems
        if self_adjoint_defect(self.matrix.native) > SELF_ADJOINT_TOLERANCE:
            problems.append("matrix is not self-adjoint")
        for name, partition in (("kappa", self.kappa), ("tau", self.tau)):
            if partition.length > self.m:
                problems.append(f"{name}={partition} has more than m={self.m} parts")
        if not problems:
            domain = GammaDomain.plus(self.a, self.kappa, self.m, self.beta)
            problems += domain.violations()
        return problems

    def validate(self) -> "MomentSpec":
        problems = self.violations()
        if problems:
            raise InvalidParams(problems)
        return self

    def log_gamma_ratio(self) -> float:
        shifted = GammaDomain.plus(self.a, self.kappa + self.tau, self.m, self.beta)
        base = GammaDomain.plus(self.a, self.kappa, self.m, self.beta)
        return log_mv_gamma_weighted(shifted) - log_mv_gamma_weighted(base)

    def closed_form_applies(self) -> bool:
        return self.m == 1 or self.kappa.equal_parts(self.m)


def _factor_rule(a: float, kappa: Partition, m: int, beta: int, degree: int):
    """One-dimensional rules for every independent variable of the factor T.

    The first m rules give the diagonal t_ii, the rest give the real
    components of the strictly upper entries in row-major order.
    """
    rules = []
    laguerre_nodes = (degree + 2) // 2
    for shape in riesz_factor_shapes(a, kappa, m, beta):
        x, w = roots_genlaguerre(laguerre_nodes, shape - 1)
        weights = np.exp(np.log(w) - gammaln(shape))
        rules.append((np.sqrt(x / beta), weights))
    x, w = roots_hermite(degree + 1)
    gaussian = (x / math.sqrt(beta), w / math.sqrt(math.pi))
    rules += [gaussian] * (beta * m * (m - 1) // 2)
    return rules


def factor_expectation(
    a: float,
    kappa: PartitionLike,
    m: int,
    beta: int,
    degree: int,
    integrand: Callable[[np.ndarray], np.ndarray],
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple:
    """Exact E[integrand(T)] for integrands of total degree <= degree in Y = T*T.

    ``integrand`` maps a stack of factor natives to an array whose first
    axis runs over the stack. Returns the expectation and the node count.
    """
    kappa = Partition.coerce(kappa)
    rules = _factor_rule(a, kappa, m, beta, degree)
    sizes = [len(nodes) for nodes, _ in rules]
    total = math.prod(sizes)
    if total > node_budget:
        raise MomentBudgetExceeded(
            f"product rule needs {total} nodes, budget is {node_budget}"
        )
    rows, cols = np.triu_indices(m, k=1)
    accumulated = None
    for start in range(0, total, NODE_CHUNK):
        flat = np.arange(start, min(start + NODE_CHUNK, total))
        index = np.unravel_index(flat, sizes)
        weights = np.ones(len(flat))
        values = []
        for (nodes, node_weights), position in zip(rules, index):
            values.append(nodes[position])
            weights = weights * node_weights[position]
        components = np.zeros((len(flat), m, m, beta))
        for i in range(m):
            components[:, i, i, 0] = values[i]
        if rows.size:
            gaussian = np.stack(values[m:], axis=-1).reshape(len(flat), rows.size, beta)
            components[:, rows, cols, :] = gaussian
        contribution = np.tensordot(
            weights, integrand(native_from_components(components, beta)), axes=1
        )
        if accumulated is None:
            accumulated = contribution
        else:
            accumulated = accumulated + contribution
    return accumulated, total


def congruence_eigenvalues(factors: np.ndarray, matrix_native: np.ndarray, beta: int):
    """Eigenvalues of T A T* for a stack of factors T, i.e. of A T*T."""
    congruence = factors @ matrix_native @ stacked_adjoint(factors)
    return stacked_eigenvalues(congruence, beta)


def riesz_moment_ctau(
    spec: MomentSpec, node_budget: int = DEFAULT_NODE_BUDGET
) -> MomentValue:
    spec.validate()
    if spec.tau.weight == 0:
        return MomentValue(1.0, MomentMethod.TRIVIAL)
    table = jack_table(spec.beta)
    table.check_degree(spec.tau)
    if spec.closed_form_applies():
        eigs = stacked_eigenvalues(spec.matrix.native, spec.beta)
        value = (
            spec.beta ** (-spec.tau.weight)
            * math.exp(spec.log_gamma_ratio())
            * table.evaluate(spec.tau, eigs)
        )
        return MomentValue(float(value), MomentMethod.CLOSED_FORM)

    def integrand(factors: np.ndarray) -> np.ndarray:
        eigs = congruence_eigenvalues(factors, spec.matrix.native, spec.beta)
        return table.evaluate(spec.tau, eigs)

    value, nodes = factor_expectation(
        spec.a, spec.kappa, spec.m, spec.beta, spec.tau.weight, integrand, node_budget
    )
    LOGGER.debug(
        "Computed Jack moment by product quadrature",
        extra={"tau": str(spec.tau), "kappa": str(spec.kappa), "nodes": nodes},
    )
    return MomentValue(float(value), MomentMethod.QUADRATURE, nodes)


def riesz_moment_qtau(spec: MomentSpec) -> float:
    """E[q_tau(L Y L*)] with L the lower Cholesky factor of `spec.matrix`.

    At the identity this is
    E[q_tau(Y)] = beta^-|tau| Gamma_m[a, kappa+tau] / Gamma_m[a, kappa].
    """
    spec.validate()
    weight = spec.tau.weight
    scale = 0.0
    if weight:
        scale = log_q_kappa(HermitianPD.from_matrix(spec.matrix), spec.tau)
    return math.exp(scale - weight * math.log(spec.beta) + spec.log_gamma_ratio())


def mc_riesz_moment_ctau(
    spec: MomentSpec,
    count: int,
    rng: RngStream,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> MonteCarloEstimate:
    spec.validate()
    params = RieszParams(
        Variant.TYPE_I,
        spec.a,
        spec.kappa,
        HermitianPD.identity(spec.m, spec.beta),
        DivisionAlgebra.of(spec.beta),
    )
    batch = sample_riesz(params, count, rng, chunk_size, workers)
    lower = np.linalg.cholesky(batch.natives)
    eigs = congruence_eigenvalues(stacked_adjoint(lower), spec.matrix.native, spec.beta)
    values = jack_table(spec.beta).evaluate(spec.tau, eigs)
    return MonteCarloEstimate.from_values(values)
