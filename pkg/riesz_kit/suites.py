"""Pre-registered validation suites.

Every suite returns a flat list of checks. Random draws come from
``RngStream(seed, stream_id).derive(index)`` where ``stream_id`` is fixed per
suite and ``index`` per check group, so one suite can be rerun on its own and
reproduce the numbers it produced inside ``all``.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.special
import scipy.stats

from .algebra import (
    SUPPORTED_BETAS,
    AlgebraMatrix,
    HermitianPD,
    cholesky_lower,
    components_from_native,
    hermitian_eigenvalues,
    native_from_components,
    pd_sqrt,
    stacked_adjoint,
    stacked_eigenvalues,
    stacked_hermitian_part,
)
from .characteristic import CfQuery, cf_kr1, mc_cf_estimate, mc_stiefel_cf, pairing
from .distributions import (
    KotzRieszParams,
    RieszParams,
    log_density_kr,
    log_density_riesz,
    matrix_normal_params,
    riesz_pushforward_params,
    stacked_log_density_kr,
    stacked_log_density_riesz,
    with_convention,
)
from .errors import DomainError, DomainViolation
from .goodness import ks_two_way
from .jack import (
    enumerate_partitions,
    hyper_0F1,
    jack_at_identity,
    jack_C,
    jack_C_batch,
    jack_table,
    stiefel_cf_series,
)
from .moments import (
    MomentSpec,
    MonteCarloEstimate,
    congruence_eigenvalues,
    factor_expectation,
    mc_riesz_moment_ctau,
    riesz_moment_ctau,
    riesz_moment_qtau,
)
from .quadrature import QuadratureOracle
from .report import Check, RunReport, ToleranceKind
from .samplers import (
    ALGORITHM_ID,
    RngStream,
    draw_riesz_factor_natives,
    draw_stiefel_natives,
    sample_kr,
    sample_riesz,
)
from .settings import ValidationSettings
from .special import (
    GammaDomain,
    Partition,
    gen_pochhammer,
    log_mv_gamma,
    log_mv_gamma_weighted,
    log_q_kappa,
    q_kappa_exponents,
    stacked_log_q_kappa,
    stiefel_log_volume,
)

SUITES = ("specialfun", "jack", "densities", "samplers", "moments", "cf")
SUITE_NAMES = SUITES + ("all",)
SUITE_STREAM_IDS = {name: index + 1 for index, name in enumerate(SUITES)}

GAMMA_GRID_POINTS = 10
MAX_GAMMA_WEIGHT = 4
MAX_JACK_DEGREE = 8
JACK_MATRICES = 20
CF_CASES = ((1, 2, 1, (1,)), (2, 3, 1, (1, 0)), (2, 4, 2, (1, 0)))
CF_SCALES = (0.2, 0.4, 0.6, 0.8, 1.0)
CF_SERIES_RTOL = 1e-8


@dataclass(slots=True, frozen=True)
class CfSelection:
    """Restricts the characteristic function suite to one (m, n, beta, kappa) case."""

    m: Optional[int] = None
    n: Optional[int] = None
    beta: Optional[int] = None
    kappa: Optional[Partition] = None

    @property
    def empty(self) -> bool:
        return all(value is None for value in (self.m, self.n, self.beta, self.kappa))

    def matches(self, m: int, n: int, beta: int, kappa: Partition) -> bool:
        return (
            (self.m is None or self.m == m)
            and (self.n is None or self.n == n)
            and (self.beta is None or self.beta == beta)
            and (self.kappa is None or self.kappa == kappa)
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "n": self.n,
            "beta": self.beta,
            "kappa": None if self.kappa is None else list(self.kappa.parts),
        }


def log_relative_error(lhs: float, rhs: float) -> float:
    """Relative error of exp(lhs) against exp(rhs)."""
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return math.inf
    return math.expm1(abs(lhs - rhs))


def relative_error(observed: float, expected: float) -> float:
    return abs(observed - expected) / max(abs(expected), 1e-300)


def random_hermitian_pd(
    generator: np.random.Generator, m: int, beta: int
) -> HermitianPD:
    gaussian = native_from_components(generator.standard_normal((m, m, beta)), beta)
    native = gaussian @ stacked_adjoint(gaussian) / m + 0.5 * np.eye(gaussian.shape[-1])
    return HermitianPD.from_matrix(AlgebraMatrix.from_native(native, beta))


def random_lower_triangular(
    generator: np.random.Generator, m: int, beta: int
) -> AlgebraMatrix:
    components = np.zeros((m, m, beta))
    rows, cols = np.tril_indices(m, k=-1)
    components[rows, cols, :] = 0.3 * generator.standard_normal((rows.size, beta))
    components[np.arange(m), np.arange(m), 0] = generator.uniform(0.5, 1.5, m)
    return AlgebraMatrix.from_components(components, beta)


def random_matrix(generator: np.random.Generator, rows: int, cols: int, beta: int):
    return AlgebraMatrix.from_components(
        generator.standard_normal((rows, cols, beta)), beta
    )


def congruence(lower: AlgebraMatrix, p: HermitianPD) -> HermitianPD:
    return HermitianPD.from_matrix(lower @ p.matrix @ lower.conj_transpose())


def reflected_log_q_inverse(p: HermitianPD, kappa: Partition) -> float:
    """log q_kappa(P^-1) from trailing principal minors of P."""
    m, scale = p.dim, p.matrix.algebra.scale
    log_det = p.log_det()
    total = 0.0
    for order, exponent in enumerate(q_kappa_exponents(kappa, m), start=1):
        if not exponent:
            continue
        log_trailing = 0.0
        if order < m:
            trailing = p.native[order * scale :, order * scale :]
            log_trailing = float(np.linalg.slogdet(trailing)[1]) / scale
        total += exponent * (log_trailing - log_det)
    return total


def grid_label(**labels: Any) -> str:
    return ",".join(f"{key}={value}" for key, value in labels.items())


class SuiteRunner:
    def __init__(
        self,
        settings: Optional[ValidationSettings] = None,
        selection: Optional[CfSelection] = None,
    ) -> None:
        self.settings = settings or ValidationSettings()
        self.selection = selection or CfSelection()
        self.notes: Dict[str, Any] = {}
        self.logger = getLogger(self.__class__.__name__)

    def run(self, suite: str) -> List[Check]:
        if suite not in SUITE_NAMES:
            raise DomainViolation(
                f"unknown suite {suite!r}, expected one of {SUITE_NAMES}"
            )
        if suite == "all":
            return [check for name in SUITES for check in self.run(name)]
        self.logger.info(
            "Running validation suite",
            extra={"suite": suite, "seed": self.settings.seed},
        )
        checks = getattr(self, f"run_{suite}")()
        self.logger.info(
            "Finished validation suite",
            extra={
                "suite": suite,
                "checks": len(checks),
                "failed": sum(not check.passed for check in checks),
            },
        )
        return checks

    def stream(self, suite: str, index: int) -> RngStream:
        return RngStream(self.settings.seed, SUITE_STREAM_IDS[suite]).derive(index)

    def generator(self, suite: str, index: int) -> np.random.Generator:
        return self.stream(suite, index).generator

    def _sampling(self) -> Dict[str, int]:
        return {
            "chunk_size": self.settings.chunk_size,
            "workers": self.settings.workers,
        }

    # specialfun

    def run_specialfun(self) -> List[Check]:
        return [
            *self._gamma_identities(),
            *self._q_kappa_properties(),
            *self._quadrature_oracles(),
            *self._special_values(),
        ]

    def _gamma_identities(self) -> List[Check]:
        checks = []
        tolerance = self.settings.identity_rtol
        for m in range(1, 5):
            for beta in SUPPORTED_BETAS:
                base = (m - 1) * beta / 2
                plus_errors, minus_errors = [], []
                for weight in range(MAX_GAMMA_WEIGHT + 1):
                    for kappa in enumerate_partitions(weight, m):
                        for j in range(GAMMA_GRID_POINTS):
                            a = base + 0.25 + 0.6 * j
                            plus = log_mv_gamma_weighted(
                                GammaDomain.plus(a, kappa, m, beta)
                            )
                            pochhammer = gen_pochhammer(a, kappa, beta, m)
                            plus_errors.append(
                                log_relative_error(
                                    plus, pochhammer.log_abs + log_mv_gamma(a, m, beta)
                                )
                            )
                            a = base + kappa.first + 0.25 + 0.6 * j
                            minus = log_mv_gamma_weighted(
                                GammaDomain.minus(a, kappa, m, beta)
                            )
                            reflected = gen_pochhammer(-a + base + 1, kappa, beta, m)
                            error = log_relative_error(
                                minus + reflected.log_abs, log_mv_gamma(a, m, beta)
                            )
                            if reflected.sign != (-1) ** kappa.weight:
                                error = math.inf
                            minus_errors.append(error)
                label = grid_label(m=m, beta=beta)
                checks.append(
                    Check.max_error(f"gamma_plus[{label}]", plus_errors, tolerance)
                )
                checks.append(
                    Check.max_error(f"gamma_minus[{label}]", minus_errors, tolerance)
                )
        return checks

    def _q_kappa_properties(self) -> List[Check]:
        checks = []
        generator = self.generator("specialfun", 1)
        tolerance = self.settings.qkappa_rtol
        for m in range(1, 5):
            partitions = [k for t in range(1, 4) for k in enumerate_partitions(t, m)]
            for beta in SUPPORTED_BETAS:
                errors = defaultdict(list)
                for _ in range(self.settings.random_matrices):
                    self._q_kappa_case(generator, m, beta, partitions, errors)
                label = grid_label(m=m, beta=beta)
                checks += [
                    Check.max_error(f"{name}[{label}]", values, tolerance)
                    for name, values in sorted(errors.items())
                ]
        return checks

    def _q_kappa_case(self, generator, m, beta, partitions, errors) -> None:
        def pick() -> Partition:
            return partitions[int(generator.integers(len(partitions)))]

        p = random_hermitian_pd(generator, m, beta)
        kappa, tau = pick(), pick()
        log_q = log_q_kappa(p, kappa)

        errors["qkappa_inverse_reflected"].append(
            log_relative_error(
                log_q_kappa(p.inverse(), kappa), reflected_log_q_inverse(p, kappa)
            )
        )
        diagonal = HermitianPD.from_diagonal(generator.uniform(0.5, 2.0, m), beta)
        errors["qkappa_inverse_diagonal"].append(
            log_relative_error(
                log_q_kappa(diagonal.inverse(), kappa), -log_q_kappa(diagonal, kappa)
            )
        )
        equal = Partition((int(generator.integers(1, 3)),) * m)
        errors["qkappa_inverse_equal_parts"].append(
            log_relative_error(log_q_kappa(p.inverse(), equal), -log_q_kappa(p, equal))
        )
        if (kappa + tau).length <= m:
            errors["qkappa_product"].append(
                log_relative_error(
                    log_q_kappa(p, kappa + tau), log_q + log_q_kappa(p, tau)
                )
            )
        shift = int(generator.integers(1, 3))
        shifted = Partition(tuple(part + shift for part in kappa.padded(m)))
        errors["qkappa_determinant_shift"].append(
            log_relative_error(log_q_kappa(p, shifted), shift * p.log_det() + log_q)
        )
        c = float(generator.uniform(0.5, 2.0))
        scaled = HermitianPD.from_matrix(p.matrix.scaled(c))
        errors["qkappa_homogeneity"].append(
            log_relative_error(
                log_q_kappa(scaled, kappa), kappa.weight * math.log(c) + log_q
            )
        )
        lower = random_lower_triangular(generator, m, beta)
        gram = congruence(lower, HermitianPD.identity(m, beta))
        errors["qkappa_triangular"].append(
            log_relative_error(
                log_q_kappa(congruence(lower, p), kappa),
                log_q_kappa(gram, kappa) + log_q,
            )
        )
        errors["qkappa_triangular_inverse"].append(
            log_relative_error(
                log_q_kappa(congruence(lower.inverse(), p), kappa),
                log_q - log_q_kappa(gram, kappa),
            )
        )
        values = np.sort(generator.uniform(0.2, 3.0, m))[::-1]
        expected = float(np.dot(kappa.padded(m), np.log(values)))
        errors["qkappa_descending_diagonal"].append(
            log_relative_error(
                log_q_kappa(HermitianPD.from_diagonal(values, beta), kappa), expected
            )
        )

    def _quadrature_oracles(self) -> List[Check]:
        oracle = QuadratureOracle(min(1e-9, self.settings.quadrature_tol / 10))
        tolerance = self.settings.quadrature_tol
        checks = []
        for base in (1.0, 1.5, 2.5, 3.5, 5.0):
            for k in range(4):
                domain = GammaDomain.plus(base, (k,), 1, 1)
                expected = math.exp(log_mv_gamma_weighted(domain))
                checks.append(
                    self._oracle_check(
                        oracle, "gamma_weighted", expected, tolerance, a=base, k=k
                    )
                )
                a = base + k
                domain = GammaDomain.minus(a, (k,), 1, 1)
                expected = math.exp(log_mv_gamma_weighted(domain))
                checks.append(
                    self._oracle_check(
                        oracle, "gamma_weighted_inverse", expected, tolerance, a=a, k=k
                    )
                )
        for n, beta, c in ((3, 1, 1.0), (2, 2, 0.5), (1, 4, 2.0), (4, 1, 1.5)):
            checks.append(
                self._oracle_check(
                    oracle, "wishart_radial", None, tolerance, n=n, beta=beta, c=c
                )
            )
        for a, t, u, z in ((2.5, 2, 0.7, 1.3), (1.5, 3, 1.2, 0.8), (3.0, 1, 2.0, 2.0)):
            checks.append(
                self._oracle_check(
                    oracle, "laplace_jack", None, tolerance, a=a, t=t, u=u, z=z
                )
            )
        return checks

    def _oracle_check(self, oracle, kind, expected, tolerance, **params) -> Check:
        name = f"quadrature_{kind}[{grid_label(**params)}]"
        try:
            result = oracle.integrate(kind, **params)
        except DomainError as e:
            self.logger.warning("Quadrature oracle failed", exc_info=e)
            kind = ToleranceKind.RELATIVE
            detail = {"error": str(e)}
            return Check(name, None, expected, tolerance, kind, False, detail)
        target = result.expected if expected is None else expected
        return Check.relative(name, result.value, target, tolerance, error=result.error)

    def _special_values(self) -> List[Check]:
        tolerance = self.settings.identity_rtol
        return [
            Check.relative(
                "stiefel_volume[n=1,m=1,beta=1]",
                math.exp(stiefel_log_volume(1, 1, 1)),
                2.0,
                tolerance,
            ),
            Check.relative(
                "stiefel_volume[n=2,m=1,beta=1]",
                math.exp(stiefel_log_volume(2, 1, 1)),
                2 * math.pi,
                tolerance,
            ),
            Check.relative(
                "stiefel_volume[n=1,m=1,beta=2]",
                math.exp(stiefel_log_volume(1, 1, 2)),
                2 * math.pi,
                tolerance,
            ),
            Check.relative(
                "pochhammer[a=2,kappa=(2,1),beta=1]",
                gen_pochhammer(2.0, (2, 1), 1).value,
                9.0,
                tolerance,
            ),
            Check.exact(
                "pochhammer_zero[a=0,kappa=(1)]", gen_pochhammer(0.0, (1,), 1).sign, 0
            ),
        ]

    # jack

    def run_jack(self) -> List[Check]:
        return [
            *self._jack_normalization(),
            *self._jack_structure(),
            *self._hypergeometric_values(),
            *self._unitary_averages(),
        ]

    def _jack_normalization(self) -> List[Check]:
        checks = []
        generator = self.generator("jack", 1)
        for beta in SUPPORTED_BETAS:
            table = jack_table(beta)
            for m in range(1, 5):
                eigs = np.array(
                    [
                        hermitian_eigenvalues(random_hermitian_pd(generator, m, beta))
                        for _ in range(JACK_MATRICES)
                    ]
                )
                errors = []
                for t in range(MAX_JACK_DEGREE + 1):
                    total = sum(table.evaluate_degree(t, eigs).values())
                    expected = eigs.sum(axis=-1) ** t
                    errors += list(np.abs(total - expected) / expected)
                checks.append(
                    Check.max_error(
                        f"jack_normalization[{grid_label(m=m, beta=beta)}]",
                        errors,
                        self.settings.jack_rtol,
                    )
                )
        return checks

    def _jack_structure(self) -> List[Check]:
        checks = []
        generator = self.generator("jack", 2)
        tolerance = self.settings.jack_rtol
        for beta in SUPPORTED_BETAS:
            table = jack_table(beta)
            eigs = generator.uniform(0.2, 1.5, (JACK_MATRICES, 3))
            c = 1.7
            homogeneity, symmetry = [], []
            for t in range(1, 6):
                for tau in enumerate_partitions(t, 3):
                    values = table.evaluate(tau, eigs)
                    homogeneity += list(
                        np.abs(table.evaluate(tau, c * eigs) - c**t * values)
                        / (c**t * values)
                    )
                    permuted = table.evaluate(tau, eigs[:, ::-1])
                    symmetry += list(np.abs(permuted - values) / values)
            checks.append(
                Check.max_error(
                    f"jack_homogeneity[beta={beta}]", homogeneity, tolerance
                )
            )
            checks.append(
                Check.max_error(f"jack_symmetry[beta={beta}]", symmetry, tolerance)
            )
            single = generator.uniform(0.2, 1.5, JACK_MATRICES)[:, None]
            checks.append(
                Check.max_error(
                    f"jack_single_variable[beta={beta}]",
                    [
                        relative_error(float(value), float(x[0] ** t))
                        for t in range(1, MAX_JACK_DEGREE + 1)
                        for x, value in zip(single, table.evaluate((t,), single))
                    ],
                    tolerance,
                )
            )
            power_sums = []
            for t in range(1, MAX_JACK_DEGREE + 1):
                total = sum(jack_C_batch(t, eigs, beta).values())
                power = eigs.sum(axis=1) ** t
                power_sums += list(np.abs(total - power) / power)
            checks.append(
                Check.max_error(f"jack_power_sum[beta={beta}]", power_sums, tolerance)
            )
            checks.append(
                Check.relative(
                    f"jack_trace[beta={beta}]",
                    table.evaluate((1,), eigs[0]),
                    float(eigs[0].sum()),
                    tolerance,
                )
            )
        return checks

    def _hypergeometric_values(self) -> List[Check]:
        tolerance = self.settings.identity_rtol
        checks = [
            Check.relative(
                "hyper0f1_scalar[b=1.5,x=0.3]",
                hyper_0F1(1.5, [0.3], 1).value,
                float(scipy.special.hyp0f1(1.5, 0.3)),
                tolerance,
            )
        ]
        for beta in SUPPORTED_BETAS:
            checks.append(
                Check.relative(
                    f"hyper0f1_rank_degenerate[beta={beta}]",
                    hyper_0F1(2.5, [0.4, 0.0], beta).value,
                    hyper_0F1(2.5, [0.4], beta).value,
                    tolerance,
                )
            )
        return checks

    def _unitary_averages(self) -> List[Check]:
        checks = []
        for index, (beta, m) in enumerate((b, m) for b in (1, 2) for m in range(1, 4)):
            generator = self.generator("jack", 10 + index)
            x = random_hermitian_pd(generator, m, beta)
            eigs = hermitian_eigenvalues(x)
            count = self.settings.haar_draws
            frames = draw_stiefel_natives(m, m, beta, generator, count)
            rotated = stacked_hermitian_part(
                frames @ x.native @ stacked_adjoint(frames)
            )
            for kappa in (k for t in range(1, 4) for k in enumerate_partitions(t, m)):
                estimate = MonteCarloEstimate.from_values(
                    np.exp(stacked_log_q_kappa(rotated, beta, kappa))
                )
                expected = jack_C(kappa, eigs, beta) / jack_at_identity(kappa, m, beta)
                checks.append(
                    Check.sigmas(
                        f"unitary_average[{grid_label(m=m, beta=beta, kappa=kappa)}]",
                        estimate.mean,
                        estimate.standard_error,
                        expected,
                        self.settings.haar_sigmas,
                        draws=estimate.count,
                    )
                )
        return checks

    # densities

    def run_densities(self) -> List[Check]:
        return [
            *self._density_normalization(),
            *self._density_reductions(),
            *self._density_affine(),
            *self._importance_normalization(),
        ]

    def _density_normalization(self) -> List[Check]:
        oracle = QuadratureOracle(min(1e-9, self.settings.density_norm_tol / 10))
        tolerance = self.settings.density_norm_tol
        checks = []
        for variant, k, n, beta, sigma in (
            ("I", 0, 1, 1, 1.0),
            ("I", 1, 2, 1, 1.0),
            ("I", 2, 3, 2, 2.0),
            ("I", 1, 1, 4, 0.5),
            ("II", 1, 2, 2, 1.0),
            ("II", 1, 4, 1, 1.5),
            ("II", 2, 2, 4, 1.0),
        ):
            params = dict(variant=variant, k=k, n=n, beta=beta, sigma=sigma)
            checks.append(self._norm_check(oracle, "density_kr", tolerance, params))
        for variant, a, k, beta, sigma in (
            ("I", 1.5, 1, 1, 1.0),
            ("I", 2.0, 0, 4, 1.5),
            ("II", 2.5, 1, 2, 0.5),
            ("II", 3.0, 2, 1, 1.0),
        ):
            params = dict(variant=variant, a=a, k=k, beta=beta, sigma=sigma)
            checks.append(self._norm_check(oracle, "density_riesz", tolerance, params))
        return checks

    def _norm_check(self, oracle, kind, tolerance, params) -> Check:
        name = f"{kind}_mass[{grid_label(**params)}]"
        try:
            result = oracle.integrate(kind, **params)
        except DomainError as e:
            self.logger.warning("Density normalization failed", exc_info=e)
            kind = ToleranceKind.ABSOLUTE
            return Check(name, None, 1.0, tolerance, kind, False, {"error": str(e)})
        return Check.absolute(name, result.value, 1.0, tolerance, error=result.error)

    def _density_reductions(self) -> List[Check]:
        tolerance = self.settings.identity_rtol
        checks = []
        normal = KotzRieszParams.spherical("I", 0, 1, 1, 1)
        errors = [
            log_relative_error(
                log_density_kr(normal, AlgebraMatrix.from_real([[x]])),
                float(scipy.stats.norm.logpdf(x, 0.0, math.sqrt(0.5))),
            )
            for x in (0.0, 0.3, -1.2, 2.5)
        ]
        checks.append(Check.max_error("density_scalar_normal", errors, tolerance))
        for beta in (1, 2):
            for a, k, sigma in ((1.5, 0, 1.0), (2.5, 1, 2.0), (1.0, 3, 0.5)):
                params = RieszParams.from_file_data(
                    "I", a, (k,), beta, sigma=AlgebraMatrix.from_real([[sigma]], beta)
                )
                errors = [
                    log_relative_error(
                        log_density_riesz(params, HermitianPD.from_diagonal([y], beta)),
                        float(scipy.stats.gamma.logpdf(y, a + k, scale=sigma / beta)),
                    )
                    for y in (0.2, 1.0, 3.7)
                ]
                checks.append(
                    Check.max_error(
                        f"density_riesz_gamma[{grid_label(beta=beta, a=a, k=k)}]",
                        errors,
                        tolerance,
                    )
                )
        generator = self.generator("densities", 1)
        mu = random_matrix(generator, 3, 2, 1)
        theta = random_hermitian_pd(generator, 3, 1)
        sigma = random_hermitian_pd(generator, 2, 1)
        params = matrix_normal_params(mu, theta, sigma)
        reference = scipy.stats.matrix_normal(
            mean=mu.native, rowcov=theta.native, colcov=sigma.native
        )
        errors = []
        for _ in range(5):
            x = random_matrix(generator, 3, 2, 1)
            errors.append(
                log_relative_error(
                    log_density_kr(params, x), float(reference.logpdf(x.native))
                )
            )
        checks.append(
            Check.max_error("density_matrix_normal", errors, self.settings.qkappa_rtol)
        )
        return checks

    def _density_affine(self) -> List[Check]:
        checks = []
        generator = self.generator("densities", 2)
        n, m = 4, 2
        for beta in SUPPORTED_BETAS:
            for variant, kappa in (("I", (2, 1)), ("II", (1, 0))):
                for convention in ("cholesky_lower", "symmetric_root"):
                    params = KotzRieszParams.from_file_data(
                        variant=variant,
                        kappa=kappa,
                        n=n,
                        m=m,
                        beta=beta,
                        mu=random_matrix(generator, n, m, beta),
                        theta=random_hermitian_pd(generator, n, beta),
                        sigma=random_hermitian_pd(generator, m, beta),
                        sigma_factor_convention=convention,
                    )
                    standard = KotzRieszParams.spherical(variant, kappa, n, m, beta)
                    theta_root_inverse = pd_sqrt(params.theta).inverse().matrix
                    factor = params.sigma_factor()
                    factor_adjoint_inverse = factor.conj_transpose().inverse()
                    shift = (
                        -m * beta / 2 * params.theta.log_det()
                        - n * beta / 2 * params.sigma.log_det()
                    )
                    errors = []
                    for _ in range(5):
                        x = random_matrix(generator, n, m, beta)
                        z = theta_root_inverse @ (x - params.mu)
                        z = z @ factor_adjoint_inverse
                        lhs = log_density_kr(params, x)
                        errors.append(abs(lhs - log_density_kr(standard, z) - shift))
                    label = grid_label(
                        beta=beta, variant=variant, kappa=Partition.coerce(kappa)
                    )
                    checks.append(
                        Check.max_error(
                            f"density_affine[{label},convention={convention}]",
                            errors,
                            self.settings.qkappa_rtol,
                        )
                    )
            params = KotzRieszParams.from_file_data(
                variant="I",
                kappa=(1, 1),
                n=n,
                m=m,
                beta=beta,
                sigma=random_hermitian_pd(generator, m, beta),
            )
            other = with_convention(params, "symmetric_root")
            errors = []
            for _ in range(5):
                x = random_matrix(generator, n, m, beta)
                errors.append(abs(log_density_kr(params, x) - log_density_kr(other, x)))
            checks.append(
                Check.max_error(
                    f"density_convention_equal_parts[beta={beta}]",
                    errors,
                    self.settings.qkappa_rtol,
                )
            )
        return checks

    def _importance_normalization(self) -> List[Check]:
        """Total mass of m = 2 densities as an expectation under a sampled reference."""
        checks = []
        draws = self.settings.draws
        for index, beta in enumerate((1, 2)):
            generator = self.generator("densities", 10 + index)
            n, m = 3, 2
            theta = random_hermitian_pd(generator, n, beta)
            sigma = random_hermitian_pd(generator, m, beta)
            target = KotzRieszParams.from_file_data(
                variant="I", kappa=(1, 0), n=n, m=m, beta=beta, theta=theta, sigma=sigma
            )
            mu = AlgebraMatrix.zeros(n, m, beta)
            reference = matrix_normal_params(mu, theta, sigma)
            stream = self.stream("densities", 20 + index)
            batch = sample_kr(reference, draws, stream, **self._sampling())
            ratios = np.exp(
                stacked_log_density_kr(target, batch.natives)
                - stacked_log_density_kr(reference, batch.natives)
            )
            checks.append(self._mass_check(f"density_kr_mass_mc[beta={beta}]", ratios))

            riesz_sigma = random_hermitian_pd(generator, m, beta)
            base = RieszParams.from_file_data("I", 4.0, 0, beta, sigma=riesz_sigma)
            stream = self.stream("densities", 30 + index)
            batch = sample_riesz(base, draws, stream, **self._sampling())
            for variant, kappa in (("I", (2, 1)), ("II", (1, 0))):
                target = RieszParams.from_file_data(
                    variant, 4.0, kappa, beta, sigma=riesz_sigma
                )
                ratios = np.exp(
                    stacked_log_density_riesz(target, batch.natives)
                    - stacked_log_density_riesz(base, batch.natives)
                )
                label = grid_label(
                    beta=beta, variant=variant, kappa=Partition.coerce(kappa)
                )
                checks.append(
                    self._mass_check(f"density_riesz_mass_mc[{label}]", ratios)
                )
        return checks

    def _mass_check(self, name: str, ratios: np.ndarray) -> Check:
        estimate = MonteCarloEstimate.from_values(ratios)
        return Check.sigmas(
            name,
            estimate.mean,
            estimate.standard_error,
            1.0,
            self.settings.moment_sigmas,
            draws=estimate.count,
        )

    # samplers

    def run_samplers(self) -> List[Check]:
        return [
            *self._sampler_marginals(),
            *self._stiefel_checks(),
            *self._left_sphericity(),
            *self._factor_trace(),
            *self._determinism(),
        ]

    def _ks_check(self, name: str, samples, reference, *args) -> Check:
        result = ks_two_way(samples, reference, *args)
        return Check.p_value(
            name, result.p_value, self.settings.ks_alpha, statistic=result.statistic
        )

    def _sampler_marginals(self) -> List[Check]:
        draws = self.settings.draws
        checks = []
        for index, beta in enumerate((1, 2)):
            a, k = 1.5, 1
            factors = draw_riesz_factor_natives(
                a, (k,), 1, beta, self.generator("samplers", 1 + index), draws
            )
            values = np.abs(factors[:, 0, 0]) ** 2
            checks.append(
                self._ks_check(
                    f"ks_factor_diagonal[beta={beta}]",
                    values,
                    "gamma",
                    a + k,
                    0,
                    1 / beta,
                )
            )
        normal = KotzRieszParams.spherical("I", 0, 1, 1, 1)
        batch = sample_kr(normal, draws, self.stream("samplers", 3), **self._sampling())
        checks.append(
            self._ks_check(
                "ks_scalar_normal", batch.natives[:, 0, 0], "norm", 0, math.sqrt(0.5)
            )
        )
        radial = KotzRieszParams.spherical("I", (2,), 3, 1, 2)
        batch = sample_kr(radial, draws, self.stream("samplers", 4), **self._sampling())
        squared = np.sum(batch.components() ** 2, axis=(1, 2, 3))
        checks.append(
            self._ks_check(
                "ks_kr_radial[n=3,beta=2,kappa=(2)]", squared, "gamma", 5.0, 0, 0.5
            )
        )
        riesz = RieszParams.from_file_data(
            "I", 2.5, (1,), 1, sigma=AlgebraMatrix.from_real([[2.0]])
        )
        stream = self.stream("samplers", 5)
        batch = sample_riesz(riesz, draws, stream, **self._sampling())
        checks.append(
            self._ks_check(
                "ks_riesz_scalar[a=2.5,kappa=(1)]",
                batch.natives[:, 0, 0],
                "gamma",
                3.5,
                0,
                2.0,
            )
        )
        return checks

    def _stiefel_checks(self) -> List[Check]:
        checks = []
        count = self.settings.haar_draws
        sigmas = self.settings.haar_sigmas
        shapes = ((3, 2, 1), (4, 2, 2), (3, 3, 4), (5, 1, 4))
        for index, (n, m, beta) in enumerate(shapes):
            generator = self.generator("samplers", 10 + index)
            frames = draw_stiefel_natives(n, m, beta, generator, count)
            gram = stacked_adjoint(frames) @ frames
            defect = float(np.max(np.abs(gram - np.eye(gram.shape[-1]))))
            checks.append(
                Check.absolute(
                    f"stiefel_orthonormal[{grid_label(n=n, m=m, beta=beta)}]",
                    defect,
                    0.0,
                    1e-12,
                )
            )
        signs = draw_stiefel_natives(1, 1, 1, self.generator("samplers", 20), count)
        estimate = MonteCarloEstimate.from_values(signs[:, 0, 0])
        checks.append(
            Check.sigmas(
                "stiefel_sign_balance",
                estimate.mean,
                estimate.standard_error,
                0.0,
                sigmas,
            )
        )
        for index, beta in enumerate(SUPPORTED_BETAS):
            generator = self.generator("samplers", 21 + index)
            frames = draw_stiefel_natives(3, 1, beta, generator, count)
            components = components_from_native(frames, beta)
            first = MonteCarloEstimate.from_values(components[:, 0, 0, 0])
            checks.append(
                Check.sigmas(
                    f"stiefel_mean[n=3,beta={beta}]",
                    first.mean,
                    first.standard_error,
                    0.0,
                    sigmas,
                )
            )
            power = MonteCarloEstimate.from_values(
                np.sum(components[:, 0, 0, :] ** 2, axis=-1)
            )
            checks.append(
                Check.sigmas(
                    f"stiefel_second_moment[n=3,beta={beta}]",
                    power.mean,
                    power.standard_error,
                    1 / 3,
                    sigmas,
                )
            )
        return checks

    def _left_sphericity(self) -> List[Check]:
        checks = []
        draws = self.settings.draws
        for index, beta in enumerate((1, 2)):
            params = KotzRieszParams.spherical("I", (1, 0), 3, 2, beta)
            generator = self.generator("samplers", 30 + index)
            rotation = draw_stiefel_natives(3, 3, beta, generator, 1)[0]
            sampling = self._sampling()
            rotated = sample_kr(
                params, draws, self.stream("samplers", 32 + index), **sampling
            )
            plain = sample_kr(
                params, draws, self.stream("samplers", 34 + index), **sampling
            )
            left = components_from_native(rotation @ rotated.natives, beta)[:, 0, 0, 0]
            right = components_from_native(plain.natives, beta)[:, 0, 0, 0]
            checks.append(self._ks_check(f"left_sphericity[beta={beta}]", left, right))
        return checks

    def _factor_trace(self) -> List[Check]:
        checks = []
        a, kappa, m = 3.0, Partition.of(2, 1), 2
        for index, beta in enumerate(SUPPORTED_BETAS):
            generator = self.generator("samplers", 40 + index)
            factors = draw_riesz_factor_natives(
                a, kappa, m, beta, generator, self.settings.draws
            )
            traces = np.sum(components_from_native(factors, beta) ** 2, axis=(1, 2, 3))
            estimate = MonteCarloEstimate.from_values(traces)
            expected = sum(
                (a + part - i * beta / 2) / beta
                for i, part in enumerate(kappa.padded(m))
            ) + m * (m - 1) / 4
            checks.append(
                Check.sigmas(
                    f"factor_trace[beta={beta}]",
                    estimate.mean,
                    estimate.standard_error,
                    expected,
                    self.settings.moment_sigmas,
                )
            )
        return checks

    def _determinism(self) -> List[Check]:
        params = KotzRieszParams.spherical("I", (1, 0), 3, 2, 2)
        stream = self.stream("samplers", 50)
        count, chunk = 3000, 1024
        first = sample_kr(params, count, stream, chunk_size=chunk, workers=1)
        again = sample_kr(params, count, stream, chunk_size=chunk, workers=1)
        threaded = sample_kr(params, count, stream, chunk_size=chunk, workers=3)
        return [
            Check.exact(
                "sampler_repeatable",
                bool(np.array_equal(first.natives, again.natives)),
                True,
            ),
            Check.exact(
                "sampler_worker_invariant",
                bool(np.array_equal(first.natives, threaded.natives)),
                True,
            ),
        ]

    # moments

    def run_moments(self) -> List[Check]:
        return [
            *self._moment_closed_forms(),
            *self._moment_constant_audit(),
            *self._moment_quadrature(),
            *self._pushforward_moments(),
        ]

    def _moment_closed_forms(self) -> List[Check]:
        tolerance = self.settings.identity_rtol
        trivial = riesz_moment_ctau(MomentSpec.of(2.0, (1, 0), (), m=2, beta=1))
        checks = [Check.exact("moment_trivial", trivial.value, 1.0)]
        for beta in SUPPORTED_BETAS:
            errors = []
            for a, k, c in ((1.5, 0, 1.0), (1.5, 2, 0.7), (2.25, 1, 1.3)):
                matrix = AlgebraMatrix.from_real([[c]], beta)
                for t in range(1, 5):
                    spec = MomentSpec.of(a, (k,), (t,), matrix, beta)
                    value = riesz_moment_ctau(spec).value
                    expected = math.exp(
                        t * math.log(c / beta)
                        + scipy.special.gammaln(a + k + t)
                        - scipy.special.gammaln(a + k)
                    )
                    errors.append(relative_error(value, expected))
            checks.append(
                Check.max_error(f"moment_scalar[beta={beta}]", errors, tolerance)
            )
        return checks

    def _moment_constant_audit(self) -> List[Check]:
        checks = []
        sweep = []
        a, kappa = 1.5, (1,)
        for index, beta in enumerate(SUPPORTED_BETAS):
            for t in (1, 2):
                spec = MomentSpec.of(a, kappa, (t,), m=1, beta=beta)
                stream = self.stream("moments", 1 + 2 * index + t)
                estimate = mc_riesz_moment_ctau(
                    spec, self.settings.draws, stream, **self._sampling()
                )
                expected = riesz_moment_ctau(spec).value
                unscaled = math.exp(spec.log_gamma_ratio())
                sweep.append(
                    {
                        "beta": beta,
                        "t": t,
                        "observed_over_gamma_ratio": estimate.mean / unscaled,
                        "beta_power": beta ** (-t),
                    }
                )
                checks.append(
                    Check.sigmas(
                        f"moment_constant[beta={beta},t={t}]",
                        estimate.mean,
                        estimate.standard_error,
                        expected,
                        self.settings.moment_sigmas,
                    )
                )
        self.notes["moment_constant"] = {
            "factor": "beta^-|tau|",
            "beta_sweep": sweep,
        }
        return checks

    def _moment_quadrature(self) -> List[Check]:
        checks = []
        generator = self.generator("moments", 20)
        for beta in SUPPORTED_BETAS:
            matrix = random_hermitian_pd(generator, 2, beta).matrix
            table = jack_table(beta)
            errors = []
            for tau in (k for t in range(1, 4) for k in enumerate_partitions(t, 2)):
                spec = MomentSpec.of(2.5, (1, 1), tau, matrix, beta)

                def integrand(factors, tau=tau):
                    eigs = congruence_eigenvalues(factors, matrix.native, beta)
                    return table.evaluate(tau, eigs)

                exact, _ = factor_expectation(
                    spec.a,
                    spec.kappa,
                    2,
                    beta,
                    tau.weight,
                    integrand,
                    self.settings.node_budget,
                )
                closed = riesz_moment_ctau(spec).value
                errors.append(relative_error(float(exact), closed))
            checks.append(
                Check.max_error(
                    f"moment_quadrature_equal_parts[beta={beta}]",
                    errors,
                    self.settings.qkappa_rtol,
                )
            )

        a = 2.0
        spec = MomentSpec.of(a, (1, 0), (1,), m=2, beta=1)
        trace = riesz_moment_ctau(spec, self.settings.node_budget)
        checks.append(
            Check.relative(
                "moment_trace_noninvariant[m=2,beta=1,kappa=(1,0)]",
                trace.value,
                2 * a + 1,
                self.settings.identity_rtol,
                method=trace.method.value,
            )
        )
        self.notes["noninvariant_trace"] = {
            "a": a,
            "quadrature": trace.value,
            "invariant_closed_form": 2 * a + 2,
        }

        index = 0
        for beta in (1, 2):
            for general in (False, True):
                matrix = (
                    random_hermitian_pd(generator, 2, beta).matrix
                    if general
                    else AlgebraMatrix.identity(2, beta)
                )
                for tau in ((1,), (2,), (1, 1)):
                    index += 1
                    spec = MomentSpec.of(2.5, (1, 0), tau, matrix, beta)
                    exact = riesz_moment_ctau(spec, self.settings.node_budget)
                    stream = self.stream("moments", 30 + index)
                    estimate = mc_riesz_moment_ctau(
                        spec, self.settings.draws, stream, **self._sampling()
                    )
                    label = grid_label(beta=beta, tau=spec.tau, general=general)
                    checks.append(
                        Check.sigmas(
                            f"moment_quadrature_mc[{label}]",
                            estimate.mean,
                            estimate.standard_error,
                            exact.value,
                            self.settings.moment_sigmas,
                            nodes=exact.nodes,
                        )
                    )
            p = random_hermitian_pd(generator, 2, beta)
            for tau in ((1, 0), (1, 1), (2, 1)):
                index += 1
                spec = MomentSpec.of(2.5, (1, 0), tau, p, beta)
                params = RieszParams.from_file_data("I", 2.5, (1, 0), beta, sigma=p)
                stream = self.stream("moments", 30 + index)
                batch = sample_riesz(
                    params, self.settings.draws, stream, **self._sampling()
                )
                estimate = MonteCarloEstimate.from_values(
                    np.exp(stacked_log_q_kappa(batch.natives, beta, tau))
                )
                checks.append(
                    Check.sigmas(
                        f"moment_qtau[{grid_label(beta=beta, tau=spec.tau)}]",
                        estimate.mean,
                        estimate.standard_error,
                        riesz_moment_qtau(spec),
                        self.settings.moment_sigmas,
                    )
                )
        return checks

    def _pushforward_moments(self) -> List[Check]:
        checks = []
        cases = [
            (m, beta, Partition.coerce(kappa))
            for m in (2, 3)
            for beta in (1, 2)
            for kappa in ((1,), (2, 1))
        ]
        for index, (m, beta, kappa) in enumerate(cases):
            generator = self.generator("moments", 100 + index)
            n = m + 1
            params = KotzRieszParams.from_file_data(
                variant="I",
                kappa=kappa,
                n=n,
                m=m,
                beta=beta,
                theta=random_hermitian_pd(generator, n, beta),
                sigma=random_hermitian_pd(generator, m, beta),
            )
            riesz = riesz_pushforward_params(params)
            lower = cholesky_lower(riesz.sigma)
            argument = lower.conj_transpose() @ lower
            stream = self.stream("moments", 200 + index)
            batch = sample_kr(params, self.settings.draws, stream, **self._sampling())
            theta_inverse = np.linalg.inv(params.theta.native)
            gram = stacked_hermitian_part(
                stacked_adjoint(batch.natives) @ theta_inverse @ batch.natives
            )
            eigs = stacked_eigenvalues(gram, beta)
            table = jack_table(beta)
            for tau in (k for t in (1, 2) for k in enumerate_partitions(t, m)):
                spec = MomentSpec.of(riesz.a, kappa, tau, argument, beta)
                exact = riesz_moment_ctau(spec, self.settings.node_budget)
                estimate = MonteCarloEstimate.from_values(table.evaluate(tau, eigs))
                label = grid_label(m=m, beta=beta, kappa=kappa, tau=tau)
                checks.append(
                    Check.sigmas(
                        f"pushforward_moment[{label}]",
                        estimate.mean,
                        estimate.standard_error,
                        exact.value,
                        self.settings.moment_sigmas,
                        method=exact.method.value,
                    )
                )
        return checks

    # cf

    def run_cf(self) -> List[Check]:
        checks = []
        if self.selection.matches(1, 1, 1, Partition.zero()):
            checks += self._cf_scalar_normal()
        checks += self._cf_series_cases()
        if self.selection.empty:
            checks += self._cf_shifted()
            checks += self._cf_stiefel()
        return checks

    def _cf_scalar_normal(self) -> List[Check]:
        params = KotzRieszParams.spherical("I", 0, 1, 1, 1)
        errors = []
        for t in (0.3, 0.5, 0.7, 1.0):
            point = AlgebraMatrix.from_real([[t]])
            query = CfQuery(params, point, self.settings.cf_t_max)
            value = cf_kr1(query)
            errors.append(relative_error(value.real, math.exp(-(t**2) / 4)))
            errors.append(abs(value.imag))
        return [Check.max_error("cf_scalar_normal", errors, CF_SERIES_RTOL)]

    def _cf_cases(self) -> Iterator[Tuple[int, int, int, Partition]]:
        cases = [
            (m, n, beta, Partition.coerce(kappa)) for m, n, beta, kappa in CF_CASES
        ]
        selected = [case for case in cases if self.selection.matches(*case)]
        if selected or self.selection.empty:
            return iter(selected)
        m = self.selection.m or 1
        n = self.selection.n or m + 1
        beta = self.selection.beta or 1
        kappa = self.selection.kappa or Partition.zero()
        return iter([(m, n, beta, kappa)])

    def _cf_series_cases(self) -> List[Check]:
        checks = []
        for index, (m, n, beta, kappa) in enumerate(self._cf_cases()):
            params = KotzRieszParams.spherical("I", kappa, n, m, beta).validate()
            generator = self.generator("cf", 1 + index)
            direction = random_matrix(generator, n, m, beta)
            norm = math.sqrt(float(np.sum(direction.components**2)))
            direction = direction.scaled(1 / norm)
            stream = self.stream("cf", 10 + index)
            batch = sample_kr(params, self.settings.draws, stream, **self._sampling())
            for scale in CF_SCALES:
                t = direction.scaled(scale)
                query = CfQuery(params, t, self.settings.cf_t_max)
                series = cf_kr1(query, self.settings.node_budget)
                phases = pairing(batch.natives, t)
                label = grid_label(m=m, n=n, beta=beta, kappa=kappa, scale=scale)
                checks += self._cf_pair(f"cf_series[{label}]", series, phases)
        return checks

    def _cf_pair(self, name: str, series, phases: np.ndarray) -> List[Check]:
        real = MonteCarloEstimate.from_values(np.cos(phases))
        imag = MonteCarloEstimate.from_values(np.sin(phases))
        return [
            Check.sigmas(
                f"{name}.real",
                real.mean,
                real.standard_error,
                series.real,
                self.settings.moment_sigmas,
                slack=series.tail,
                converged=series.converged,
            ),
            Check.sigmas(
                f"{name}.imag",
                imag.mean,
                imag.standard_error,
                series.imag,
                self.settings.moment_sigmas,
                slack=series.tail,
            ),
        ]

    def _cf_shifted(self) -> List[Check]:
        mu = AlgebraMatrix.from_real([[0.3], [-0.2]])
        params = KotzRieszParams.from_file_data(
            variant="I", kappa=(1,), n=2, m=1, beta=1, mu=mu
        )
        t = AlgebraMatrix.from_real([[0.4], [0.1]])
        series = cf_kr1(CfQuery(params, t, self.settings.cf_t_max))
        stream = self.stream("cf", 30)
        estimate = mc_cf_estimate(
            params, t, self.settings.draws, stream, **self._sampling()
        )
        return [
            Check.sigmas(
                "cf_shifted.real",
                estimate.real.mean,
                estimate.real.standard_error,
                series.real,
                self.settings.moment_sigmas,
                slack=series.tail,
            ),
            Check.sigmas(
                "cf_shifted.imag",
                estimate.imag.mean,
                estimate.imag.standard_error,
                series.imag,
                self.settings.moment_sigmas,
                slack=series.tail,
            ),
        ]

    def _cf_stiefel(self) -> List[Check]:
        checks = []
        for index, t in enumerate((0.5, 1.0, 1.5)):
            frame_t = AlgebraMatrix.from_real([[t], [0.0]])
            series = stiefel_cf_series(frame_t, 2, 1, self.settings.cf_t_max)
            checks.append(
                Check.relative(
                    f"stiefel_cf_bessel[t={t}]",
                    series.value,
                    float(scipy.special.j0(t)),
                    self.settings.qkappa_rtol,
                )
            )
            stream = self.stream("cf", 40 + index)
            estimate = mc_stiefel_cf(frame_t, self.settings.haar_draws, stream)
            checks.append(
                Check.sigmas(
                    f"stiefel_cf_mc[t={t}]",
                    estimate.real.mean,
                    estimate.real.standard_error,
                    series.value,
                    self.settings.haar_sigmas,
                )
            )
        return checks


def seed_provenance(settings: ValidationSettings) -> Dict[str, Any]:
    return {
        "seed": settings.seed,
        "algorithm_id": ALGORITHM_ID,
        "suite_stream_ids": dict(SUITE_STREAM_IDS),
        "chunk_size": settings.chunk_size,
    }


def run_validation(
    suite: str,
    settings: Optional[ValidationSettings] = None,
    command: Sequence[str] = (),
    selection: Optional[CfSelection] = None,
) -> RunReport:
    settings = settings or ValidationSettings()
    runner = SuiteRunner(settings, selection)
    params = {"suite": suite, "settings": settings.as_dict()}
    if selection is not None and not selection.empty:
        params["selection"] = selection.as_dict()
    report = RunReport.start(list(command), params, seed_provenance(settings))
    report.extend(runner.run(suite))
    report.notes.update(runner.notes)
    return report.finish()
