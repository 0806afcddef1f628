"""Reproducible draws: Haar frames, triangular Riesz factors and Kotz-Riesz matrices.

All randomness comes from counter-based Philox generators keyed by
(seed, stream_id). Batched samplers split the requested count into
fixed-size chunks and chunk i always draws from ``rng.derive(i)``, so the
output does not depend on how many workers run the chunks.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Callable, Dict, List, Union

import numpy as np

from .algebra import (
    AlgebraMatrix,
    DivisionAlgebra,
    cholesky_lower,
    components_from_native,
    native_from_components,
    pd_sqrt,
    stacked_adjoint,
    stacked_hermitian_part,
)
from .distributions import KotzRieszParams, RieszParams, Variant
from .errors import DomainViolation, InvalidParams, UnsupportedVariant
from .special import GammaDomain, Partition, PartitionLike

ALGORITHM_ID = "philox4x64"
DEFAULT_CHUNK_SIZE = 8192
UINT64_LIMIT = 2**64

LOGGER = getLogger(__name__)


@dataclass(slots=True)
class RngStream:
    seed: int
    stream_id: int = 0
    algorithm_id: str = ALGORITHM_ID
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.algorithm_id != ALGORITHM_ID:
            raise DomainViolation(f"unsupported rng algorithm {self.algorithm_id!r}")
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) < UINT64_LIMIT:
                raise DomainViolation(
                    f"{name}={value} is not a 64-bit unsigned integer"
                )
            setattr(self, name, int(value))
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def derive(self, index: int) -> "RngStream":
        sequence = np.random.SeedSequence([self.seed, self.stream_id, int(index)])
        stream_id = int(sequence.generate_state(1, dtype=np.uint64)[0])
        return RngStream(self.seed, stream_id, self.algorithm_id)

    def provenance(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "stream_id": self.stream_id,
            "algorithm_id": self.algorithm_id,
        }


@dataclass(slots=True, frozen=True, eq=False)
class SampleBatch:
    params: Union[KotzRieszParams, RieszParams]
    count: int
    beta: int
    natives: np.ndarray
    seed_provenance: Dict[str, Any]

    def __post_init__(self) -> None:
        if len(self.natives) != self.count:
            raise DomainViolation(
                f"batch holds {len(self.natives)} draws, expected {self.count}"
            )

    @property
    def draws(self) -> List[AlgebraMatrix]:
        return self.matrices()

    def matrices(self) -> List[AlgebraMatrix]:
        return [AlgebraMatrix.from_native(native, self.beta) for native in self.natives]

    def components(self) -> np.ndarray:
        return components_from_native(self.natives, self.beta)

    def provenance(self) -> Dict[str, Any]:
        return {
            **self.seed_provenance,
            "count": self.count,
            "params": self.params.describe(),
        }


def _gaussian_natives(generator, rows: int, cols: int, beta: int, count: int):
    components = generator.standard_normal((count, rows, cols, beta))
    return native_from_components(components, beta)


def _cholesky_qr(natives: np.ndarray) -> np.ndarray:
    gram = stacked_hermitian_part(stacked_adjoint(natives) @ natives)
    lower = np.linalg.cholesky(gram)
    # Q = A L^{-*}, obtained as (L^{-1} A*)*.
    return stacked_adjoint(np.linalg.solve(lower, stacked_adjoint(natives)))


def draw_stiefel_natives(
    n: int, m: int, beta: int, generator: np.random.Generator, count: int
) -> np.ndarray:
    if not n >= m >= 1:
        raise DomainViolation(f"need n >= m >= 1, got n={n}, m={m}")
    gaussian = _gaussian_natives(generator, n, m, beta, count)
    if beta == 4:
        return _cholesky_qr(_cholesky_qr(gaussian))
    q, r = np.linalg.qr(gaussian)
    diagonal = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diagonal / np.abs(diagonal))[..., None, :]


def sample_stiefel(n: int, m: int, beta: int, rng: RngStream) -> AlgebraMatrix:
    beta = DivisionAlgebra.of(beta).beta
    return AlgebraMatrix.from_native(
        draw_stiefel_natives(n, m, beta, rng.generator, 1)[0], beta
    )


def riesz_factor_shapes(a: float, kappa: Partition, m: int, beta: int) -> np.ndarray:
    parts = np.array(kappa.padded(m), dtype=np.float64)
    return a + parts - np.arange(m) * beta / 2


def draw_riesz_factor_natives(
    a: float,
    kappa: PartitionLike,
    m: int,
    beta: int,
    generator: np.random.Generator,
    count: int,
) -> np.ndarray:
    kappa = Partition.coerce(kappa)
    problems = GammaDomain.plus(a, kappa, m, beta).violations()
    if problems:
        raise InvalidParams(problems)
    shapes = riesz_factor_shapes(a, kappa, m, beta)
    components = np.zeros((count, m, m, beta))
    diagonal = generator.gamma(shapes, 1.0 / beta, size=(count, m))
    components[:, np.arange(m), np.arange(m), 0] = np.sqrt(diagonal)
    rows, cols = np.triu_indices(m, k=1)
    if rows.size:
        off_diagonal = generator.normal(
            0.0, np.sqrt(1.0 / (2 * beta)), size=(count, rows.size, beta)
        )
        components[:, rows, cols, :] = off_diagonal
    return native_from_components(components, beta)


def sample_riesz1_factor(
    a: float, kappa: PartitionLike, m: int, beta: int, rng: RngStream
) -> AlgebraMatrix:
    """Upper triangular T with T*T distributed as Riesz type I with Sigma = I."""
    beta = DivisionAlgebra.of(beta).beta
    natives = draw_riesz_factor_natives(a, kappa, m, beta, rng.generator, 1)
    return AlgebraMatrix.from_native(natives[0], beta)


def _chunk_sizes(count: int, chunk_size: int) -> List[int]:
    full, rest = divmod(count, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunks(
    rng: RngStream,
    count: int,
    chunk_size: int,
    workers: int,
    draw_chunk: Callable[[np.random.Generator, int], np.ndarray],
    empty_shape,
    dtype,
) -> np.ndarray:
    if count < 0:
        raise DomainViolation(f"count must be nonnegative, got {count}")
    if chunk_size < 1 or workers < 1:
        raise DomainViolation("chunk_size and workers must be positive")
    sizes = _chunk_sizes(count, chunk_size)
    if not sizes:
        return np.empty((0,) + empty_shape, dtype=dtype)

    def run(index: int) -> np.ndarray:
        return draw_chunk(rng.derive(index).generator, sizes[index])

    if workers == 1:
        chunks = [run(index) for index in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, range(len(sizes))))
    return np.concatenate(chunks)


def sample_kr(
    params: KotzRieszParams,
    count: int,
    rng: RngStream,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> SampleBatch:
    params.validate()
    if params.variant != Variant.TYPE_I:
        raise UnsupportedVariant("only type I Kotz-Riesz matrices can be sampled")
    beta, n, m = params.beta.beta, params.n, params.m
    theta_root = pd_sqrt(params.theta).native
    factor_adjoint = stacked_adjoint(params.sigma_factor().native)
    mu = params.mu.native

    def draw_chunk(generator: np.random.Generator, size: int) -> np.ndarray:
        frames = draw_stiefel_natives(n, m, beta, generator, size)
        factors = draw_riesz_factor_natives(
            params.a, params.kappa, m, beta, generator, size
        )
        return mu + theta_root @ (frames @ factors) @ factor_adjoint

    natives = _run_chunks(
        rng, count, chunk_size, workers, draw_chunk, mu.shape, params.beta.dtype
    )
    LOGGER.debug(
        "Drew Kotz-Riesz samples",
        extra={"count": count, "beta": beta, "n": n, "m": m, **rng.provenance()},
    )
    return SampleBatch(
        params, count, beta, natives, {**rng.provenance(), "chunk_size": chunk_size}
    )


def sample_riesz(
    params: RieszParams,
    count: int,
    rng: RngStream,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> SampleBatch:
    params.validate()
    if params.variant != Variant.TYPE_I:
        raise UnsupportedVariant("only type I Riesz matrices can be sampled")
    beta, m = params.beta.beta, params.m
    lower = cholesky_lower(params.sigma).native

    def draw_chunk(generator: np.random.Generator, size: int) -> np.ndarray:
        factors = draw_riesz_factor_natives(
            params.a, params.kappa, m, beta, generator, size
        )
        root = lower @ stacked_adjoint(factors)
        return stacked_hermitian_part(root @ stacked_adjoint(root))

    natives = _run_chunks(
        rng,
        count,
        chunk_size,
        workers,
        draw_chunk,
        params.sigma.native.shape,
        params.beta.dtype,
    )
    LOGGER.debug(
        "Drew Riesz samples",
        extra={"count": count, "beta": beta, "m": m, **rng.provenance()},
    )
    return SampleBatch(
        params, count, beta, natives, {**rng.provenance(), "chunk_size": chunk_size}
    )
