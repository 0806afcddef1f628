import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .algebra import HermitianPD, stacked_log_leading_minors
from .errors import DomainViolation, InvalidPartition

LOG_PI = math.log(math.pi)
LOG_TWO = math.log(2.0)

PartitionLike = Union["Partition", str, int, Sequence[int]]


@dataclass(slots=True, frozen=True)
class Partition:
    """A non-increasing tuple of nonnegative integers, stored without trailing zeros."""

    parts: Tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        for part in parts:
            try:
                valid = not isinstance(part, bool) and int(part) == part and part >= 0
            except (TypeError, ValueError):
                valid = False
            if not valid:
                raise InvalidPartition(
                    f"parts must be nonnegative integers, got {parts}"
                )
        parts = tuple(int(p) for p in parts)
        if any(later > earlier for earlier, later in zip(parts, parts[1:])):
            raise InvalidPartition(f"parts must be non-increasing, got {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @classmethod
    def zero(cls) -> "Partition":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()[]")
        if not text:
            return cls.zero()
        try:
            return cls(tuple(int(p) for p in text.split(",") if p.strip()))
        except ValueError as e:
            raise InvalidPartition(f"cannot parse partition {text!r}") from e

    @classmethod
    def coerce(cls, value: PartitionLike) -> "Partition":
        if isinstance(value, Partition):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, (int, np.integer)):
            return cls((int(value),))
        return cls(tuple(value))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def first(self) -> int:
        return self.parts[0] if self.parts else 0

    def padded(self, m: int) -> Tuple[int, ...]:
        if self.length > m:
            raise InvalidPartition(f"partition {self} has more than {m} nonzero parts")
        return self.parts + (0,) * (m - self.length)

    def last(self, m: int) -> int:
        return self.padded(m)[-1]

    def equal_parts(self, m: int) -> bool:
        return len(set(self.padded(m))) <= 1

    def __add__(self, other: "Partition") -> "Partition":
        size = max(self.length, other.length)
        return Partition(
            tuple(a + b for a, b in zip(self.padded(size), other.padded(size)))
        )

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts) or "0"


@dataclass(slots=True, frozen=True)
class SignedLog:
    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


class GammaSign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(slots=True, frozen=True)
class GammaDomain:
    a: float
    m: int
    beta: int
    kappa: Partition
    sign: GammaSign = GammaSign.PLUS

    @classmethod
    def plus(cls, a: float, kappa: PartitionLike, m: int, beta: int) -> "GammaDomain":
        return cls(a, m, beta, Partition.coerce(kappa), GammaSign.PLUS)

    @classmethod
    def minus(cls, a: float, kappa: PartitionLike, m: int, beta: int) -> "GammaDomain":
        return cls(a, m, beta, Partition.coerce(kappa), GammaSign.MINUS)

    @property
    def bound(self) -> float:
        base = (self.m - 1) * self.beta / 2
        if self.sign == GammaSign.PLUS:
            return base - self.kappa.last(self.m)
        return base + self.kappa.first

    def violations(self) -> List[str]:
        if self.kappa.length > self.m:
            return [f"kappa={self.kappa} has more than m={self.m} parts"]
        if not self.a > self.bound:
            return [f"a={self.a} must exceed {self.bound} for sign {self.sign.value}"]
        return []

    def validate(self) -> "GammaDomain":
        problems = self.violations()
        if problems:
            raise DomainViolation("; ".join(problems))
        return self


def q_kappa_exponents(kappa: PartitionLike, m: int) -> np.ndarray:
    parts = np.array(Partition.coerce(kappa).padded(m), dtype=np.float64)
    exponents = parts.copy()
    exponents[:-1] -= parts[1:]
    return exponents


def stacked_log_q_kappa(
    natives: np.ndarray, beta: int, kappa: PartitionLike
) -> np.ndarray:
    scale = 2 if beta == 4 else 1
    m = natives.shape[-1] // scale
    exponents = q_kappa_exponents(kappa, m)
    nonzero = np.flatnonzero(exponents)
    if nonzero.size == 0:
        return np.zeros(natives.shape[:-2])
    count = int(nonzero[-1]) + 1
    log_minors = stacked_log_leading_minors(natives, beta, count)
    return log_minors @ exponents[:count]


def log_q_kappa(a: HermitianPD, kappa: PartitionLike) -> float:
    return float(stacked_log_q_kappa(a.native, a.beta, kappa))


def q_kappa(a: HermitianPD, kappa: PartitionLike) -> float:
    return math.exp(log_q_kappa(a, kappa))


def gen_pochhammer(
    a: float, kappa: PartitionLike, beta: int, m: Optional[int] = None
) -> SignedLog:
    kappa = Partition.coerce(kappa)
    parts = kappa.padded(m) if m is not None else kappa.parts
    log_abs, sign = 0.0, 1
    for i, k in enumerate(parts):
        base = a - i * beta / 2
        for j in range(k):
            factor = base + j
            if factor == 0:
                return SignedLog(-math.inf, 0)
            log_abs += math.log(abs(factor))
            if factor < 0:
                sign = -sign
    return SignedLog(log_abs, sign)


def log_mv_gamma(a: float, m: int, beta: int) -> float:
    if m < 1:
        raise DomainViolation(f"m must be positive, got {m}")
    bound = (m - 1) * beta / 2
    if not a > bound:
        raise DomainViolation(f"a={a} must exceed (m-1)beta/2={bound}")
    shifts = np.arange(m) * beta / 2
    return m * (m - 1) * beta / 4 * LOG_PI + float(np.sum(gammaln(a - shifts)))


def log_mv_gamma_weighted(dom: GammaDomain) -> float:
    dom.validate()
    parts = np.array(dom.kappa.padded(dom.m), dtype=np.float64)
    index = np.arange(dom.m)
    if dom.sign == GammaSign.PLUS:
        arguments = dom.a + parts - index * dom.beta / 2
    else:
        arguments = dom.a - parts - (dom.m - 1 - index) * dom.beta / 2
    if np.any(arguments <= 0):
        raise DomainViolation(f"gamma argument {arguments.min()} is not positive")
    return dom.m * (dom.m - 1) * dom.beta / 4 * LOG_PI + float(
        np.sum(gammaln(arguments))
    )


def stiefel_log_volume(n: int, m: int, beta: int) -> float:
    if not n >= m >= 1:
        raise DomainViolation(f"need n >= m >= 1, got n={n}, m={m}")
    return m * LOG_TWO + m * n * beta / 2 * LOG_PI - log_mv_gamma(n * beta / 2, m, beta)
