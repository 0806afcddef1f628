from typing import Iterable


class DomainError(ValueError):
    pass


class UnsupportedError(NotImplementedError):
    pass


class WrongAlgebra(DomainError):
    pass


class NotHermitian(DomainError):
    pass


class NotPositiveDefinite(DomainError):
    pass


class InvalidPartition(DomainError):
    pass


class DomainViolation(DomainError):
    pass


class PochhammerZero(DomainError):
    pass


class DegreeTooLarge(DomainError):
    pass


class TooFewSamples(DomainError):
    pass


class QuadratureFailure(DomainError):
    pass


class MomentBudgetExceeded(DomainError):
    pass


class MatrixFileError(DomainError):
    pass


class InvalidParams(DomainError):
    def __init__(self, violations: Iterable[str]) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnsupportedVariant(UnsupportedError):
    pass
