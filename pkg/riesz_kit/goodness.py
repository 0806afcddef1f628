from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.stats

from .errors import TooFewSamples

MINIMUM_SAMPLES = 100
DEFAULT_ALPHA = 0.01

Reference = Union[Callable[[np.ndarray], np.ndarray], str, np.ndarray]


@dataclass(slots=True, frozen=True)
class KsResult:
    statistic: float
    p_value: float
    two_sample: bool

    def passes(self, alpha: float = DEFAULT_ALPHA) -> bool:
        return self.p_value >= alpha


def _checked(samples, name: str) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < MINIMUM_SAMPLES:
        raise TooFewSamples(
            f"{name} has {samples.size} values, at least {MINIMUM_SAMPLES} are needed"
        )
    return samples


def ks_two_way(samples, reference: Reference, *args) -> KsResult:
    """Kolmogorov-Smirnov test against a cdf or against reference samples.

    A callable or a scipy.stats distribution name (with ``args``) gives the
    one-sample test; an array gives the two-sample test.
    """
    samples = _checked(samples, "samples")
    if callable(reference) or isinstance(reference, str):
        result = scipy.stats.kstest(samples, reference, args=args)
        return KsResult(float(result.statistic), float(result.pvalue), False)
    reference = _checked(reference, "reference")
    result = scipy.stats.ks_2samp(samples, reference)
    return KsResult(float(result.statistic), float(result.pvalue), True)
