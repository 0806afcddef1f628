import json
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from logging import getLogger
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

SCHEMA = "riesz-kit/1"
SIGMA_RTOL = 1e-9

Number = Union[float, int, None]


class ToleranceKind(str, Enum):
    RELATIVE = "relative"
    ABSOLUTE = "absolute"
    SIGMAS = "sigmas"
    P_VALUE = "p_value"
    EXACT = "exact"


def json_number(value) -> Union[float, int, str, None]:
    if value is None or isinstance(value, (bool, int, str)):
        return value
    value = float(value)
    return value if math.isfinite(value) else repr(value)


@dataclass(slots=True, frozen=True)
class Check:
    name: str
    observed: Number
    expected: Number
    tolerance: Number
    kind: ToleranceKind
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def relative(
        cls, name: str, observed: float, expected: float, rtol: float, **detail
    ) -> "Check":
        scale = max(abs(expected), 1e-300)
        error = abs(observed - expected) / scale
        passed = bool(math.isfinite(observed) and error <= rtol)
        return cls(
            name, observed, expected, rtol, ToleranceKind.RELATIVE, passed, detail
        )

    @classmethod
    def absolute(
        cls, name: str, observed: float, expected: float, atol: float, **detail
    ) -> "Check":
        passed = bool(math.isfinite(observed) and abs(observed - expected) <= atol)
        return cls(
            name, observed, expected, atol, ToleranceKind.ABSOLUTE, passed, detail
        )

    @classmethod
    def sigmas(
        cls,
        name: str,
        mean: float,
        standard_error: float,
        expected: float,
        sigmas: float,
        slack: float = 0.0,
        rtol: float = SIGMA_RTOL,
        **detail,
    ) -> "Check":
        # zero-variance statistics still differ from exact values by rounding
        floor = rtol * max(1.0, abs(expected))
        allowed = max(sigmas * standard_error, slack, floor)
        passed = bool(math.isfinite(mean) and abs(mean - expected) <= allowed)
        detail = {"standard_error": json_number(standard_error), **detail}
        return cls(name, mean, expected, sigmas, ToleranceKind.SIGMAS, passed, detail)

    @classmethod
    def p_value(cls, name: str, p_value: float, alpha: float, **detail) -> "Check":
        return cls(
            name,
            p_value,
            None,
            alpha,
            ToleranceKind.P_VALUE,
            bool(p_value >= alpha),
            detail,
        )

    @classmethod
    def max_error(
        cls, name: str, errors: Sequence[float], tolerance: float, **detail
    ) -> "Check":
        """Worst relative error over a grid of cases."""
        worst = float(np.max(errors)) if len(errors) else 0.0
        detail = {"cases": len(errors), **detail}
        passed = bool(worst <= tolerance)
        return cls(name, worst, 0.0, tolerance, ToleranceKind.RELATIVE, passed, detail)

    @classmethod
    def exact(cls, name: str, observed, expected, **detail) -> "Check":
        return cls(
            name,
            observed,
            expected,
            0,
            ToleranceKind.EXACT,
            bool(observed == expected),
            detail,
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "observed": json_number(self.observed),
            "expected": json_number(self.expected),
            "tolerance": json_number(self.tolerance),
            "kind": self.kind.value,
            "pass": self.passed,
            **({"detail": self.detail} if self.detail else {}),
        }


@dataclass(slots=True)
class RunReport:
    command: List[str]
    params: Dict[str, Any]
    seed_provenance: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)
    started_at: Optional[str] = None
    wall_time: Optional[float] = None
    _started: float = field(default=0.0, repr=False)

    @classmethod
    def start(
        cls, command: List[str], params: Dict[str, Any], seed_provenance: Dict[str, Any]
    ) -> "RunReport":
        report = cls(list(command), dict(params), dict(seed_provenance))
        report.started_at = datetime.now(timezone.utc).isoformat()
        report._started = time.time()
        return report

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        if not check.passed:
            getLogger(self.__class__.__name__).warning(
                "Check failed", extra={"check": check.name, "observed": check.observed}
            )
        return check

    def extend(self, checks: List[Check]) -> None:
        for check in checks:
            self.add(check)

    def finish(self) -> "RunReport":
        self.wall_time = time.time() - self._started
        return self

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def as_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        document = {
            "schema": SCHEMA,
            "command": self.command,
            "params": self.params,
            "seed_provenance": self.seed_provenance,
            "checks": [check.as_dict() for check in self.checks],
            "summary": {
                "checks": len(self.checks),
                "failed": len(self.failures),
                "pass": self.passed,
            },
        }
        if self.notes:
            document["notes"] = self.notes
        if include_timing:
            document["timing"] = {
                "started_at": self.started_at,
                "wall_time": self.wall_time,
            }
        return document

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.as_dict(include_timing), indent=2, sort_keys=True)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_json() + "\n")
        return path
