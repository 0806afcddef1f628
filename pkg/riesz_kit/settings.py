from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from .errors import InvalidParams


def _coerce(kind: type, value: Any) -> Any:
    if isinstance(value, bool):
        raise TypeError(f"booleans are not {kind.__name__}s")
    converted = kind(value)
    if kind is int and float(value) != converted:
        raise ValueError(f"{value!r} is not integral")
    return converted


@dataclass(slots=True, frozen=True)
class ValidationSettings:
    """Pre-registered tolerances, draw counts and budgets of the validation suites."""

    draws: int = 100_000
    haar_draws: int = 10_000
    seed: int = 0
    moment_sigmas: float = 3.0
    haar_sigmas: float = 4.0
    ks_alpha: float = 0.01
    identity_rtol: float = 1e-12
    qkappa_rtol: float = 1e-10
    jack_rtol: float = 1e-10
    quadrature_tol: float = 1e-8
    density_norm_tol: float = 1e-6
    cf_t_max: int = 8
    random_matrices: int = 100
    node_budget: int = 2_000_000
    workers: int = 1
    chunk_size: int = 8192

    @classmethod
    def from_file_data(cls, **data: Any) -> "ValidationSettings":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise InvalidParams([f"unknown setting {name!r}" for name in unknown])
        defaults = cls()
        values = {}
        problems = []
        for name, value in data.items():
            kind = type(getattr(defaults, name))
            try:
                values[name] = _coerce(kind, value)
            except (TypeError, ValueError, OverflowError):
                problems.append(
                    f"setting {name!r} must be {kind.__name__}, got {value!r}"
                )
        if problems:
            raise InvalidParams(problems)
        return replace(defaults, **values).validate()

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "ValidationSettings":
        with open(path) as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise InvalidParams([f"settings file {path} is not valid YAML"]) from e
        if not isinstance(data, dict):
            raise InvalidParams([f"settings file {path} must hold a mapping"])
        return cls.from_file_data(**data)

    def validate(self) -> "ValidationSettings":
        problems = [
            f"{name} must be positive"
            for name in ("draws", "haar_draws", "random_matrices", "node_budget")
            + ("workers", "chunk_size", "moment_sigmas", "haar_sigmas")
            if not getattr(self, name) > 0
        ]
        if self.seed < 0:
            problems.append("seed must be nonnegative")
        if not 0 < self.ks_alpha < 1:
            problems.append("ks_alpha must lie in (0, 1)")
        if problems:
            raise InvalidParams(problems)
        return self

    def with_overrides(self, **overrides: Any) -> "ValidationSettings":
        present = {
            name: value for name, value in overrides.items() if value is not None
        }
        return replace(self, **present).validate() if present else self

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)
