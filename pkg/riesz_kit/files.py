import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import yaml

from .algebra import SUPPORTED_BETAS, AlgebraMatrix
from .distributions import KotzRieszParams, Params, RieszParams
from .errors import InvalidParams, MatrixFileError
from .report import SCHEMA
from .samplers import SampleBatch

PathLike = Union[str, Path]
FAMILIES = ("kotz_riesz", "riesz")
MATRIX_KEYS = {"kotz_riesz": ("mu", "theta", "sigma"), "riesz": ("sigma",)}


def _is_number(value: Any) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
    )


@dataclass(slots=True, frozen=True)
class MatrixFile:
    beta: int
    rows: int
    cols: int
    entries: List[List[float]]

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "MatrixFile":
        if not isinstance(payload, dict):
            raise MatrixFileError("a matrix file must hold a JSON object")
        schema = payload.get("schema", SCHEMA)
        if schema != SCHEMA:
            raise MatrixFileError(f"unsupported schema {schema!r}, expected {SCHEMA!r}")
        try:
            beta, rows, cols = payload["beta"], payload["rows"], payload["cols"]
            entries = payload["entries"]
        except KeyError as e:
            raise MatrixFileError(f"matrix file is missing {e.args[0]!r}") from e
        if beta not in SUPPORTED_BETAS:
            raise MatrixFileError(
                f"beta must be one of {SUPPORTED_BETAS}, got {beta!r}"
            )
        for name, value in (("rows", rows), ("cols", cols)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise MatrixFileError(
                    f"{name} must be a positive integer, got {value!r}"
                )
        if not isinstance(entries, list) or len(entries) != rows * cols:
            raise MatrixFileError(f"expected {rows * cols} entries")
        for index, entry in enumerate(entries):
            if not isinstance(entry, list) or len(entry) != beta:
                raise MatrixFileError(f"entry {index} must have {beta} components")
            if not all(_is_number(c) for c in entry):
                raise MatrixFileError(f"entry {index} has a non-finite component")
        return cls(beta, rows, cols, [[float(c) for c in entry] for entry in entries])

    @classmethod
    def from_matrix(cls, matrix: AlgebraMatrix) -> "MatrixFile":
        components = matrix.components.reshape(matrix.rows * matrix.cols, matrix.beta)
        return cls(matrix.beta, matrix.rows, matrix.cols, components.tolist())

    @classmethod
    def load(cls, path: PathLike) -> "MatrixFile":
        return cls.from_payload(read_document(path))

    def to_matrix(self) -> AlgebraMatrix:
        return AlgebraMatrix.from_entries(self.entries, self.rows, self.cols, self.beta)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "beta": self.beta,
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries,
        }

    def write(self, path: PathLike) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_payload()) + "\n")
        return path


def read_document(path: PathLike) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise MatrixFileError(f"cannot read {path}: {e.strerror}") from e
    # YAML 1.1 reads exponent floats without a dot as strings, so JSON goes first.
    try:
        return json.loads(text)
    except ValueError:
        pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise MatrixFileError(f"{path} is neither JSON nor YAML") from e


def load_matrix(path: PathLike, index: int = 0) -> AlgebraMatrix:
    """Read a matrix file, or draw ``index`` of a JSON sample file."""
    document = read_document(path)
    if isinstance(document, list):
        if not 0 <= index < len(document):
            raise MatrixFileError(
                f"{path} holds {len(document)} matrices, no index {index}"
            )
        document = document[index]
    return MatrixFile.from_payload(document).to_matrix()


def matrix_from_data(value: Any, beta: int, base: Path) -> AlgebraMatrix:
    if isinstance(value, str):
        return load_matrix(base / value)
    if isinstance(value, dict):
        return MatrixFile.from_payload(value).to_matrix()
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise MatrixFileError(f"cannot read matrix from {value!r}") from e
    if array.ndim == 2:
        return AlgebraMatrix.from_real(array, beta)
    if array.ndim == 3:
        return AlgebraMatrix.from_components(array, beta)
    raise MatrixFileError(f"matrix entries have {array.ndim} dimensions")


def params_from_data(data: Dict[str, Any], base: Path = Path(".")) -> Params:
    if not isinstance(data, dict):
        raise InvalidParams(["a parameter file must hold a mapping"])
    family = data.get("family", "kotz_riesz")
    if family not in FAMILIES:
        raise InvalidParams([f"unknown family {family!r}, expected one of {FAMILIES}"])
    data = dict(data)
    beta = data.get("beta", 1)
    for key in MATRIX_KEYS[family]:
        if data.get(key) is not None:
            data[key] = matrix_from_data(data[key], beta, base)
    factory = KotzRieszParams if family == "kotz_riesz" else RieszParams
    try:
        return factory.from_file_data(**data)
    except TypeError as e:
        raise InvalidParams([f"bad {family} parameters: {e}"]) from e


def load_params(path: PathLike) -> Params:
    path = Path(path)
    return params_from_data(read_document(path), path.parent)


def _batch_shape(batch: SampleBatch):
    scale = 2 if batch.beta == 4 else 1
    rows, cols = batch.natives.shape[1] // scale, batch.natives.shape[2] // scale
    return rows, cols, batch.beta


def write_samples_csv(batch: SampleBatch, path: PathLike) -> Path:
    path = Path(path)
    rows, cols, beta = _batch_shape(batch)
    header = ["draw"] + [
        f"x_{r + 1}_{c + 1}_{k + 1}"
        for r in range(rows)
        for c in range(cols)
        for k in range(beta)
    ]
    flat = batch.components().reshape(batch.count, rows * cols * beta)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for index, values in enumerate(flat):
            writer.writerow([index] + [repr(float(v)) for v in values])
    return path


def write_samples_json(batch: SampleBatch, path: PathLike) -> Path:
    path = Path(path)
    payloads = [
        MatrixFile.from_matrix(matrix).to_payload() for matrix in batch.matrices()
    ]
    path.write_text(json.dumps(payloads) + "\n")
    return path


SAMPLE_WRITERS = {"csv": write_samples_csv, "json": write_samples_json}


def sha256_of(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()
