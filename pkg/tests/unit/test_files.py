import hashlib
import json

import numpy as np
import pytest
from hamcrest import assert_that, equal_to, instance_of

from riesz_kit.algebra import AlgebraMatrix
from riesz_kit.distributions import KotzRieszParams, RieszParams, Variant
from riesz_kit.errors import InvalidParams, MatrixFileError
from riesz_kit.files import (
    MatrixFile,
    load_matrix,
    load_params,
    params_from_data,
    read_document,
    sha256_of,
    write_samples_csv,
    write_samples_json,
)
from riesz_kit.report import SCHEMA
from riesz_kit.samplers import RngStream, sample_kr


@pytest.fixture
def payload():
    return {
        "schema": SCHEMA,
        "beta": 2,
        "rows": 1,
        "cols": 2,
        "entries": [[1.0, 0.5], [-2.0, 0.0]],
    }


@pytest.fixture
def batch():
    params = KotzRieszParams.spherical("I", (1,), n=2, m=1, beta=2)
    return sample_kr(params, 3, RngStream(1))


def test_matrix_file_round_trip(tmp_path):
    components = np.random.default_rng(3).standard_normal((2, 2, 4))
    matrix = AlgebraMatrix.from_components(components, 4)
    path = MatrixFile.from_matrix(matrix).write(tmp_path / "q.json")
    assert_that(load_matrix(path).allclose(matrix), equal_to(True))


def test_matrix_file_entries_are_row_major(payload):
    matrix = MatrixFile.from_payload(payload).to_matrix()
    assert_that(matrix.native.tolist(), equal_to([[1.0 + 0.5j, -2.0 + 0.0j]]))


@pytest.mark.parametrize(
    "change",
    [
        {"schema": "other/1"},
        {"beta": 3},
        {"rows": 0},
        {"cols": True},
        {"entries": [[1.0, 0.5]]},
        {"entries": [[1.0], [2.0]]},
        {"entries": [[1.0, float("nan")], [2.0, 0.0]]},
        {"entries": "1,2"},
    ],
)
def test_malformed_matrix_files(payload, change):
    with pytest.raises(MatrixFileError):
        MatrixFile.from_payload({**payload, **change})


def test_missing_keys_are_reported(payload):
    del payload["entries"]
    with pytest.raises(MatrixFileError, match="entries"):
        MatrixFile.from_payload(payload)


def test_unreadable_files_are_reported(tmp_path):
    with pytest.raises(MatrixFileError):
        read_document(tmp_path / "missing.json")
    broken = tmp_path / "broken.yaml"
    broken.write_text("a: [1, 2\n")
    with pytest.raises(MatrixFileError):
        read_document(broken)


def test_exponent_floats_keep_their_type(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text('{"tolerance": 1e-05}')
    assert_that(read_document(path), equal_to({"tolerance": 1e-05}))


def test_yaml_parameters_with_inline_matrices(tmp_path):
    path = tmp_path / "riesz.yaml"
    path.write_text(
        "family: riesz\nvariant: II\na: 4.0\nkappa: [1]\nbeta: 1\n"
        "sigma: [[2.0, 0.5], [0.5, 1.0]]\n"
    )
    params = load_params(path)
    assert_that(params, instance_of(RieszParams))
    assert_that(params.variant, equal_to(Variant.TYPE_II))
    assert_that(params.m, equal_to(2))


def test_parameters_can_reference_matrix_files(tmp_path, payload):
    column = MatrixFile.from_payload({**payload, "rows": 2, "cols": 1})
    column.write(tmp_path / "mu.json")
    data = {"variant": "I", "kappa": [1], "n": 2, "m": 1, "beta": 2, "mu": "mu.json"}
    params = params_from_data(data, tmp_path)
    assert_that(params, instance_of(KotzRieszParams))
    assert_that(params.mu.shape, equal_to((2, 1)))


@pytest.mark.parametrize(
    "data",
    [
        {"family": "wishart"},
        {"family": "riesz", "variant": "I", "a": 2.0, "kappa": [], "beta": 1},
        {"variant": "I", "kappa": [1], "n": 2, "m": 1, "beta": 1, "lambda": 3},
        ["not", "a", "mapping"],
    ],
)
def test_invalid_parameter_documents(data):
    with pytest.raises(InvalidParams):
        params_from_data(data)


def test_samples_as_csv(tmp_path, batch):
    path = write_samples_csv(batch, tmp_path / "draws.csv")
    lines = path.read_text().splitlines()
    assert_that(lines[0], equal_to("draw,x_1_1_1,x_1_1_2,x_2_1_1,x_2_1_2"))
    assert_that(len(lines), equal_to(4))
    assert_that(lines[2].split(",")[0], equal_to("1"))


def test_samples_as_json_can_be_read_back(tmp_path, batch):
    path = write_samples_json(batch, tmp_path / "draws.json")
    assert_that(len(json.loads(path.read_text())), equal_to(3))
    second = load_matrix(path, index=1)
    assert_that(second.allclose(batch.matrices()[1]), equal_to(True))
    with pytest.raises(MatrixFileError):
        load_matrix(path, index=3)


def test_sha256_of_a_file(tmp_path):
    path = tmp_path / "data.bin"
    path.write_bytes(b"riesz")
    assert_that(sha256_of(path), equal_to(hashlib.sha256(b"riesz").hexdigest()))
