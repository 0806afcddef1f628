import math

import numpy as np
import pytest
from hamcrest import (
    assert_that,
    close_to,
    contains_exactly,
    equal_to,
    has_entries,
    has_item,
    starts_with,
)

from riesz_kit.errors import DomainViolation
from riesz_kit.report import Check
from riesz_kit.samplers import RngStream
from riesz_kit.settings import ValidationSettings
from riesz_kit.special import Partition, log_q_kappa
from riesz_kit.suites import (
    SUITE_STREAM_IDS,
    SUITES,
    CfSelection,
    SuiteRunner,
    grid_label,
    log_relative_error,
    random_hermitian_pd,
    reflected_log_q_inverse,
    run_validation,
)


@pytest.fixture
def settings():
    return ValidationSettings(seed=3, random_matrices=3)


def test_empty_selection_matches_everything():
    selection = CfSelection()
    assert_that(selection.empty, equal_to(True))
    assert_that(selection.matches(2, 3, 1, Partition.of(1)), equal_to(True))


def test_selection_restricts_cases():
    selection = CfSelection(m=2, kappa=Partition.of(1))
    assert_that(selection.matches(2, 4, 2, Partition.of(1)), equal_to(True))
    assert_that(selection.matches(2, 4, 2, Partition.of(2)), equal_to(False))
    assert_that(
        selection.as_dict(),
        equal_to({"m": 2, "n": None, "beta": None, "kappa": [1]}),
    )


def test_log_relative_error():
    assert_that(log_relative_error(1.0, 1.0), equal_to(0.0))
    assert_that(log_relative_error(math.log(1.5), 0.0), close_to(0.5, 1e-15))
    assert_that(log_relative_error(math.inf, 0.0), equal_to(math.inf))


def test_grid_labels_keep_their_order():
    assert_that(grid_label(m=2, beta=4), equal_to("m=2,beta=4"))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_inverse_power_from_trailing_minors(beta):
    p = random_hermitian_pd(np.random.default_rng(50 + beta), 4, beta)
    partitions = (Partition.of(3, 1), Partition.of(2, 2, 1), Partition.of(1, 1, 1, 1))
    for kappa in partitions:
        assert_that(
            reflected_log_q_inverse(p, kappa),
            close_to(log_q_kappa(p.inverse(), kappa), 1e-9),
        )


def test_unknown_suite_is_rejected(settings):
    with pytest.raises(DomainViolation):
        SuiteRunner(settings).run("wishart")


def test_suite_streams_are_keyed_by_suite(settings):
    stream = SuiteRunner(settings).stream("jack", 2)
    expected = RngStream(3, SUITE_STREAM_IDS["jack"]).derive(2)
    assert_that(stream.stream_id, equal_to(expected.stream_id))


def test_all_runs_every_suite_in_order(settings, mocker):
    runner = SuiteRunner(settings)
    calls = []
    for suite in SUITES:
        check = Check.exact(suite, 1, 1)
        mocker.patch.object(
            runner,
            f"run_{suite}",
            side_effect=lambda check=check: calls.append(check.name) or [check],
        )
    checks = runner.run("all")
    assert_that([check.name for check in checks], equal_to(list(SUITES)))
    assert_that(calls, contains_exactly(*SUITES))


def test_validation_report_records_the_run(settings, mocker):
    mocker.patch.object(
        SuiteRunner, "run_cf", return_value=[Check.exact("cf_case", 1, 1)]
    )
    selection = CfSelection(m=1, n=1, beta=1, kappa=Partition.zero())
    report = run_validation("cf", settings, ["validate", "cf"], selection)
    document = report.as_dict()
    assert_that(document["params"], has_entries(suite="cf"))
    assert_that(document["params"]["selection"], has_entries(m=1, kappa=[]))
    assert_that(document["seed_provenance"], has_entries(seed=3))
    summary = {"checks": 1, "failed": 0, "pass": True}
    assert_that(document["summary"], equal_to(summary))


def test_special_function_suite_is_reproducible(settings):
    first = run_validation("specialfun", settings).as_dict(include_timing=False)
    second = run_validation("specialfun", settings).as_dict(include_timing=False)
    assert_that(first, equal_to(second))
    names = [check["name"] for check in first["checks"]]
    assert_that(names, has_item(starts_with("gamma_plus[")))
    assert_that(names, has_item(starts_with("qkappa_inverse_reflected[")))
    assert_that(names, has_item("pochhammer[a=2,kappa=(2,1),beta=1]"))


def test_jack_suite_passes():
    report = run_validation("jack", ValidationSettings(seed=42, random_matrices=3))
    assert_that([check.name for check in report.failures], equal_to([]))
    names = [check.name for check in report.checks]
    assert_that(names, has_item(starts_with("jack_power_sum[")))


@pytest.mark.integration
def test_every_suite_passes_with_default_settings():
    report = run_validation("all", ValidationSettings(seed=42))
    assert_that([check.name for check in report.failures], equal_to([]))
    names = [check.name for check in report.checks]
    assert_that(names, has_item(starts_with("unitary_average")))
