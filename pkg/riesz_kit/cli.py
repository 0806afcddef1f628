import argparse
import json
import logging
import sys
from logging import getLogger
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .algebra import SUPPORTED_BETAS, HermitianPD
from .distributions import KotzRieszParams, log_density_kr, log_density_riesz
from .errors import DomainError, InvalidParams, InvalidPartition, UnsupportedError
from .files import SAMPLE_WRITERS, load_matrix, load_params, sha256_of
from .jack import DEFAULT_DEGREE_MAX, hyper_0F1, jack_C
from .report import json_number
from .samplers import DEFAULT_CHUNK_SIZE, RngStream, sample_kr, sample_riesz
from .settings import ValidationSettings
from .special import (
    GammaDomain,
    Partition,
    gen_pochhammer,
    log_mv_gamma_weighted,
    log_q_kappa,
    stiefel_log_volume,
)
from .suites import SUITE_NAMES, CfSelection, run_validation

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_UNSUPPORTED = 4

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

LOGGER = getLogger(__name__)


def partition_arg(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except InvalidPartition as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def floats_arg(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",") if value.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected comma separated numbers: {text!r}"
        ) from e


def beta_arg(text: str) -> int:
    try:
        beta = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"beta must be an integer: {text!r}") from e
    if beta not in SUPPORTED_BETAS:
        raise argparse.ArgumentTypeError(f"beta must be one of {SUPPORTED_BETAS}")
    return beta


def log_and_value(log_value: float) -> Dict[str, Any]:
    with np.errstate(over="ignore"):
        value = float(np.exp(log_value))
    return {"log": json_number(log_value), "value": json_number(value)}


def emit(payload: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def cmd_special_gamma(args: argparse.Namespace) -> int:
    build = GammaDomain.plus if args.sign == "plus" else GammaDomain.minus
    domain = build(args.a, args.kappa, args.m, args.beta)
    emit(log_and_value(log_mv_gamma_weighted(domain)))
    return EXIT_PASSED


def cmd_special_qkappa(args: argparse.Namespace) -> int:
    matrix = HermitianPD.from_matrix(load_matrix(args.matrix, args.index))
    emit(log_and_value(log_q_kappa(matrix, args.kappa)))
    return EXIT_PASSED


def cmd_special_pochhammer(args: argparse.Namespace) -> int:
    result = gen_pochhammer(args.a, args.kappa, args.beta)
    emit(
        {
            "log_abs": json_number(result.log_abs),
            "sign": result.sign,
            "value": json_number(result.value),
        }
    )
    return EXIT_PASSED


def cmd_special_volume(args: argparse.Namespace) -> int:
    emit(log_and_value(stiefel_log_volume(args.n, args.m, args.beta)))
    return EXIT_PASSED


def cmd_special_jack(args: argparse.Namespace) -> int:
    value = jack_C(args.kappa, np.array(args.eigs), args.beta)
    emit({"value": json_number(value)})
    return EXIT_PASSED


def cmd_special_hyper0f1(args: argparse.Namespace) -> int:
    result = hyper_0F1(args.b, args.eigs, args.beta, args.t_max)
    emit(
        {
            "value": json_number(result.value),
            "tail": json_number(result.tail),
            "converged": result.converged,
            "contributions": [json_number(c) for c in result.contributions],
        }
    )
    return EXIT_PASSED


def cmd_density(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    point = load_matrix(args.point, args.index)
    if isinstance(params, KotzRieszParams):
        log_density = log_density_kr(params, point)
        convention = params.sigma_factor_convention.value
    else:
        log_density = log_density_riesz(params, HermitianPD.from_matrix(point))
        convention = None
    emit(
        {
            "log_density": json_number(log_density),
            "family": params.describe()["family"],
            "variant": params.variant.value,
            "convention": convention,
        }
    )
    return EXIT_PASSED


def cmd_sample(args: argparse.Namespace) -> int:
    params = load_params(args.params).validate()
    if args.count < 0:
        raise InvalidParams([f"count must be nonnegative, got {args.count}"])
    rng = RngStream(args.seed, args.stream)
    draw = sample_kr if isinstance(params, KotzRieszParams) else sample_riesz
    batch = draw(params, args.count, rng, args.chunk_size, args.workers)
    out = SAMPLE_WRITERS[args.format](batch, args.out)
    emit(
        {
            "out": str(out),
            "format": args.format,
            "count": batch.count,
            "sha256": sha256_of(out),
            "seed_provenance": batch.provenance(),
        }
    )
    return EXIT_PASSED


def cmd_validate(args: argparse.Namespace) -> int:
    settings = ValidationSettings()
    if args.config:
        settings = ValidationSettings.from_yaml(args.config)
    settings = settings.with_overrides(
        seed=args.seed, draws=args.draws, workers=args.workers
    )
    selection = CfSelection(m=args.m, n=args.n, beta=args.beta, kappa=args.kappa)
    report = run_validation(args.suite, settings, args.command, selection)
    if args.report:
        report.write(args.report)
    emit(report.as_dict())
    if not report.passed:
        LOGGER.warning(
            "Validation failed",
            extra={"suite": args.suite, "failed": len(report.failures)},
        )
        return EXIT_FAILED
    return EXIT_PASSED


def _special_parser(subcommands) -> None:
    special = subcommands.add_parser("special", help="evaluate a special function")
    functions = special.add_subparsers(dest="function", required=True)

    gamma = functions.add_parser("gamma", help="weighted multivariate gamma")
    gamma.add_argument("--a", type=float, required=True)
    gamma.add_argument("--m", type=int, required=True)
    gamma.add_argument("--beta", type=beta_arg, required=True)
    gamma.add_argument("--kappa", type=partition_arg, default=Partition.zero())
    gamma.add_argument("--sign", choices=("plus", "minus"), default="plus")
    gamma.set_defaults(handler=cmd_special_gamma)

    qkappa = functions.add_parser("qkappa", help="generalized power of a matrix file")
    qkappa.add_argument("--matrix", type=Path, required=True)
    qkappa.add_argument("--kappa", type=partition_arg, required=True)
    qkappa.add_argument("--index", type=int, default=0)
    qkappa.set_defaults(handler=cmd_special_qkappa)

    pochhammer = functions.add_parser(
        "pochhammer", help="generalized Pochhammer symbol"
    )
    pochhammer.add_argument("--a", type=float, required=True)
    pochhammer.add_argument("--kappa", type=partition_arg, required=True)
    pochhammer.add_argument("--beta", type=beta_arg, required=True)
    pochhammer.set_defaults(handler=cmd_special_pochhammer)

    volume = functions.add_parser("volume", help="volume of the Stiefel manifold")
    volume.add_argument("--n", type=int, required=True)
    volume.add_argument("--m", type=int, required=True)
    volume.add_argument("--beta", type=beta_arg, required=True)
    volume.set_defaults(handler=cmd_special_volume)

    jack = functions.add_parser("jack", help="Jack polynomial in C normalization")
    jack.add_argument("--kappa", type=partition_arg, required=True)
    jack.add_argument("--eigs", type=floats_arg, required=True)
    jack.add_argument("--beta", type=beta_arg, required=True)
    jack.set_defaults(handler=cmd_special_jack)

    hyper = functions.add_parser("hyper0f1", help="truncated 0F1 of a matrix argument")
    hyper.add_argument("--b", type=float, required=True)
    hyper.add_argument("--eigs", type=floats_arg, required=True)
    hyper.add_argument("--beta", type=beta_arg, required=True)
    hyper.add_argument("--t-max", type=int, default=DEFAULT_DEGREE_MAX)
    hyper.set_defaults(handler=cmd_special_hyper0f1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riesz-kit",
        description="Kotz-Riesz and Riesz matrix variate distributions.",
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    subcommands = parser.add_subparsers(dest="command_name", required=True)
    _special_parser(subcommands)

    density = subcommands.add_parser("density", help="log density at a point")
    density.add_argument("--params", type=Path, required=True)
    density.add_argument("--point", type=Path, required=True)
    density.add_argument("--index", type=int, default=0)
    density.set_defaults(handler=cmd_density)

    sample = subcommands.add_parser("sample", help="draw samples to a file")
    sample.add_argument("--params", type=Path, required=True)
    sample.add_argument("--count", type=int, required=True)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--stream", type=int, default=0)
    sample.add_argument("--out", type=Path, required=True)
    sample.add_argument("--format", choices=tuple(SAMPLE_WRITERS), default="csv")
    sample.add_argument("--workers", type=int, default=1)
    sample.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    sample.set_defaults(handler=cmd_sample)

    validate = subcommands.add_parser("validate", help="run a validation suite")
    validate.add_argument("suite", choices=SUITE_NAMES)
    validate.add_argument("--seed", type=int)
    validate.add_argument("--draws", type=int)
    validate.add_argument("--workers", type=int)
    validate.add_argument("--report", type=Path)
    validate.add_argument("--config", type=Path)
    validate.add_argument("--m", type=int)
    validate.add_argument("--n", type=int)
    validate.add_argument("--beta", type=beta_arg)
    validate.add_argument("--kappa", type=partition_arg)
    validate.set_defaults(handler=cmd_validate)
    return parser


def report_error(error: Exception) -> None:
    sys.stderr.write(f"riesz-kit: {error}\n")
    for violation in getattr(error, "violations", ()):
        sys.stderr.write(f"  - {violation}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.command = argv
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)
    try:
        return args.handler(args)
    except DomainError as e:
        report_error(e)
        return EXIT_DOMAIN
    except UnsupportedError as e:
        report_error(e)
        return EXIT_UNSUPPORTED
    except OSError as e:
        report_error(e)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
