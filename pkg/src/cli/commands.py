"""
Command line front end.
Follows Single Responsibility Principle: Only parses arguments, wires the
settings and services together and maps outcomes to exit codes.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from config.settings import Settings
from src.lab.suite import SUITES
from src.services.experiment_service import ExperimentService
from src.services.report_service import ReportService
from src.utils.errors import PostconditionFailed
from src.utils.logger import get_logger, setup_logger
from src.utils.validators import parse_params

EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_ERROR = 2

DEFAULT_EPS = (0.1, 0.01, 0.001)


def float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per pipeline step."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default="config/config.yaml", help="YAML configuration file")
    common.add_argument('--log-level', default=None, help="console log level override")
    common.add_argument('--threads', type=int, default=None, help="worker cap")
    common.add_argument('--tol-eigen', type=float, default=None, help="eigen-residual tolerance")
    common.add_argument('--tol-class', type=float, default=None, help="relative eigenvalue class tolerance")

    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Quantum-walk almost uniform sampling: analysis, sampling and verification lab."
    )
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', parents=[common], help="build a transition matrix")
    generate.add_argument('--family', required=True, choices=["cycle", "torus", "hypercube", "complete", "custom"])
    generate.add_argument('--params', default="", help="k=v,... e.g. p=5,d=2 or N=8,self_loops=true,lazy=true")
    generate.add_argument('--adjacency', type=Path, default=None, help="adjacency JSON {rows: [...]} for custom")
    generate.add_argument('--out', type=Path, required=True)

    analyze = commands.add_parser('analyze', parents=[common], help="classical and quantum mixing report")
    analyze.add_argument('--matrix', type=Path, required=True)
    analyze.add_argument('--eps', type=float_list, default=list(DEFAULT_EPS))
    analyze.add_argument('--out', type=Path, required=True)

    cesaro = commands.add_parser('cesaro', parents=[common], help="finite Cesaro average P_T-bar")
    cesaro.add_argument('--matrix', type=Path, required=True)
    cesaro.add_argument('--T', type=float, required=True)
    cesaro.add_argument('--out', type=Path, required=True)

    pi = commands.add_parser('pi', parents=[common], help="limit matrix Pi and its 1/N^2 floor")
    pi.add_argument('--matrix', type=Path, required=True)
    pi.add_argument('--out', type=Path, default=None)

    qmix = commands.add_parser('qmix', parents=[common], help="quantum mixing time")
    qmix.add_argument('--matrix', type=Path, required=True)
    qmix.add_argument('--eps', type=float, required=True)
    qmix.add_argument('--out', type=Path, default=None)

    sample = commands.add_parser('sample', parents=[common], help="run the quantum sampler")
    sample.add_argument('--matrix', type=Path, required=True)
    sample.add_argument('--eps', type=float, required=True)
    sample.add_argument('--mode', choices=["single", "double", "exact"], default="double")
    sample.add_argument('--trials', type=int, default=None)
    sample.add_argument('--seed', type=int, default=None)
    sample.add_argument('--x0', type=int, default=0, help="initial state")
    sample.add_argument('--trace', type=Path, default=None, help="per-trial CSV")
    sample.add_argument('--out', type=Path, required=True)

    conjecture = commands.add_parser('conjecture', parents=[common], help="run a verification suite")
    conjecture.add_argument('--suite', choices=list(SUITES), default="all")
    conjecture.add_argument('--out', type=Path, required=True)

    trotter = commands.add_parser('trotter', parents=[common], help="Lie product error sweep")
    trotter.add_argument('--matrix', type=Path, required=True)
    trotter.add_argument('--t', type=float, default=1.0)
    trotter.add_argument('--j', type=int_list, default=[4, 8, 16, 32])
    trotter.add_argument('--out', type=Path, required=True)

    report = commands.add_parser('report', parents=[common], help="aggregate analyze/qmix/sample JSON")
    report.add_argument('--inputs', type=Path, nargs='+', required=True)
    report.add_argument('--out', type=Path, required=True)

    return parser


def load_settings(args: argparse.Namespace) -> Settings:
    """
    Settings from the YAML file with command-line overrides applied.

    Raises:
        FileNotFoundError: If the config file is missing
        ValueError: If an override is out of range
    """
    settings = Settings.load(args.config).with_overrides(
        tol_eigen=args.tol_eigen, tol_class=args.tol_class, threads=args.threads
    )
    sampling = settings.sampling
    if getattr(args, 'seed', None) is not None:
        sampling = replace(sampling, seed=args.seed)
    if getattr(args, 'trials', None) is not None:
        sampling = replace(sampling, trials=args.trials)
    logging_config = settings.logging
    if args.log_level:
        logging_config = replace(logging_config, console_level=args.log_level.upper())
    settings = replace(settings, sampling=sampling, logging=logging_config)
    settings.validate()
    return settings


def _emit(data: dict) -> None:
    print(json.dumps(data, indent=2, default=str))


def _generate(service: ExperimentService, args: argparse.Namespace) -> int:
    matrix = service.generate(args.family, parse_params(args.params), args.out, args.adjacency)
    _emit({'graph': matrix.label, 'N': matrix.n_states, 'out': str(args.out)})
    return EXIT_OK


def _analyze(service: ExperimentService, args: argparse.Namespace) -> int:
    report = service.analyze(args.matrix, args.eps, args.out)
    _emit({'graph': report.graph, 'spectral_gap': report.spectral_gap, 'tau_mix': report.tau_mix,
           'tau_prime_mix': report.tau_prime_mix, 'alpha': report.alpha})
    return EXIT_OK


def _cesaro(service: ExperimentService, args: argparse.Namespace) -> int:
    snapshot = service.cesaro(args.matrix, args.T, args.out)
    _emit({'kind': snapshot.kind.value, 'T': snapshot.parameter, 'N': snapshot.n_states, 'out': str(args.out)})
    return EXIT_OK


def _pi(service: ExperimentService, args: argparse.Namespace) -> int:
    summary = service.pi(args.matrix, args.out)
    _emit(summary)
    return EXIT_OK if summary['passes'] else EXIT_ASSERTION_FAILED


def _qmix(service: ExperimentService, args: argparse.Namespace) -> int:
    _emit(service.qmix(args.matrix, args.eps, args.out))
    return EXIT_OK


def _sample(service: ExperimentService, args: argparse.Namespace) -> int:
    summary = service.sample(args.matrix, args.eps, args.mode, args.out, args.trace, args.x0)
    _emit(summary.to_dict())
    if args.mode != "single" and summary.tv_to_uniform_exact > args.eps + service.tolerances.comparison_slack:
        return EXIT_ASSERTION_FAILED
    return EXIT_OK


def _conjecture(service: ExperimentService, args: argparse.Namespace) -> int:
    report = service.conjecture(args.suite, args.out)
    _emit({'suite': report.suite, 'passed': report.passed, 'failed': report.failed_checks()})
    return EXIT_OK if report.passed else EXIT_ASSERTION_FAILED


def _trotter(service: ExperimentService, args: argparse.Namespace) -> int:
    rows = service.trotter(args.matrix, args.t, args.j, args.out)
    _emit({'rows': [row.model_dump() for row in rows], 'out': str(args.out)})
    return EXIT_OK


def _report(service: ExperimentService, args: argparse.Namespace) -> int:
    rows = ReportService(service.store).write(args.inputs, args.out)
    _emit({'rows': len(rows), 'out': str(args.out)})
    return EXIT_OK


HANDLERS: Dict[str, Callable[[ExperimentService, argparse.Namespace], int]] = {
    'generate': _generate,
    'analyze': _analyze,
    'cesaro': _cesaro,
    'pi': _pi,
    'qmix': _qmix,
    'sample': _sample,
    'conjecture': _conjecture,
    'trotter': _trotter,
    'report': _report,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 when a requested assertion or guaranteed bound failed, 2 on invalid input or errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    try:
        settings = load_settings(args)
        setup_logger(settings.logging, command=args.command)
    except (FileNotFoundError, ValueError, TypeError) as e:
        print(f"ERROR: Failed to load configuration: {e}", file=sys.stderr)
        return EXIT_ERROR

    logger = get_logger(__name__)
    logger.info(f"qwalk {args.command} started")

    try:
        service = ExperimentService(settings)
        code = HANDLERS[args.command](service, args)
    except json.JSONDecodeError as e:
        logger.error(f"Malformed JSON input: {e}")
        print(f"ERROR: malformed JSON: {e}", file=sys.stderr)
        return EXIT_ERROR
    except PostconditionFailed as e:
        logger.error(f"{args.command} broke a guaranteed bound: {e}")
        print(f"ASSERTION FAILED: {e}", file=sys.stderr)
        return EXIT_ASSERTION_FAILED
    except (ValueError, RuntimeError, OSError, KeyError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_ERROR

    stats = service.get_statistics()
    logger.info(
        f"qwalk {args.command} finished with exit code {code}; "
        f"{stats['artifacts_written']} artifacts, {stats['total_size_bytes']} bytes"
    )
    return code
