"""
Command-line interface.  Exit status 0 means every check passed, 1 means
some check failed, 2 means the input was refused.
"""
import argparse
import logging
import os
import sys
from collections import namedtuple
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .certify import brute_min_families, verify_certificate
from .config import load_settings
from .core import Window, materialize
from .documents import (
    format_asymorphism_report,
    format_certificate,
    format_certificate_report,
    format_lines,
    format_macro_report,
    format_probe_report,
    format_relation,
    format_sequence,
    parse_certificate,
    read_text,
    write_krule,
    write_text,
)
from .exceptions import CoarseError
from .groups import halving_schedule
from .helper_funcs import parse_fraction, value_to_str
from .maps import VALIDATED, check_macro_uniform
from .pipelines import (
    axioms_suite,
    chain_obstruction_suite,
    convergent_sequence_run,
    oracle_consistency_suite,
    shell_certificate_run,
    sum_space_run,
)
from .rules import parse_rule
from .shellpart import augment, shell_partition

logger = logging.getLogger(__name__)

RunConfig = namedtuple(
    "RunConfig",
    [
        "subcommand",
        "sizes",
        "seed",
        "brute_force_cap",
        "dense_threshold",
        "search_budget",
        "output_dir",
        "version",
    ],
)
"""
Everything a run depends on; equal configs give byte-identical output.

:param str subcommand: The subcommand name.
:param tuple sizes: Window sizes (or ladder) of the run.
:param int seed: Seed for randomized suites.
:param int brute_force_cap: Largest window for the oracle.
:param int dense_threshold: Largest window materialized densely.
:param int search_budget: Exponents scanned per tolerance step.
:param str output_dir: Directory documents are written to.
:param str version: Format version written into documents.
"""


class UsageError(CoarseError):
    """Raised instead of argparse's exit so run() can report one line."""

    def __init__(self, message: str):
        self.message = message

    def __str__(self):
        return self.message


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


MAPS = {
    "identity": lambda n: n,
    "double": lambda n: 2 * n,
    "square": lambda n: n * n,
}


def _ladder(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    return sizes


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad fraction {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pycoarse",
        description="Certificates and checks for coarse structures on windows.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--out", default=None, help="output directory (PYCOARSE_OUTPUT_DIR)"
    )
    parser.add_argument("--verbose", action="store_true")
    commands = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    materialize_cmd = commands.add_parser("materialize")
    materialize_cmd.add_argument("--n", type=int, required=True)
    materialize_cmd.add_argument("--rule", required=True)

    shells = commands.add_parser("shells")
    shells.add_argument("--n", type=int, required=True)
    shells.add_argument("--rule", required=True)
    shells.add_argument("--base", type=int, default=0)

    certify = commands.add_parser("certify")
    certify.add_argument("path")

    brute = commands.add_parser("brute-dim")
    brute.add_argument("--n", type=int, required=True)
    brute.add_argument("--e", required=True)
    brute.add_argument("--h", required=True)
    brute.add_argument("--cap", type=int, default=None)

    thm1 = commands.add_parser("thm1-demo")
    thm1.add_argument("--n", type=int, default=10000)
    thm1.add_argument("--rule", default="interval:3")

    thm2 = commands.add_parser("thm2-demo")
    thm2.add_argument("--h", type=_fraction, default=Fraction(1, 3))
    thm2.add_argument(
        "--schedule", type=_fraction, default=Fraction(1, 10),
        help="first tolerance of the halving schedule",
    )
    thm2.add_argument("--steps", type=int, default=15)
    thm2.add_argument("--ladder", type=_ladder, default=[256, 1024, 4096])
    thm2.add_argument("--rules", type=int, default=5)
    thm2.add_argument("--width", type=int, default=3)

    thm3 = commands.add_parser("thm3-demo")
    thm3.add_argument("--m", type=int, default=2)
    thm3.add_argument("--grid", type=int, default=16)
    thm3.add_argument("--injectivity-grid", type=int, default=64)
    thm3.add_argument("--rules", type=int, default=10)

    check_map = commands.add_parser("check-map")
    check_map.add_argument("--map", choices=sorted(MAPS), required=True)
    check_map.add_argument("--ladder", type=_ladder, required=True)
    check_map.add_argument("--e", required=True)
    check_map.add_argument("--witness", required=True)

    suite = commands.add_parser("axioms-suite")
    suite.add_argument("--trials", type=int, default=1000)
    suite.add_argument("--oracle-trials", type=int, default=200)
    return parser


def _emit(config: RunConfig, name: str, text: str) -> str:
    path = os.path.join(config.output_dir, name)
    write_text(path, text)
    return path


def _status(passed: bool) -> int:
    return 0 if passed else 1


def _materialize(args, config) -> int:
    rule = parse_rule(args.rule, seed=config.seed, size=args.n)
    relation = materialize(rule, Window(args.n), config.dense_threshold)
    sys.stdout.write(format_relation(relation, config.version))
    return 0


def _shells(args, config) -> int:
    rule = parse_rule(args.rule, seed=config.seed, size=args.n)
    window = Window(args.n)
    F = augment(materialize(rule, window, config.dense_threshold))
    decomposition = shell_partition(F, base=args.base)
    for n, shell in enumerate(decomposition.shells):
        print(f"{n}: {value_to_str(shell)}")
    return 0


def _certify(args, config) -> int:
    certificate = parse_certificate(read_text(args.path))
    report = verify_certificate(certificate)
    sys.stdout.write(format_certificate_report(report, config.version))
    return _status(report.passed)


def _brute_dim(args, config) -> int:
    window = Window(args.n)
    E = parse_rule(args.e, seed=config.seed, size=args.n)
    H = parse_rule(args.h, seed=config.seed, size=args.n)
    cap = args.cap if args.cap is not None else config.brute_force_cap
    found = brute_min_families(E, H, window, cap=cap)
    print("none" if found.n is None else found.n)
    return 0


def _thm1(args, config) -> int:
    rule = parse_rule(args.rule, seed=config.seed, size=args.n)
    result = shell_certificate_run(
        args.n, rule, dense_threshold=config.dense_threshold
    )
    _emit(config, "thm1-certificate.txt", format_certificate(
        result.certificate, config.version
    ))
    _emit(config, "thm1-report.txt", format_certificate_report(
        result.report, config.version
    ))
    print(
        f"shells {len(result.decomposition.shells)} "
        f"families {len(result.certificate.families)} "
        f"verdict {'pass' if result.passed else 'fail'}"
    )
    return _status(result.passed)


def _thm2(args, config) -> int:
    result = convergent_sequence_run(
        h=args.h,
        ladder=args.ladder,
        seed=config.seed,
        rule_count=args.rules,
        width=args.width,
        halving_steps=args.steps,
        start=args.schedule,
        budget=config.search_budget,
    )
    _emit(config, "thm2-halving.seq", format_sequence(result.halving, config.version))
    _emit(config, "thm2-ladder.seq", format_sequence(result.sequence, config.version))
    for position, (_, rule) in enumerate(result.rules):
        write_krule(
            rule, os.path.join(config.output_dir, f"thm2-rule{position}.krule"),
            config.version,
        )
    _emit(config, "thm2-asymorphism.txt", format_asymorphism_report(
        result.asymorphism, config.version
    ))
    _emit(config, "thm2-probe.txt", format_probe_report(
        result.probe, config.version
    ))
    print(f"first exponents {value_to_str(list(result.halving.exponents[:2]))}")
    print(f"asymorphism {result.asymorphism.status}")
    print(f"probe {result.probe.status}")
    for failure in result.failures:
        print(f"failed {failure}")
    return _status(result.passed)


def _thm3(args, config) -> int:
    result = sum_space_run(
        m=args.m,
        grid=args.grid,
        injectivity_grid=args.injectivity_grid,
        seed=config.seed,
        rule_count=args.rules,
        budget=config.search_budget,
        dense_threshold=config.dense_threshold,
    )
    for sequence in result.sequences:
        _emit(
            config, f"thm3-{sequence.name}.seq",
            format_sequence(sequence, config.version),
        )
    _emit(config, "thm3-asymorphism.txt", format_asymorphism_report(
        result.asymorphism, config.version
    ))
    _emit(config, "thm3-product-report.txt", format_certificate_report(
        result.product_report, config.version
    ))
    _emit(config, "thm3-brick-report.txt", format_certificate_report(
        result.brick_report, config.version
    ))
    _emit(config, "thm3-conditions.txt", format_lines(
        "conditions-report",
        [
            ("injectivity", result.injectivity.passed),
            ("condition-1", result.condition_1.passed),
            ("condition-3", all(r.is_valid() for r in result.condition_3)),
            ("condition-4", all(r.passed for r in result.condition_4)),
        ],
        config.version,
    ))
    print(f"asymorphism {result.asymorphism.status}")
    for failure in result.failures:
        print(f"failed {failure}")
    return _status(result.passed)


def _check_map(args, config) -> int:
    E = parse_rule(args.e, seed=config.seed, size=max(args.ladder))
    witness = parse_rule(args.witness, seed=config.seed)
    report = check_macro_uniform(MAPS[args.map], [(E, witness)], args.ladder)
    sys.stdout.write(format_macro_report(report, config.version))
    return _status(report.status == VALIDATED)


def _axioms(args, config) -> int:
    results = [
        ("axioms", axioms_suite(
            args.trials, seed=config.seed,
            dense_threshold=config.dense_threshold,
        )),
        ("chain-obstruction", chain_obstruction_suite(
            cap=config.brute_force_cap,
            dense_threshold=config.dense_threshold,
        )),
        ("oracle-consistency", oracle_consistency_suite(
            args.oracle_trials, seed=config.seed, cap=config.brute_force_cap,
            dense_threshold=config.dense_threshold,
        )),
    ]
    passed = True
    for name, result in results:
        print(f"{name} trials {result.trials} failures {len(result.failures)}")
        for trial, description in result.failures[:5]:
            print(f"  {trial}: {description}")
        passed = passed and result.passed
    return _status(passed)


HANDLERS = {
    "materialize": _materialize,
    "shells": _shells,
    "certify": _certify,
    "brute-dim": _brute_dim,
    "thm1-demo": _thm1,
    "thm2-demo": _thm2,
    "thm3-demo": _thm3,
    "check-map": _check_map,
    "axioms-suite": _axioms,
}


def _sizes(args) -> tuple:
    for name in ("n", "ladder", "grid"):
        value = getattr(args, name, None)
        if value is not None:
            return tuple(value) if isinstance(value, list) else (value,)
    return ()


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    :param argv: Arguments without the program name; sys.argv by default.
    :returns: 0 if every check passed, 1 if one failed, 2 on refused input.
    :rtype: int
    """
    try:
        settings = load_settings()
        args = build_parser().parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
    except CoarseError as err:
        sys.stderr.write(f"pycoarse: {err}\n")
        return 2
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 0

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    config = RunConfig(
        subcommand=args.subcommand,
        sizes=_sizes(args),
        seed=args.seed,
        brute_force_cap=settings.brute_force_cap,
        dense_threshold=settings.dense_threshold,
        search_budget=settings.search_budget,
        output_dir=args.out or settings.output_dir,
        version=settings.format_version,
    )
    logger.debug("run config %s", config)
    try:
        return HANDLERS[args.subcommand](args, config)
    except (CoarseError, OSError) as err:
        sys.stderr.write(f"pycoarse: {str(err).splitlines()[0]}\n")
        return 2


def main():
    sys.exit(run())
