"""
Main Application Module

This module provides the command-line entry point: Picard index analysis of
K*-surfaces and toric varieties, classification of log del Pezzo surfaces
of Picard number one, census and histogram tables, and the property suites.

Exit status is 0 on success, 1 when an internal identity or property check
fails and 2 on invalid input.
"""

import csv
import json
import sys
from argparse import ArgumentParser, Namespace
from typing import Iterable, List, Optional, Sequence
import logging

from src.analyzers.classify import (
    CENSUS_COLUMNS,
    NONTORIC_CASES,
    census,
    engine_for,
    histogram,
    iter_census,
    iter_classified,
)
from src.analyzers.kstarindex import analyze
from src.analyzers.toricpic import formula_quotient, picard_direct, weighted_projective_fan
from src.analyzers.verify import SUITES, run_suites
from src.core.errors import InputError, InvariantViolation, KStarError, UnsupportedFanError
from src.core.report_store import CENSUS_HEADER, HISTOGRAM_HEADER, RECORD_HEADER, ReportStore, read_records
from src.utils.config import load_config
from src.utils.logging_config import setup_logging
from src.utils.resume import ResumeState
from src.utils.serialization import (
    encode_ints,
    kstar_report_to_json,
    load_defining_matrix,
    load_fan,
    picard_data_to_json,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2

REPORT_COMMANDS = ('analyze', 'toric', 'verify')


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise InputError(f"expected a positive integer, got {value!r}", "argument")
    if n < 1:
        raise InputError(f"expected a positive integer, got {n}", "argument")
    return n


def _int_list(value: str) -> List[int]:
    try:
        return [int(x) for x in value.split(',') if x.strip()]
    except ValueError:
        raise InputError(f"expected a comma separated list of integers, got {value!r}", "--weights")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='kstar', description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: ArgumentParser) -> None:
        p.add_argument('--out', help="output file, relative to the output directory unless absolute")
        p.add_argument('--format', choices=('json', 'csv'), default=None)

    p = sub.add_parser('analyze', help="Picard index and minor sets of a defining matrix")
    p.add_argument('file', help="defining matrix JSON")
    common(p)

    p = sub.add_parser('toric', help="Picard data of a toric variety")
    p.add_argument('file', nargs='?', help="fan JSON")
    p.add_argument('--weights', type=_int_list, help="weights of a weighted projective space")
    common(p)

    for name in ('classify-toric', 'classify-nontoric', 'census'):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} up to a Picard index")
        p.add_argument('--max-index', type=_positive, required=True)
        p.add_argument('--threads', type=_positive, default=None)
        p.add_argument('--resume', help="resume file; requires --out")
        if name == 'classify-nontoric':
            p.add_argument('--cases', help=f"comma separated subset of {','.join(NONTORIC_CASES)}")
        common(p)

    p = sub.add_parser('verify', help="run the randomized property suites")
    p.add_argument('--count', type=_positive, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--suites', help=f"comma separated subset of {','.join(SUITES)}")
    common(p)

    p = sub.add_parser('histogram', help="counts per Picard index of a record CSV")
    p.add_argument('file', help="record CSV written by classify-toric or classify-nontoric")
    common(p)
    return parser


def _emit_json(store: ReportStore, args: Namespace, data: dict) -> None:
    if args.out:
        store.write_report(args.out, data)
    else:
        json.dump(encode_ints(data), sys.stdout, indent=2)
        sys.stdout.write('\n')


def _stdout_rows(header: Sequence[str], rows: Iterable[List[str]]) -> None:
    writer = csv.writer(sys.stdout, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)


def run_analyze(args: Namespace, store: ReportStore) -> int:
    dm = load_defining_matrix(args.file)
    report = analyze(dm)
    _emit_json(store, args, kstar_report_to_json(report))
    return EXIT_OK


def run_toric(args: Namespace, store: ReportStore) -> int:
    if args.weights:
        fan = weighted_projective_fan(args.weights)
    elif args.file:
        fan = load_fan(args.file).require_valid()
    else:
        raise InputError("either a fan file or --weights is required", "toric")
    data = picard_direct(fan)
    check = formula_quotient(fan, data.pic_index)
    _emit_json(store, args, {'fan': fan.to_dict(), **picard_data_to_json(data, check)})
    return EXIT_OK


def _cases(args: Namespace) -> Optional[List[str]]:
    if not getattr(args, 'cases', None):
        return None
    cases = [c.strip() for c in args.cases.split(',') if c.strip()]
    unknown = sorted(set(cases) - set(NONTORIC_CASES))
    if unknown:
        raise InputError(f"unknown cases {unknown}", "--cases")
    return cases


def _resume_state(args: Namespace) -> Optional[ResumeState]:
    if not args.resume:
        return None
    if not args.out:
        raise InputError("--resume needs --out", "--resume")
    return ResumeState(args.resume, args.command)


def run_classify(args: Namespace, store: ReportStore, threads: int) -> int:
    engine = engine_for(args.command, _cases(args))
    state = _resume_state(args)
    lo = state.next_iota if state else 1
    if not args.out:
        rows = [rec.to_row() for _, records in iter_classified(1, args.max_index, engine, threads)
                for rec in records]
        _stdout_rows(RECORD_HEADER, rows)
        return EXIT_OK
    path = store.write_records(args.out, [], append=lo > 1)
    if lo <= args.max_index:
        for iota, records in iter_classified(lo, args.max_index, engine, threads):
            store.write_records(path, records, append=True)
            if state:
                state.save(iota)
    logger.info(f"Record file: {path}")
    return EXIT_OK


def run_census(args: Namespace, store: ReportStore, threads: int) -> int:
    state = _resume_state(args)
    if not args.out:
        rows = census(args.max_index, threads=threads)
        _stdout_rows(CENSUS_HEADER, (row.to_row() for row in rows))
        final = rows[-1].cumulative
        logger.info("census totals: " + ", ".join(f"{c}={final[c]}" for c in CENSUS_COLUMNS))
        return EXIT_OK
    lo = state.next_iota if state else 1
    path = store.write_census(args.out, [], append=lo > 1)
    if lo <= args.max_index:
        for row in iter_census(lo, args.max_index, threads, state.cumulative if state else None):
            store.write_census(path, [row], append=True)
            if state:
                state.save(row.picard_index, row.cumulative)
    logger.info(f"Census file: {path}")
    return EXIT_OK


def run_verify(args: Namespace, store: ReportStore) -> int:
    config = load_config()
    names = None
    if args.suites:
        names = [s.strip() for s in args.suites.split(',') if s.strip()]
        unknown = sorted(set(names) - set(SUITES))
        if unknown:
            raise InputError(f"unknown suites {unknown}", "--suites")
    count = args.count or config.verify_count
    seed = args.seed if args.seed is not None else config.seed
    results = run_suites(count, seed, names)
    for result in results:
        if not result.ok:
            store.write_failure(result.name, result.failure_instance)
    _emit_json(store, args, {
        'seed': seed,
        'count': count,
        'suites': [r.to_dict() for r in results],
        'passed': all(r.ok for r in results),
    })
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAILURE


def run_histogram(args: Namespace, store: ReportStore) -> int:
    rows = histogram(read_records(args.file))
    if args.out:
        store.write_histogram(args.out, rows)
    else:
        _stdout_rows(HISTOGRAM_HEADER,
                     ([str(r.picard_index)] + [str(r.counts[c]) for c in CENSUS_COLUMNS] + [str(r.total)]
                      for r in rows))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse the command line and run one sub-command.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit status
    """
    parser = build_parser()
    store: Optional[ReportStore] = None
    try:
        args = parser.parse_args(argv)
        expected = 'json' if args.command in REPORT_COMMANDS else 'csv'
        if args.format not in (None, expected):
            raise InputError(f"{args.command} writes {expected}, not {args.format}", "--format")
        config = load_config()
        setup_logging(config.log_level, config.log_dir)
        store = ReportStore(config.output_dir)
        threads = getattr(args, 'threads', None) or config.threads
        if args.command == 'analyze':
            return run_analyze(args, store)
        if args.command == 'toric':
            return run_toric(args, store)
        if args.command in ('classify-toric', 'classify-nontoric'):
            return run_classify(args, store, threads)
        if args.command == 'census':
            return run_census(args, store, threads)
        if args.command == 'verify':
            return run_verify(args, store)
        return run_histogram(args, store)
    except (InputError, UnsupportedFanError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except InvariantViolation as e:
        logger.error(f"Invariant violated: {e}")
        if store is not None:
            store.write_failure('invariant', e.instance)
        return EXIT_FAILURE
    except KStarError as e:
        logger.error(f"Error during execution: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
