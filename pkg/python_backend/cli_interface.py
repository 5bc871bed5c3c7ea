#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Command Line Interface
Runs iteration, contractivity and invariance analyses and writes CSV tables
to standard output; diagnostics go to standard error.

Exit codes: 0 success, 2 usage / input error, 3 numerical failure.
"""

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

from config_system import AnalysisConfig, ConfigManager
from contractivity import (c_contraction_index, diag_contractive_at, prop1_applies, prop2_applies,
                           weak_contractivity_index)
from errors import (DomainError, EmptySampleError, MeanError, MeanParseError, NumericalFailure,
                    ParameterError, ResidualEvaluationError, TableDataError)
from invariant import ComputedInvariantMean, complementary_value, invariance_residual
from iteration import (MeanTypeMapping, extremal_invariant_estimates, gauss_limit, in_diagonal_basin,
                       orbit)
from mean_core import (Interval, Point, check_internality, check_strict, check_symmetry,
                       classify_strictness, default_probe_plan, grid_points, random_points)
from mean_parser import parse_mean_or_raise

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

USAGE_ERRORS = (MeanParseError, ParameterError, DomainError, TableDataError, EmptySampleError)

TABLE_SCHEMA = """\
Table means are read from a UTF-8 CSV file and selected with -M table:<path>.

  header:  x,y,value
  rows:    one per lattice node; every x value must appear with every y value
  axes:    at least 2 distinct x and 2 distinct y values
  domain:  the overlap of the x range and the y range
  eval:    bilinear interpolation, then clipped into [min(x,y), max(x,y)];
           the classify command reports how many evaluations were clipped
"""

HEADERS = {
    "iterate": ["n", "Mn", "Nn", "gap"],
    "limit": ["x", "y", "status", "value", "final_gap", "iterations"],
    "basin": ["x", "y", "verdict", "iterations", "final_gap", "L_est", "U_est", "agree"],
    "contract": ["x", "y", "diag_contractive", "weak_index", "certificate",
                 "second_iterate_contractive", "c", "c_index"],
    "classify": ["mean", "property", "verdict", "witness_x", "witness_y"],
    "residual": ["max_residual", "x", "y", "sample_size"],
    "complement": ["x", "y", "t", "residual"],
    "extremal": ["x", "y", "L_est", "U_est", "spread", "tail"],
}

SWEEP_COLUMNS = {
    "limit": ["status", "value", "final_gap", "iterations"],
    "basin": ["verdict", "iterations", "final_gap", "L_est", "U_est", "agree"],
    "contract": ["diag_contractive", "weak_index", "c_index"],
    "envelope": ["iterations", "min_env", "max_env", "gap", "monotone"],
    "extremal": ["L_est", "U_est", "spread"],
}

DEFAULT_ENVELOPE_STEPS = 50


class UsageError(MeanError):
    """Missing or inconsistent command-line flags"""


def fmt(value: Any) -> str:
    """CSV rendering: 17 significant digits, lowercase booleans, empty for missing"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


class CsvOutput:
    """Header-first CSV writer on a text stream"""

    def __init__(self, stream, header: Sequence[str]):
        self.writer = csv.writer(stream, lineterminator="\n")
        self.writer.writerow(header)

    def row(self, values: Sequence[Any]) -> None:
        self.writer.writerow([fmt(v) for v in values])


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

def _count(text: str) -> int:
    try:
        value = float(text)
        count = int(value)
    except (ValueError, OverflowError):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    if value != count or count < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return count


def _region(text: str) -> List[float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("region must be x0,x1,y0,y1")
    return parts


def _resolution(text: str) -> tuple:
    try:
        nx, ny = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"resolution must look like 20x20, got {text}")
    return nx, ny


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-M", help="first mean (mean expression)")
    common.add_argument("-N", help="second mean (mean expression)")
    common.add_argument("-K", help="mean K for residual / complement")
    common.add_argument("-x", type=float)
    common.add_argument("-y", type=float)
    common.add_argument("-n", type=_count, help="iterate count")
    common.add_argument("--tol", type=float, help="convergence tolerance (default 1e-12)")
    common.add_argument("--max-iter", type=_count, dest="max_iter", help="iteration budget (default 1e6)")
    common.add_argument("--seed", type=int, help="seed for random sampling")
    common.add_argument("--samples", type=_count, help="number of random sample points")
    common.add_argument("--region", type=_region, help="x0,x1,y0,y1")
    common.add_argument("--res", type=_resolution, help="grid resolution NxM")
    common.add_argument("--c", type=float, dest="c", help="contraction factor in [0, 1)")
    common.add_argument("--nmax", type=_count, help="weak contractivity budget")
    common.add_argument("--tail", type=_count, help="tail length for extremal estimates")
    common.add_argument("--analysis", choices=sorted(SWEEP_COLUMNS), help="sweep analysis kind")
    common.add_argument("--workers", type=_count, help="concurrent sweep workers")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--debug", action="store_true")

    parser = argparse.ArgumentParser(prog="cli_interface.py",
                                     description="Iterated mean-type mappings and invariant means")
    parser.add_argument("--table-schema", action="store_true", dest="table_schema",
                        help="print the table-mean CSV schema and exit")
    sub = parser.add_subparsers(dest="command")
    for name in ["iterate", "limit", "basin", "contract", "classify",
                 "residual", "complement", "extremal", "sweep"]:
        sub.add_parser(name, parents=[common])
    return parser


def _config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    log_level = "DEBUG" if args.debug else "INFO" if args.verbose else None
    manager = ConfigManager()
    valid = manager.update_config({
        "tol": args.tol,
        "max_iter": args.max_iter,
        "weak_n_max": args.nmax,
        "extremal_tail": args.tail,
        "random_samples": args.samples,
        "grid_resolution": args.res,
        "workers": args.workers,
        "log_level": log_level,
    })
    if not valid:
        raise UsageError("; ".join(manager.validate_config()))
    return manager.get_config()


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join(f"-{n}" if len(n) == 1 else f"--{n}" for n in missing)
        raise UsageError(f"{args.command} needs {flags}")


def _mapping(args: argparse.Namespace) -> MeanTypeMapping:
    _need(args, "M", "N")
    return MeanTypeMapping(parse_mean_or_raise(args.M), parse_mean_or_raise(args.N))


def _check_region(region: List[float], domain: Interval) -> None:
    x0, x1, y0, y1 = region
    for point in [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]:
        if not domain.contains_point(*point):
            raise DomainError(point, domain, f"region corner {point} outside {domain}")


def _sample_points(args: argparse.Namespace, cfg: AnalysisConfig, domain: Interval) -> List[Point]:
    """Lattice over the region by default; random points when --samples is given (needs --seed)"""
    if args.region is not None:
        _check_region(args.region, domain)
        x_range, y_range = tuple(args.region[:2]), tuple(args.region[2:])
    else:
        box = domain.bounded_box(cfg.unbounded_span, cfg.sampling_margin)
        x_range = y_range = box
    if args.samples is not None:
        if args.seed is None:
            raise UsageError("random sampling needs --seed")
        return random_points(x_range, y_range, cfg.random_samples, args.seed)
    return grid_points(x_range, y_range, cfg.grid_resolution)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_iterate(args, cfg, out) -> int:
    mapping = _mapping(args)
    _need(args, "x", "y", "n")
    writer = CsvOutput(out, HEADERS["iterate"])
    trajectory = orbit(mapping, args.x, args.y, args.n)
    for k, ((u, v), gap) in enumerate(zip(trajectory.points, trajectory.gap), start=1):
        writer.row([k, u, v, gap])
    return EXIT_OK


def cmd_limit(args, cfg, out) -> int:
    mapping = _mapping(args)
    _need(args, "x", "y")
    writer = CsvOutput(out, HEADERS["limit"])
    result = gauss_limit(mapping, args.x, args.y, cfg.tol, cfg.max_iter, cfg.cycle_window)
    writer.row([args.x, args.y, result.status, result.value, result.final_gap, result.iterations_used])
    if not result.converged:
        print(f"error: {result.status.value}, gap={result.final_gap:g}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _basin_values(mapping: MeanTypeMapping, x: float, y: float, cfg: AnalysisConfig) -> list:
    membership = in_diagonal_basin(mapping, x, y, cfg.tol, cfg.max_iter)
    extremal = extremal_invariant_estimates(mapping, x, y, cfg.extremal_n_max, cfg.extremal_tail,
                                            cfg.cycle_window)
    return [membership.verdict, membership.limit.iterations_used, membership.limit.final_gap,
            extremal.L_est, extremal.U_est, extremal.spread <= cfg.tol]


def cmd_basin(args, cfg, out) -> int:
    mapping = _mapping(args)
    _need(args, "x", "y")
    writer = CsvOutput(out, HEADERS["basin"])
    writer.row([args.x, args.y] + _basin_values(mapping, args.x, args.y, cfg))
    return EXIT_OK


def cmd_contract(args, cfg, out) -> int:
    mapping = _mapping(args)
    if args.x is not None or args.y is not None:
        _need(args, "x", "y")
        points = [(args.x, args.y)]
    else:
        points = [(x, y) for x, y in _sample_points(args, cfg, mapping.domain) if x != y]
    second = mapping.iterated(2)
    writer = CsvOutput(out, HEADERS["contract"])
    for x, y in points:
        weak = weak_contractivity_index(mapping, x, y, cfg.weak_n_max)
        c_index = None
        if args.c is not None:
            c_index = c_contraction_index(mapping, x, y, args.c, cfg.weak_n_max, cfg.cycle_window).index
        writer.row([x, y, diag_contractive_at(mapping, x, y), weak.index, weak.certificate,
                    diag_contractive_at(second, x, y), args.c, c_index])
    return EXIT_OK


def _verdict_rows(writer: CsvOutput, label: str, verdicts: Dict[str, Any]) -> None:
    for prop, verdict in verdicts.items():
        witness = verdict.witness or (None, None)
        writer.row([label, prop, verdict.verdict, witness[0], witness[1]])


def _classify_one(writer: CsvOutput, label: str, mean_text: str, args, cfg):
    mean = parse_mean_or_raise(mean_text)
    box = mean.domain.bounded_box(cfg.unbounded_span, cfg.sampling_margin)
    sample = random_points(box, box, cfg.random_samples, args.seed)
    probe = default_probe_plan(mean.domain, cfg.probe_anchors, cfg.probe_values_per_side,
                               cfg.unbounded_span, cfg.sampling_margin)
    report = classify_strictness(mean, probe)
    internality = check_internality(mean, sample)
    _verdict_rows(writer, label, {"internality": internality,
                                  "symmetry": check_symmetry(mean, sample),
                                  "strict": check_strict(mean, sample)})
    _verdict_rows(writer, label, report.verdicts())
    writer.row([label, "left_strict", report.left_strict, None, None])
    writer.row([label, "right_strict", report.right_strict, None, None])
    if mean.table is not None:
        writer.row([label, "clipped_count", internality.clipped_count, None, None])
    return report


def cmd_classify(args, cfg, out) -> int:
    _need(args, "M", "seed")
    writer = CsvOutput(out, HEADERS["classify"])
    report_m = _classify_one(writer, "M", args.M, args, cfg)
    if args.N is not None:
        report_n = _classify_one(writer, "N", args.N, args, cfg)
        for prop, check in [("prop1", prop1_applies), ("prop2", prop2_applies)]:
            applies = check(report_m, report_n)
            writer.row(["(M,N)", prop, "inapplicable" if applies is None else applies, None, None])
    return EXIT_OK


def cmd_residual(args, cfg, out) -> int:
    mapping = _mapping(args)
    if args.K is not None:
        K = parse_mean_or_raise(args.K)
    else:
        K = ComputedInvariantMean(mapping, cfg.tol, cfg.max_iter)
    sample = _sample_points(args, cfg, mapping.domain.intersection(K.domain))
    report = invariance_residual(K, mapping, sample)
    writer = CsvOutput(out, HEADERS["residual"])
    writer.row([report.max_residual, report.argmax[0], report.argmax[1], report.sample_size])
    return EXIT_OK


def cmd_complement(args, cfg, out) -> int:
    _need(args, "K", "M", "x", "y")
    K, M = parse_mean_or_raise(args.K), parse_mean_or_raise(args.M)
    t = complementary_value(K, M, args.x, args.y, cfg.tol, cfg.bisection_max_iter)
    residual = abs(K(M(args.x, args.y), t) - K(args.x, args.y))
    writer = CsvOutput(out, HEADERS["complement"])
    writer.row([args.x, args.y, t, residual])
    return EXIT_OK


def cmd_extremal(args, cfg, out) -> int:
    mapping = _mapping(args)
    _need(args, "x", "y")
    n_max = args.n if args.n is not None else cfg.extremal_n_max
    estimate = extremal_invariant_estimates(mapping, args.x, args.y, n_max, cfg.extremal_tail, cfg.cycle_window)
    writer = CsvOutput(out, HEADERS["extremal"])
    writer.row([args.x, args.y, estimate.L_est, estimate.U_est, estimate.spread, estimate.tail_length])
    return EXIT_OK


def _sweep_row(kind: str, mapping: MeanTypeMapping, args, cfg) -> Callable[[Point], list]:
    """Per-point worker for one sweep kind; pure, so points can run in any order"""

    def limit(point: Point) -> list:
        result = gauss_limit(mapping, *point, cfg.tol, cfg.max_iter, cfg.cycle_window)
        return [result.status, result.value, result.final_gap, result.iterations_used]

    def basin(point: Point) -> list:
        return _basin_values(mapping, *point, cfg)

    def contract(point: Point) -> list:
        x, y = point
        if x == y:
            return [None, None, None]
        c_index = None
        if args.c is not None:
            c_index = c_contraction_index(mapping, x, y, args.c, cfg.weak_n_max, cfg.cycle_window).index
        return [diag_contractive_at(mapping, x, y), weak_contractivity_index(mapping, x, y, cfg.weak_n_max).index,
                c_index]

    def envelope(point: Point) -> list:
        steps = args.n if args.n is not None else DEFAULT_ENVELOPE_STEPS
        trajectory = orbit(mapping, *point, steps)
        if not trajectory.points:
            return [0, None, None, None, True]
        return [steps, trajectory.min_env[-1], trajectory.max_env[-1], trajectory.gap[-1], trajectory.is_monotone]

    def extremal(point: Point) -> list:
        n_max = args.n if args.n is not None else cfg.extremal_n_max
        estimate = extremal_invariant_estimates(mapping, *point, n_max, cfg.extremal_tail, cfg.cycle_window)
        return [estimate.L_est, estimate.U_est, estimate.spread]

    return {"limit": limit, "basin": basin, "contract": contract,
            "envelope": envelope, "extremal": extremal}[kind]


def cmd_sweep(args, cfg, out) -> int:
    mapping = _mapping(args)
    _need(args, "analysis")
    points = _sample_points(args, cfg, mapping.domain)
    work = _sweep_row(args.analysis, mapping, args, cfg)
    # map() yields results in submission order, so rows stay in grid order
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(work, points))
    writer = CsvOutput(out, ["x", "y"] + SWEEP_COLUMNS[args.analysis])
    for (x, y), values in zip(points, rows):
        writer.row([x, y] + values)
    logger.info(f"Sweep {args.analysis} over {len(points)} points of {mapping} finished")
    return EXIT_OK


COMMANDS = {
    "iterate": cmd_iterate,
    "limit": cmd_limit,
    "basin": cmd_basin,
    "contract": cmd_contract,
    "classify": cmd_classify,
    "residual": cmd_residual,
    "complement": cmd_complement,
    "extremal": cmd_extremal,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """Command line entry point; returns the process exit code"""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.table_schema:
        out.write(TABLE_SCHEMA)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        cfg = _config_from_args(args)
        logging.basicConfig(
            level=getattr(logging, cfg.log_level),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
            force=True,
        )
        return COMMANDS[args.command](args, cfg, out)
    except (UsageError,) + USAGE_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, ResidualEvaluationError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
