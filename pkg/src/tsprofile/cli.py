"""Command-line front end: compute, verify, bench, and plan.

Exit codes: 0 success, 1 verification mismatch, 2 unreadable input,
3 parse failure, 4 invalid parameters.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import planner
from .core import EPS_SCALE, PRECISIONS, RunConfig

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_PARAMS = 4

VERIFY_RTOL = {"double": 1e-9, "single": 1e-3}


class ParseFailure(Exception):
    """Input file content that cannot be turned into a finite series."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; remap to the parameter code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMS, f"{self.prog}: error: {message}\n")


def read_series(path, column=None):
    """Load a series from a plain (one value per line) or CSV file.

    With ``column`` the file is parsed as CSV and the named or 0-based
    column is extracted; a non-numeric first row is treated as a header.
    Failures report the offending line number.
    """
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        if column is None:
            for lineno, line in enumerate(fh, 1):
                text = line.strip()
                if not text:
                    continue
                try:
                    v = float(text)
                except ValueError:
                    raise ParseFailure(f"{path}:{lineno}: not a number: {text!r}") from None
                if not np.isfinite(v):
                    raise ParseFailure(f"{path}:{lineno}: non-finite value: {text!r}")
                values.append(v)
        else:
            reader = csv.reader(fh)
            rows = iter(reader)
            try:
                first = next(rows)
            except StopIteration:
                raise ParseFailure(f"{path}: empty file") from None
            col_idx = None
            if column.isdigit():
                col_idx = int(column)
            if col_idx is None:
                try:
                    col_idx = first.index(column)
                except ValueError:
                    raise ParseFailure(
                        f"{path}:1: no column named {column!r} in header"
                    ) from None
            else:
                try:
                    values.append(_parse_cell(first, col_idx, path, 1))
                except ParseFailure:
                    pass  # numeric parse failed on row 1: treat it as a header
            for rowno, row in enumerate(rows, 2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                values.append(_parse_cell(row, col_idx, path, rowno))
    if not values:
        raise ParseFailure(f"{path}: no values found")
    return np.asarray(values, dtype=np.float64)


def _parse_cell(row, col_idx, path, rowno):
    if not 0 <= col_idx < len(row):
        raise ParseFailure(f"{path}:{rowno}: row has no column {col_idx}")
    text = row[col_idx].strip()
    try:
        v = float(text)
    except ValueError:
        raise ParseFailure(f"{path}:{rowno}: not a number: {text!r}") from None
    if not np.isfinite(v):
        raise ParseFailure(f"{path}:{rowno}: non-finite value: {text!r}")
    return v


def format_distance(value, precision):
    """Render a profile distance with enough digits to round-trip exactly."""
    if not np.isfinite(value):
        return ""
    if precision == "single":
        return np.format_float_positional(np.float32(value), unique=True)
    return repr(float(value))


def write_profile_csv(path, profile, precision):
    """Write ``index,P,I`` rows; sentinel entries render as empty fields."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,P,I\n")
        for idx in range(len(profile)):
            p = profile.distances[idx]
            i = profile.indices[idx]
            if np.isfinite(p):
                fh.write(f"{idx},{format_distance(p, precision)},{int(i)}\n")
            else:
                fh.write(f"{idx},,\n")


def read_profile_csv(path, precision="double"):
    """Read a profile CSV back into (distances, indices) arrays."""
    dtype = np.float32 if precision == "single" else np.float64
    idx_dtype = np.int32 if precision == "single" else np.int64
    distances, indices = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "P", "I"]:
            raise ParseFailure(f"{path}:1: unexpected header {header!r}")
        for rowno, row in enumerate(reader, 2):
            if len(row) != 3:
                raise ParseFailure(f"{path}:{rowno}: expected 3 fields")
            if row[1] == "":
                distances.append(np.inf)
                indices.append(-1)
            else:
                distances.append(dtype(row[1]))
                indices.append(int(row[2]))
    return np.asarray(distances, dtype=dtype), np.asarray(indices, dtype=idx_dtype)


def _build_parser():
    parser = _Parser(prog="tsprofile", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="compute a matrix profile")
    p_compute.add_argument("-i", "--input", required=True, help="series file")
    p_compute.add_argument("-c", "--column", default=None,
                           help="CSV column (name or 0-based index); omit for plain format")
    p_compute.add_argument("-m", "--window", type=int, required=True, dest="m")
    p_compute.add_argument("--exclusion", type=int, default=None)
    p_compute.add_argument("--workers", type=int, default=1)
    p_compute.add_argument("--order", choices=["random", "sequential"], default="random")
    p_compute.add_argument("--seed", type=int, default=0)
    p_compute.add_argument("--precision", choices=list(PRECISIONS), default="double")
    p_compute.add_argument("--budget-diagonals", type=int, default=None)
    p_compute.add_argument("--budget-ms", type=float, default=None)
    p_compute.add_argument("--batch-width", type=int, default=8)
    p_compute.add_argument("-o", "--output", default=None,
                           help="profile CSV path (default: <input>.profile.csv)")
    p_compute.add_argument("--plot", default=None, help="write an SVG chart here")

    p_verify = sub.add_parser("verify", help="check the engine against the brute-force oracle")
    p_verify.add_argument("--max-n", type=int, default=256)
    p_verify.add_argument("--seeds", type=int, default=2)

    p_bench = sub.add_parser("bench", help="timing report over worker counts")
    p_bench.add_argument("-i", "--input", default=None)
    p_bench.add_argument("-c", "--column", default=None)
    p_bench.add_argument("-n", "--synthetic-n", type=int, default=16384)
    p_bench.add_argument("-m", "--window", type=int, default=256, dest="m")
    p_bench.add_argument("--max-workers", type=int, default=None)
    p_bench.add_argument("--sweep-m", default=None,
                         help="comma-separated window lengths to sweep")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--precision", choices=list(PRECISIONS), default="double")
    p_bench.add_argument("--batch-width", type=int, default=8)

    p_plan = sub.add_parser("plan", help="bandwidth-balanced worker count and kernel intensity")
    p_plan.add_argument("--bandwidth", type=float, required=True, help="GB/s available")
    p_plan.add_argument("--per-worker", type=float, required=True, help="GB/s per worker")
    p_plan.add_argument("--workers", type=int, default=None, help="classify this worker count")
    p_plan.add_argument("--precision", choices=list(PRECISIONS), default="double")
    return parser


def _cmd_compute(args):
    from .engine import run

    series = read_series(args.input, args.column)
    config = RunConfig(
        m=args.m,
        exclusion=args.exclusion,
        precision=args.precision,
        workers=args.workers,
        ordering=args.order,
        seed=args.seed,
        budget_diagonals=args.budget_diagonals,
        budget_ms=args.budget_ms,
        batch_width=args.batch_width,
    )
    result = run(series, config)
    profile = result.profile

    out_path = args.output or args.input + ".profile.csv"
    write_profile_csv(out_path, profile, args.precision)

    order = f"{args.order}(seed={args.seed})" if args.order == "random" else args.order
    print(f"n={series.shape[0]} m={args.m} exclusion={config.resolved_exclusion} "
          f"workers={args.workers} ordering={order} precision={args.precision} "
          f"batch_width={args.batch_width}")
    print(f"diagonals={result.diagonals_completed}/{result.total_diagonals} "
          f"completed={str(result.completed).lower()} elapsed={result.elapsed:.3f}s "
          f"cells={result.cells}")
    finite = np.isfinite(profile.distances)
    if finite.any():
        dist = np.where(finite, profile.distances, np.inf)
        lo = int(np.argmin(dist))
        dist_hi = np.where(finite, profile.distances, -np.inf)
        hi = int(np.argmax(dist_hi))
        print(f"P: min={format_distance(profile.distances[lo], args.precision)} at {lo}, "
              f"max={format_distance(profile.distances[hi], args.precision)} at {hi}")
    else:
        print("P: no computed entries")
    print(f"wrote profile: {out_path}")

    if args.plot:
        from ._svg import render_profile_svg

        render_profile_svg(series, profile.distances, args.plot)
        print(f"wrote plot: {args.plot}")
    return EXIT_OK


def _engine_profile(series, config):
    # separated so the verify harness can be fault-injected in tests
    from .engine import run

    return run(series, config).profile


def _cmd_verify(args):
    from .oracle import MAX_PROFILE_LENGTH, brute_force_profile
    from .scheduler import schedule_diagonals

    demo = schedule_diagonals(n=13, m=4, exclusion=1, workers=2, ordering="sequential")
    print(f"schedule demo: n=13 m=4 exclusion=1 workers=2 -> target={demo.target} "
          f"pairs={list(demo.pairs)} "
          f"assignments={[list(a) for a in demo.assignments]}")

    sizes = [n for n in (64, 128, 256, 512) if n <= args.max_n] or [args.max_n]
    windows = [4, 8, 16]
    failures = []
    checks = 0
    print(f"{'seed':>6} {'n':>6} {'m':>4} {'workers':>7} {'ordering':>10} "
          f"{'precision':>9}  status")
    for seed in range(args.seeds):
        for n in sizes:
            for m in windows:
                if n <= m or n - m + 1 > MAX_PROFILE_LENGTH or m // 4 < 1:
                    continue
                if m // 4 >= n - m:
                    continue
                rng = np.random.default_rng(seed)
                series = rng.standard_normal(n)
                for precision in PRECISIONS:
                    cast = series.astype(np.float32).astype(np.float64) \
                        if precision == "single" else series
                    expected = brute_force_profile(
                        cast, m, eps_scale=EPS_SCALE[precision]
                    )
                    for workers in (1, 3):
                        for ordering in ("random", "sequential"):
                            config = RunConfig(m=m, precision=precision,
                                               workers=workers, ordering=ordering,
                                               seed=seed)
                            got = _engine_profile(series, config)
                            bad = _first_mismatch(got, expected, precision)
                            checks += 1
                            status = "PASS" if bad is None else f"FAIL at i={bad}"
                            if bad is not None:
                                failures.append((seed, n, m, bad))
                            print(f"{seed:>6} {n:>6} {m:>4} {workers:>7} "
                                  f"{ordering:>10} {precision:>9}  {status}")
    if failures:
        seed, n, m, i = failures[0]
        print(f"FAIL: first mismatch at (seed={seed}, n={n}, m={m}, i={i}); "
              f"{len(failures)} of {checks} checks failed")
        return EXIT_MISMATCH
    print(f"all {checks} checks passed")
    return EXIT_OK


def _first_mismatch(got, expected, precision):
    """Index of the first disagreement with the oracle, or None."""
    rtol = VERIFY_RTOL[precision]
    P = got.distances.astype(np.float64)
    Po = expected.distances
    finite = np.isfinite(Po)
    ok = np.isfinite(P) == finite
    ok &= np.where(finite, np.abs(P - Po) <= rtol * np.abs(Po), True)
    if precision == "double":
        # index equality is only meaningful where float32 noise cannot flip ranks
        ok &= got.indices.astype(np.int64) == expected.indices
    if ok.all():
        return None
    return int(np.argmin(ok))


def _cmd_bench(args):
    from .engine import matrix_profile

    if args.input:
        series = read_series(args.input, args.column)
    else:
        rng = np.random.default_rng(args.seed)
        series = rng.standard_normal(args.synthetic_n)
    n = series.shape[0]

    max_workers = args.max_workers or (os.cpu_count() or 1)
    worker_counts = []
    w = 1
    while w <= max_workers:
        worker_counts.append(w)
        w *= 2

    # warm the JIT on a small synthetic series before timing anything
    warm = np.random.default_rng(0).standard_normal(256)
    matrix_profile(warm, m=16, precision=args.precision,
                   batch_width=args.batch_width)

    print(f"bench: n={n} m={args.m} precision={args.precision} "
          f"batch_width={args.batch_width} host_cpus={os.cpu_count()}")
    print(f"{'workers':>7} {'seconds':>10} {'speedup':>8} {'cells/s':>12}")
    base = None
    for workers in worker_counts:
        t0 = time.perf_counter()
        result = matrix_profile(series, m=args.m, workers=workers,
                                precision=args.precision,
                                batch_width=args.batch_width, seed=args.seed)
        elapsed = time.perf_counter() - t0
        base = base or elapsed
        print(f"{workers:>7} {elapsed:>10.3f} {base / elapsed:>8.2f} "
              f"{result.cells / elapsed:>12.3e}")

    if args.sweep_m:
        print(f"{'m':>7} {'seconds':>10} {'cells/s':>12}")
        for m_text in args.sweep_m.split(","):
            m_val = int(m_text)
            t0 = time.perf_counter()
            result = matrix_profile(series, m=m_val,
                                    workers=worker_counts[-1],
                                    precision=args.precision,
                                    batch_width=args.batch_width, seed=args.seed)
            elapsed = time.perf_counter() - t0
            print(f"{m_val:>7} {elapsed:>10.3f} {result.cells / elapsed:>12.3e}")
    return EXIT_OK


def _cmd_plan(args):
    try:
        report = planner.balanced_workers(args.bandwidth, args.per_worker, args.workers)
        intensity = planner.arithmetic_intensity(4, precision=args.precision)
    except ValueError as exc:
        print(f"tsprofile plan: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    print(f"balanced_workers={report.balanced_workers}")
    print(f"aggregate_demand_gbps={report.aggregate_demand:g}")
    print(f"regime={report.regime}")
    print(f"requested_workers={report.requested_workers}")
    print(f"requested_demand_gbps={report.requested_demand:g}")
    print(f"bandwidth_gbps={report.bandwidth:g}")
    print(f"per_worker_demand_gbps={report.per_worker_demand:g}")
    print(f"precision={args.precision}")
    print(f"flops_per_cell={planner.FLOPS_PER_CELL}")
    print(f"bytes_per_cell={planner.bytes_per_cell(args.precision)}")
    print(f"arithmetic_intensity_flop_per_byte={intensity:.6f}")
    print()
    print(f"{report.requested_workers} worker(s) at {report.per_worker_demand:g} GB/s "
          f"demand {report.requested_demand:g} GB/s of the {report.bandwidth:g} GB/s "
          f"available: the configuration is {report.regime}. "
          f"{report.balanced_workers} worker(s) saturate this bandwidth exactly.")
    for line in planner.census_lines(args.precision):
        print(line)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "compute": _cmd_compute,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
        "plan": _cmd_plan,
    }
    try:
        return handlers[args.command](args)
    except ParseFailure as exc:
        print(f"tsprofile: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"tsprofile: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"tsprofile: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS


def console_main():
    raise SystemExit(main())
