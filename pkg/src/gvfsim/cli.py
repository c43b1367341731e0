"""Command-line front end.

    gvfsim run CONFIG [--out DIR] [--dt X] [--t-end X] [--backend NAME]
    gvfsim demo {sim1,sim2} [--out DIR] [--backend NAME]
    gvfsim field CONFIG --grid X0:X1:NX,Y0:Y1:NY --out FILE
                 [--theta T ...] [--time T] [--fixed-axis Z]
    gvfsim check
    gvfsim bench [--scenario NAME] [--t-end X] [--repeats N]

Exit codes: 0 success, 1 validation or usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .bench import benchmark_scenario, format_bench_report
from .check import format_check_table, run_property_checks
from .config import bundled_config_path, parse_config_file
from .csvio import write_field_csv, write_trajectory_csv
from .errors import (
    ConfigError,
    DivergenceError,
    EulerSingularityError,
    GainValidityError,
    SingularJacobianError,
)
from .gridsample import FieldSampleGrid, sample_field
from .sim import metrics, run

__all__ = ["main"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gvfsim",
        description="Simulate non-singular guiding vector fields in moving frames.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario config and write CSVs")
    p_run.add_argument("config", help="YAML scenario file")
    p_run.add_argument("--out", default=".", help="output directory (default: .)")
    p_run.add_argument("--dt", type=float, default=None, help="override step, s")
    p_run.add_argument("--t-end", type=float, default=None, help="override horizon, s")
    p_run.add_argument("--backend", choices=["numba", "numpy"], default=None)

    p_demo = sub.add_parser("demo", help="run a bundled scenario")
    p_demo.add_argument("name", choices=["sim1", "sim2"])
    p_demo.add_argument("--out", default=".", help="output directory (default: .)")
    p_demo.add_argument("--backend", choices=["numba", "numpy"], default=None)

    p_field = sub.add_parser("field", help="sample the guiding field on a grid")
    p_field.add_argument("config", help="YAML scenario file (agents are ignored)")
    p_field.add_argument("--grid", required=True, metavar="X0:X1:NX,Y0:Y1:NY")
    p_field.add_argument(
        "--theta", type=float, action="append", default=None, help="theta slice, repeatable (default: 0)"
    )
    p_field.add_argument("--time", type=float, default=0.0, help="sampling instant, s (default: 0)")
    p_field.add_argument(
        "--fixed-axis", type=float, default=None, help="third-axis value for 3-D paths"
    )
    p_field.add_argument("--out", required=True, help="output CSV file")

    sub.add_parser("check", help="run the property suite and print a pass/fail table")

    p_bench = sub.add_parser("bench", help="time the integrator backends")
    p_bench.add_argument("--scenario", default="sim1", choices=["sim1", "sim2"])
    p_bench.add_argument("--t-end", type=float, default=10.0, help="horizon, s (default: 10)")
    p_bench.add_argument("--repeats", type=int, default=3)

    return parser


def _load_scenario(path_arg: str):
    path = Path(path_arg)
    if not path.is_file():
        raise ConfigError(f"no such config file: {path}")
    return parse_config_file(path)


def _parse_grid(spec: str) -> tuple[tuple[float, float], tuple[float, float], int, int]:
    axes = spec.split(",")
    if len(axes) != 2:
        raise ConfigError(f"--grid wants two axes 'X0:X1:NX,Y0:Y1:NY', got {spec!r}")
    parsed = []
    for axis in axes:
        parts = axis.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--grid axis must be LO:HI:N, got {axis!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"--grid axis {axis!r}: {exc}") from exc
        parsed.append((lo, hi, count))
    (x0, x1, nx), (y0, y1, ny) = parsed
    return (x0, x1), (y0, y1), nx, ny


def _run_and_write(scenario, out_dir: str, backend: str | None, extra_header: dict) -> int:
    record = run(scenario, backend=backend, extra_header=extra_header)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = write_trajectory_csv(record, out / f"{scenario.output_basename}.csv")
    for path in written:
        print(f"wrote {path}")

    summary = metrics(record)
    with np.printoptions(precision=3):
        print(f"final |phi| per agent: {np.sqrt(summary.final_error_sq)}")
        if summary.final_edge_errors.size:
            print(f"final edge parameter errors: {summary.final_edge_errors}")
    if summary.time_to_tolerance is not None:
        print(f"within tolerance from t = {summary.time_to_tolerance:.2f} s")
    else:
        print("tolerance not reached by the end of the run")
    return EXIT_OK


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.config)
    extra = {"config_file": str(args.config)}
    overrides = {}
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if overrides:
        try:
            scenario = dataclasses.replace(scenario, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return _run_and_write(scenario, args.out, args.backend, extra)


def _cmd_demo(args) -> int:
    scenario = parse_config_file(bundled_config_path(args.name))
    extra = {"config_file": f"bundled:{args.name}"}
    return _run_and_write(scenario, args.out, args.backend, extra)


def _cmd_field(args) -> int:
    scenario = _load_scenario(args.config)
    x_bounds, y_bounds, nx, ny = _parse_grid(args.grid)
    thetas = tuple(args.theta) if args.theta else (0.0,)
    try:
        grid = FieldSampleGrid(
            x_bounds=x_bounds,
            y_bounds=y_bounds,
            nx=nx,
            ny=ny,
            thetas=thetas,
            t=args.time,
            fixed_axis_value=args.fixed_axis,
        )
        result = sample_field(scenario, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    path = write_field_csv(result, args.out)
    print(f"wrote {path}")
    print(f"min field norm {result.min_norm!r} over {result.rows.shape[0]} samples")
    if result.num_singular:
        print(f"{result.num_singular} singular sample(s) flagged")
    return EXIT_OK


def _cmd_check(_args) -> int:
    results = run_property_checks()
    print(format_check_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _cmd_bench(args) -> int:
    scenario = parse_config_file(bundled_config_path(args.scenario))
    try:
        scenario = dataclasses.replace(scenario, t_end=args.t_end)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(format_bench_report(benchmark_scenario(scenario, repeats=args.repeats)))
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "demo": _cmd_demo,
    "field": _cmd_field,
    "check": _cmd_check,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; to callers that is validation
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, GainValidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DivergenceError, EulerSingularityError, SingularJacobianError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
