"""Compare the compiled and pure-numpy integrator backends on the bundled runs.

Usage:
    python benchmarks/benchmark_backends.py [--scenario sim1] [--t-end 10] [--repeats 3]
"""
import argparse
import dataclasses
import sys

from gvfsim.bench import benchmark_scenario, format_bench_report
from gvfsim.config import load_bundled


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default="sim1", choices=["sim1", "sim2"])
    parser.add_argument("--t-end", type=float, default=None, help="override horizon, s")
    parser.add_argument("--repeats", type=int, default=3, help="timed repeats; best wall kept")
    args = parser.parse_args(argv)

    scenario = load_bundled(args.scenario)
    if args.t_end is not None:
        scenario = dataclasses.replace(scenario, t_end=args.t_end)
    report = benchmark_scenario(scenario, repeats=args.repeats)
    print(format_bench_report(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
