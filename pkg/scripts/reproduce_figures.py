#!/usr/bin/env python3
"""Regenerate every figure and the validation report in one shot.

Runs the four experiment commands plus the self-check through the same
entry point as the installed console script, with one master seed, and
writes all artifacts (CSV + SVG + JSON metadata + validation report)
into the output directory.

    python3 scripts/reproduce_figures.py --out figures --seed 2024
    python3 scripts/reproduce_figures.py --quick   # smoke-test budgets

``--quick`` trades statistical resolution for a run of a couple of
minutes; default budgets reproduce publication-quality curves and take
tens of minutes on one core.
"""

import argparse
import sys
import time

from bordernet.cli import main as bordernet_main

# The heatmap command deliberately has no default physics parameters;
# this is the documented reference set (see README): a 10x10 square,
# sharp attenuation (exponent 4, buffer 0.01), a sparse field (0.2
# nodes/unit^2), a 1.5-unit link, and low noise so interference — and
# therefore the border effect — dominates.
HEATMAP_PHYSICS = [
    "--eta", "4", "--epsilon", "0.01", "--rho-t", "0.2", "--d", "1.5",
    "--noise", "0.03",
]


def build_plan(out: str, seed: int, quick: bool, trials) -> list:
    def budget(default: int, quick_value: int) -> list:
        if trials is not None:
            return ["--trials", str(trials)]
        return ["--trials", str(quick_value if quick else default)]

    common = ["--out", out, "--seed", str(seed)]
    return [
        ["connection"] + budget(100_000, 4000) + common,
        ["rate"] + budget(20_000, 2000) + common,
        ["density"] + budget(10_000, 1500) + common,
        ["heatmap"] + HEATMAP_PHYSICS + budget(10_000, 1500) + common,
        ["validate"] + budget(20_000, 1500) + ["--out", out, "--seed", str(seed)],
    ]


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures", help="output directory")
    parser.add_argument("--seed", type=int, default=2024, help="master seed")
    parser.add_argument("--trials", type=int, default=None,
                        help="override every command's trial budget")
    parser.add_argument("--quick", action="store_true",
                        help="small budgets for a fast smoke run")
    args = parser.parse_args(argv)

    failures = []
    for command in build_plan(args.out, args.seed, args.quick, args.trials):
        label = command[0]
        print(f"=== {label}: {' '.join(command[1:])}", flush=True)
        started = time.perf_counter()
        code = bordernet_main(command)
        print(f"=== {label} finished with exit code {code} "
              f"in {time.perf_counter() - started:.1f}s\n", flush=True)
        if code != 0:
            failures.append((label, code))

    if failures:
        print("FAILED:", ", ".join(f"{name} (exit {code})" for name, code in failures))
        return 1
    print(f"all artifacts written to {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(run())
