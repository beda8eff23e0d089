#!/usr/bin/env python3
"""Run one named flag study over the drift testbench and print its table.

Usage:
    python scripts/run_testbench.py resplit-vfdt [--out results/resplit-vfdt]
                                                 [--seeds N] [--instances N]
                                                 [--jobs N]

Writes the usual results.csv / comparison.{csv,md} into the output directory
and echoes the comparison table with the win counts and test statistics.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from streamtrees.cli import main as cli_main
from streamtrees.experiments import PRESET_NAMES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("preset", choices=PRESET_NAMES)
    parser.add_argument("--out", default=None)
    parser.add_argument("--seeds", type=int, default=None)
    parser.add_argument("--instances", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=2)
    args = parser.parse_args()

    out = args.out or os.path.join("results", args.preset)
    argv = ["--preset", args.preset, "--out", out, "--jobs", str(args.jobs)]
    if args.seeds is not None:
        argv += ["--seeds", str(args.seeds)]
    if args.instances is not None:
        argv += ["--instances", str(args.instances)]
    code = cli_main(argv)
    if code == 0:
        table = os.path.join(out, "comparison.md")
        if os.path.exists(table):
            print(open(table).read())
    return code


if __name__ == "__main__":
    sys.exit(main())
