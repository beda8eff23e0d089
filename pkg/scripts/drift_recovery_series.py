#!/usr/bin/env python3
"""Produce the drift-recovery error series: plain tree vs the eidetic variant.

Runs both learners over seeded variants of the 5x5x5 abrupt-drift stream
(single drift of magnitude 1.0 at t = 150,000), averages windowed error every
1000 steps across seeds, and writes one CSV per learner under --out. Feed the
CSVs to any plotter; the recovery gap after the drift point is the story.

    python scripts/drift_recovery_series.py --seeds 10 --out results/amnesia
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from streamtrees.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/amnesia")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=2)
    args = parser.parse_args()
    code = cli_main([
        "--preset", "amnesia-figure",
        "--out", args.out,
        "--seeds", str(args.seeds),
        "--jobs", str(args.jobs),
    ])
    if code == 0:
        series_root = os.path.join(args.out, "series")
        for dirpath, _, files in os.walk(series_root):
            for name in files:
                print(os.path.join(dirpath, name))
    return code


if __name__ == "__main__":
    sys.exit(main())
