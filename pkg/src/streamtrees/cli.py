"""Command line runner for experiment grids.

Exit codes: 0 success, 2 invalid configuration (message names the field),
3 stream names a recognized but unsupported generator.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import ConfigError, PRESET_NAMES, parse_config_file, preset, run_experiment
from .specparse import OutOfScopeError, ParseError


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamtrees",
        description="Run a learner x stream x seed experiment grid and write "
                    "results.csv, comparison tables, and error-series files.",
    )
    parser.add_argument("--config", metavar="PATH", help="key=value experiment config file")
    parser.add_argument("--preset", metavar="NAME", help=f"one of: {', '.join(PRESET_NAMES)}")
    parser.add_argument("--out", metavar="DIR", help="output directory (default: results)")
    parser.add_argument("--seeds", type=int, metavar="N", help="stream reseedings per row")
    parser.add_argument("--instances", type=int, metavar="N", help="instances per run")
    parser.add_argument("--snapshot-every", type=int, metavar="N",
                        help="error-series window size (0 disables series output)")
    parser.add_argument("--jobs", type=int, metavar="N", help="parallel worker processes")
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.config and args.preset:
            raise ConfigError("config/preset: give either --config or --preset, not both")
        if args.config:
            config = parse_config_file(args.config)
        elif args.preset:
            config = preset(args.preset)
        else:
            raise ConfigError("config: one of --config or --preset is required")
        if args.out is not None:
            config.output_dir = args.out
        if args.seeds is not None:
            config.seeds = args.seeds
        if args.instances is not None:
            config.n_instances = args.instances
        if args.snapshot_every is not None:
            config.snapshot_every = args.snapshot_every
        if args.jobs is not None:
            config.parallelism = args.jobs
        config.validate()
    except (ConfigError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        run_experiment(config)
    except OutOfScopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
