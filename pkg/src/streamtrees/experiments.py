"""Batch experiment grids: learners x streams x seeds, with CSV/markdown output.

A config is a flat key=value file (repeated ``stream=`` and ``learner=``
lines); presets bundle the flag pairs and stream lists for the published
comparisons so they run by name.
"""

from __future__ import annotations

import dataclasses
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .evaluate import (
    averaged_series,
    compare,
    comparison_csv,
    comparison_markdown,
    prequential_run,
)
from .hat import HatConfig, HoeffdingAdaptiveTreeClassifier
from .specparse import parse_stream_spec, build_generator
from .tree import AVERAGED, NODE_TIME, HoeffdingTreeClassifier, StrategyConfig


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


_STRATEGY_FIELDS = {f.name for f in dataclasses.fields(StrategyConfig)}
_HAT_FIELDS = {f.name for f in dataclasses.fields(HatConfig)} - {"base"}


def _strategy_config(overrides: dict) -> StrategyConfig:
    bad = set(overrides) - _STRATEGY_FIELDS
    if bad:
        raise ConfigError(f"learner flags: unknown vfdt option(s) {sorted(bad)}")
    try:
        return StrategyConfig(**overrides)
    except ValueError as exc:
        raise ConfigError(f"learner flags: {exc}") from None


def _hat_config(overrides: dict) -> HatConfig:
    hat_kwargs = {}
    base_kwargs = {}
    for key, value in overrides.items():
        if key in _HAT_FIELDS:
            hat_kwargs[key] = value
        elif key in _STRATEGY_FIELDS:
            base_kwargs[key] = value
        else:
            raise ConfigError(f"learner flags: unknown hat option {key!r}")
    try:
        return HatConfig(base=StrategyConfig(**base_kwargs), **hat_kwargs)
    except ValueError as exc:
        raise ConfigError(f"learner flags: {exc}") from None


@dataclass(frozen=True)
class LearnerSpec:
    name: str
    algorithm: str  # "vfdt" | "hat"
    overrides: tuple = ()

    def __post_init__(self) -> None:
        if self.algorithm not in ("vfdt", "hat"):
            raise ConfigError(f"learner {self.name}: algorithm must be vfdt or hat")
        self.config()  # validate flags eagerly

    def config(self):
        overrides = dict(self.overrides)
        if self.algorithm == "vfdt":
            return _strategy_config(overrides)
        return _hat_config(overrides)

    def build(self, schema, seed: int = 0):
        if self.algorithm == "vfdt":
            return HoeffdingTreeClassifier(schema, self.config())
        return HoeffdingAdaptiveTreeClassifier(schema, self.config(), seed=seed)


@dataclass
class ExperimentConfig:
    learners: list
    streams: list
    n_instances: int = 400_000
    snapshot_every: int = 0
    seeds: int = 1
    output_dir: str = "results"
    parallelism: int = 1

    def validate(self) -> None:
        if not self.learners:
            raise ConfigError("learners: need at least one learner")
        if not self.streams:
            raise ConfigError("streams: need at least one stream")
        if self.seeds < 1:
            raise ConfigError("seeds: must be >= 1")
        if self.n_instances < 1:
            raise ConfigError("instances: must be >= 1")
        if self.parallelism < 1:
            raise ConfigError("jobs: must be >= 1")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot-every: must be >= 0")
        names = [lrn.name for lrn in self.learners]
        if len(set(names)) != len(names):
            raise ConfigError("learners: names must be unique")
        for s in self.streams:
            parse_stream_spec(s)  # raises ParseError with offset on a bad row


_BOOL_STRINGS = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _coerce(text: str):
    low = text.lower()
    if low in _BOOL_STRINGS:
        return _BOOL_STRINGS[low]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_learner_line(text: str) -> LearnerSpec:
    """``name algorithm [flag=value ...]``, e.g. ``resplit vfdt allow_resplit=true``."""
    parts = text.split()
    if len(parts) < 2:
        raise ConfigError(f"learner: expected 'name algorithm [flag=value ...]', got {text!r}")
    overrides = []
    for part in parts[2:]:
        if "=" not in part:
            raise ConfigError(f"learner {parts[0]}: flag {part!r} is not key=value")
        key, _, value = part.partition("=")
        overrides.append((key, _coerce(value)))
    return LearnerSpec(parts[0], parts[1].lower(), tuple(overrides))


def parse_config_file(path: str) -> ExperimentConfig:
    cfg = ExperimentConfig(learners=[], streams=[])
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if key == "stream":
                cfg.streams.append(value)
            elif key == "learner":
                cfg.learners.append(parse_learner_line(value))
            elif key in ("instances", "n_instances"):
                cfg.n_instances = int(value)
            elif key in ("snapshot_every", "snapshot-every"):
                cfg.snapshot_every = int(value)
            elif key == "seeds":
                cfg.seeds = int(value)
            elif key in ("out", "output_dir"):
                cfg.output_dir = value
            elif key == "jobs":
                cfg.parallelism = int(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return cfg


# --------------------------------------------------------------------------
# the testbench rows (published table rows restricted to supported generators)
# --------------------------------------------------------------------------

RECURRENT_SEA = (
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 "
    "-s (SEAGenerator -f 2 -i 2) -d (SEAGenerator -f 3 -i 3)"
)
RECURRENT_STAGGER = (
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 "
    "-s (STAGGERGenerator -i 2 -f 2) -d (STAGGERGenerator -i 3 -f 3)"
)
HYPERPLANE_ROWS = [
    "HyperplaneGenerator -k 10 -t 0.0001 -i 2",
    "HyperplaneGenerator -k 10 -t 0.001 -i 2",
    "HyperplaneGenerator -k 10 -t 0.01 -i 2",
    "HyperplaneGenerator -k 5 -t 0.0001 -i 2",
    "HyperplaneGenerator -k 5 -t 0.001 -i 2",
    "HyperplaneGenerator -k 5 -t 0.01 -i 2",
]
ABRUPT_ROWS = [
    "AbruptDriftGenerator -c -o 1.0 -z 2 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 3 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 3 -n 3 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 3 -n 3 -v 3 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 3 -n 3 -v 4 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 3 -n 3 -v 5 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 4 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 4 -n 4 -v 4 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 5 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c -o 1.0 -z 5 -n 5 -v 5 -r 2 -b 200000 -d Recurrent",
]
TESTBENCH_ROWS = [RECURRENT_SEA, RECURRENT_STAGGER] + HYPERPLANE_ROWS + ABRUPT_ROWS

# low-dimensional abrupt rows (at most 3 values per attribute) plus STAGGER,
# and the two high-dimensional rows where the no-voting baseline holds up
ALTVOTE_ROWS = [r for r in ABRUPT_ROWS if " -z 2 " in r or " -z 3 " in r] + [
    RECURRENT_STAGGER,
    ABRUPT_ROWS[7],  # 4x4x4
    ABRUPT_ROWS[9],  # 5x5x5
]

AMNESIA_STREAM = "AbruptDriftGenerator -c -o 1.0 -z 5 -n 5 -v 5 -r 1 -b 150000"

# the published-algorithm reading of the base learner: averaged gains over
# evaluations, instance-count split timer
_STRIPPED = (("infogain_mode", AVERAGED), ("counter_mode", NODE_TIME))
_MOA_SIDE = (("allow_resplit", True),)  # instantaneous + weight_seen are the defaults


def _vfdt(name, *overrides) -> LearnerSpec:
    return LearnerSpec(name, "vfdt", tuple(overrides))


def _hat(name, *overrides) -> LearnerSpec:
    return LearnerSpec(name, "hat", tuple(overrides))


def _preset_config(learner_a, learner_b, streams, n_instances=400_000, seeds=1,
                   snapshot_every=0) -> ExperimentConfig:
    return ExperimentConfig(
        learners=[learner_a, learner_b],
        streams=list(streams),
        n_instances=n_instances,
        seeds=seeds,
        snapshot_every=snapshot_every,
    )


_PRESETS = {
    # base tree flag studies
    "resplit-vfdt": lambda: _preset_config(
        _vfdt("vfdt"), _vfdt("vfdt-resplit", ("allow_resplit", True)), TESTBENCH_ROWS),
    "infogain-vfdt": lambda: _preset_config(
        _vfdt("vfdt-averaged", ("infogain_mode", AVERAGED)),
        _vfdt("vfdt-instantaneous"), TESTBENCH_ROWS),
    "counters-vfdt": lambda: _preset_config(
        _vfdt("vfdt-node-time", ("counter_mode", NODE_TIME)),
        _vfdt("vfdt-weight-seen"), TESTBENCH_ROWS),
    "combined-vfdt": lambda: _preset_config(
        _vfdt("vfdt-stripped", *_STRIPPED),
        _vfdt("vfdt-combined", *_MOA_SIDE), TESTBENCH_ROWS),
    "eviscerate-vfdt": lambda: _preset_config(
        _vfdt("vfdt"), _vfdt("vfdt-eviscerate", ("eviscerate_on_used_best", True)),
        TESTBENCH_ROWS),
    # adaptive tree flag studies
    "resplit-hat": lambda: _preset_config(
        _hat("hat"), _hat("hat-resplit", ("allow_resplit", True)), TESTBENCH_ROWS),
    # the alternate-voting study runs with a conservative replacement period in
    # both arms: promotion and voting compete for the same signal, and with
    # immediate promotion there is no window in which lookahead can matter
    "altvote-hat": lambda: _preset_config(
        _hat("hat", ("replacement_check_interval", 10_000)),
        _hat("hat-single-vote", ("voting_mode", "single_alternate"),
             ("replacement_check_interval", 10_000)),
        ALTVOTE_ROWS),
    "multialt-hat": lambda: _preset_config(
        _hat("hat-multi-vote", ("voting_mode", "multiple_alternates")),
        _hat("hat-single-vote", ("voting_mode", "single_alternate")), TESTBENCH_ROWS),
    "singleleaf-hat": lambda: _preset_config(
        _hat("hat-vote-no-single-leaves", ("voting_mode", "multiple_excluding_single_leaves")),
        _hat("hat-multi-vote", ("voting_mode", "multiple_alternates")), TESTBENCH_ROWS),
    "poisson-hat": lambda: _preset_config(
        _hat("hat-vote-no-single-leaves", ("voting_mode", "multiple_excluding_single_leaves")),
        _hat("hat-poisson", ("voting_mode", "multiple_excluding_single_leaves"),
             ("poisson_weighting", True)), TESTBENCH_ROWS),
    "avg-infogain-hat": lambda: _preset_config(
        _hat("hat"), _hat("hat-averaged", ("infogain_mode", AVERAGED)), TESTBENCH_ROWS),
    "root-replace-hat": lambda: _preset_config(
        _hat("hat-moa-flags", *_MOA_SIDE),
        _hat("hat-root-replace", *_MOA_SIDE, ("replace_root_on_alternate_split", True)),
        TESTBENCH_ROWS),
    "subtree-replace-hat": lambda: _preset_config(
        _hat("hat-moa-flags", *_MOA_SIDE),
        _hat("hat-subtree-replace", *_MOA_SIDE, ("replace_subtree_on_alternate_split", True)),
        TESTBENCH_ROWS),
    "both-replace-hat": lambda: _preset_config(
        _hat("hat"),
        _hat("hat-both-replace", ("replace_root_on_alternate_split", True),
             ("replace_subtree_on_alternate_split", True)), TESTBENCH_ROWS),
    "vfdt-flags-in-hat": lambda: _preset_config(
        _hat("hat-stripped", *_STRIPPED),
        _hat("hat-moa-flags", *_MOA_SIDE), TESTBENCH_ROWS),
    # drift-recovery figure: tie threshold opened up so the tree actually grows
    # on the 5x5x5 stream, identically in both arms
    "amnesia-figure": lambda: _preset_config(
        _vfdt("vfdt", ("tau", 0.15)),
        _vfdt("vfdt-eidetic", ("tau", 0.15), ("eidetic", True)),
        [AMNESIA_STREAM], n_instances=300_000, seeds=10, snapshot_every=1000),
}

PRESET_NAMES = sorted(_PRESETS)


def preset(name: str) -> ExperimentConfig:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"preset: unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return factory()


# --------------------------------------------------------------------------
# grid execution
# --------------------------------------------------------------------------

def _run_one(task):
    """One (learner, stream, seed) cell; module-level so it pickles."""
    learner_spec, stream_text, variant, n_instances, snapshot_every = task
    spec = parse_stream_spec(stream_text).reseeded(variant)
    stream = build_generator(spec)
    learner = learner_spec.build(stream.schema, seed=variant)
    result = prequential_run(learner, stream, n_instances, snapshot_every)
    return result


def run_grid(config: ExperimentConfig):
    """Execute the full grid; returns {(learner, stream, seed): PrequentialResult}."""
    tasks = []
    keys = []
    for stream_text in config.streams:
        for learner_spec in config.learners:
            for variant in range(config.seeds):
                tasks.append((learner_spec, stream_text, variant,
                              config.n_instances, config.snapshot_every))
                keys.append((learner_spec.name, stream_text, variant))
    if config.parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    return dict(zip(keys, results))


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_")[:80]


def run_experiment(config: ExperimentConfig) -> None:
    """Run the grid and write results.csv, comparison tables and series files."""
    config.validate()
    os.makedirs(config.output_dir, exist_ok=True)
    results = run_grid(config)

    lines = ["stream,learner,seed,instances,final_error,wall_seconds"]
    for (lname, stream_text, variant), res in results.items():
        lines.append(
            f'"{stream_text}",{lname},{variant},{res.instances_processed},'
            f"{res.final_error:.5f},{res.wall_time:.3f}"
        )
    with open(os.path.join(config.output_dir, "results.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    def mean_error(lname, stream_text):
        errs = [results[(lname, stream_text, v)].final_error for v in range(config.seeds)]
        return sum(errs) / len(errs)

    if len(config.learners) == 2:
        name_a, name_b = (lrn.name for lrn in config.learners)
        errors_a = [mean_error(name_a, s) for s in config.streams]
        errors_b = [mean_error(name_b, s) for s in config.streams]
        report = compare(errors_a, errors_b, config.streams,
                         meta={"instances": config.n_instances, "seeds": config.seeds})
        with open(os.path.join(config.output_dir, "comparison.md"), "w", encoding="utf-8") as fh:
            fh.write(comparison_markdown(report, name_a, name_b))
        with open(os.path.join(config.output_dir, "comparison.csv"), "w", encoding="utf-8") as fh:
            fh.write(comparison_csv(report))

    if config.snapshot_every:
        for stream_text in config.streams:
            stream_dir = os.path.join(config.output_dir, "series", _slug(stream_text))
            os.makedirs(stream_dir, exist_ok=True)
            for lrn in config.learners:
                series = averaged_series(
                    [results[(lrn.name, stream_text, v)].error_series for v in range(config.seeds)]
                )
                path = os.path.join(stream_dir, f"{lrn.name}.csv")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write("instance_index,mean_error\n")
                    fh.writelines(f"{idx},{err:.6f}\n" for idx, err in series)
