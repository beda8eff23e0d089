"""Synthetic drift streams.

Every generator is a stateful, seeded instance source: ``next_instance()``
yields one labeled Instance, and identical construction parameters (seed
included) give bitwise-identical sequences. Sampling is PCG64-backed and
drawn in fixed-size blocks, so the sequence does not depend on how callers
interleave their pulls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schema import Instance, Schema

_BLOCK = 1024


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gamma11(rng: np.random.Generator, n: int) -> np.ndarray:
    """n draws from Gamma(1,1), sampled as -ln(U), U uniform on (0, 1]."""
    u = rng.random(n)
    return -np.log1p(-u).clip(min=1e-300)


# --------------------------------------------------------------------------
# categorical joint-distribution table and the drift operator
# --------------------------------------------------------------------------

@dataclass
class CellTable:
    """P(X) as per-attribute value probabilities plus a class per value cell.

    ``class_assignment`` is a flat array over the v1*...*vn attribute-value
    combinations, indexed with row-major strides (attribute 0 slowest).
    """

    attribute_value_probs: list[np.ndarray]
    class_assignment: np.ndarray
    class_count: int

    def __post_init__(self) -> None:
        cells = 1
        for p in self.attribute_value_probs:
            if abs(float(p.sum()) - 1.0) > 1e-9 or (p <= 0).any():
                raise ValueError("attribute probabilities must be positive and sum to 1")
            cells *= len(p)
        if len(self.class_assignment) != cells:
            raise ValueError(f"class assignment covers {len(self.class_assignment)} cells, need {cells}")

    @property
    def n_cells(self) -> int:
        return len(self.class_assignment)

    def cell_index(self, values) -> int:
        idx = 0
        for p, v in zip(self.attribute_value_probs, values):
            idx = idx * len(p) + int(v)
        return idx

    def class_of(self, values) -> int:
        return int(self.class_assignment[self.cell_index(values)])

    @staticmethod
    def random(rng: np.random.Generator, n_attributes: int, n_values: int, class_count: int) -> "CellTable":
        probs = []
        for _ in range(n_attributes):
            g = gamma11(rng, n_values)
            probs.append(g / g.sum())
        cells = n_values**n_attributes
        assignment = rng.integers(0, class_count, size=cells, dtype=np.int64)
        return CellTable(probs, assignment, class_count)


def apply_drift(table: CellTable, magnitude: float, rng: np.random.Generator) -> CellTable:
    """Reassign the class of round(magnitude * n_cells) uniformly chosen cells.

    Each selected cell gets a uniformly drawn class different from its current
    one; attribute-value probabilities are untouched. Rounding is half-up.
    """
    if not 0.0 <= magnitude <= 1.0:
        raise ValueError(f"drift magnitude {magnitude} outside [0, 1]")
    n_cells = table.n_cells
    n_change = int(math.floor(magnitude * n_cells + 0.5))
    assignment = table.class_assignment.copy()
    if n_change:
        chosen = rng.choice(n_cells, size=n_change, replace=False)
        draws = rng.integers(0, table.class_count - 1, size=n_change)
        for cell, d in zip(chosen, draws):
            old = assignment[cell]
            assignment[cell] = d if d < old else d + 1
    return CellTable([p.copy() for p in table.attribute_value_probs], assignment, table.class_count)


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------

class _BlockStream:
    """Shared machinery: subclasses fill blocks of instances on demand."""

    schema: Schema

    def __init__(self) -> None:
        self._buffer: list[Instance] = []
        self._pos = 0

    def next_instance(self) -> Instance:
        if self._pos >= len(self._buffer):
            self._buffer = self._make_block()
            self._pos = 0
        inst = self._buffer[self._pos]
        self._pos += 1
        return inst

    def take(self, n: int) -> list[Instance]:
        return [self.next_instance() for _ in range(n)]

    def __iter__(self):
        while True:
            yield self.next_instance()

    def _make_block(self) -> list[Instance]:
        raise NotImplementedError


class AbruptDriftGenerator(_BlockStream):
    """Nominal stream with an instantaneous switch of P(Y|X) at the drift point.

    A starting cell table is drawn (Gamma(1,1) value probabilities, uniform
    class per cell) and a post-drift table derived from it via ``apply_drift``.
    In recurrent mode the two tables alternate every ``drift_point`` instances
    (or every ``period`` when given); otherwise the post table takes over for
    good at t >= drift_point.
    """

    def __init__(
        self,
        n_attributes: int = 5,
        n_values: int = 5,
        class_count: int = 5,
        magnitude: float = 1.0,
        drift_point: int = 150_000,
        recurrent: bool = False,
        period: int | None = None,
        seed: int = 1,
    ):
        super().__init__()
        if drift_point < 1:
            raise ValueError("drift_point must be >= 1")
        self.schema = Schema.uniform_nominal(n_attributes, n_values, class_count)
        self.magnitude = magnitude
        self.drift_point = drift_point
        self.recurrent = recurrent
        self.period = period if period is not None else drift_point
        self._rng = make_rng(seed)
        self.table_before = CellTable.random(self._rng, n_attributes, n_values, class_count)
        self.table_after = apply_drift(self.table_before, magnitude, self._rng)
        self._cum = [np.cumsum(p) for p in self.table_before.attribute_value_probs]
        self._t = 0

    def table_at(self, t: int) -> CellTable:
        if self.recurrent:
            return self.table_after if (t // self.period) % 2 == 1 else self.table_before
        return self.table_after if t >= self.drift_point else self.table_before

    def _make_block(self) -> list[Instance]:
        n_attr = self.schema.n_attributes
        u = self._rng.random((_BLOCK, n_attr))
        values = np.empty((_BLOCK, n_attr), dtype=np.int64)
        for i, cum in enumerate(self._cum):
            values[:, i] = np.searchsorted(cum, u[:, i], side="right")
            np.clip(values[:, i], 0, len(cum) - 1, out=values[:, i])
        cells = np.zeros(_BLOCK, dtype=np.int64)
        for i, cum in enumerate(self._cum):
            cells = cells * len(cum) + values[:, i]
        ts = np.arange(self._t, self._t + _BLOCK)
        if self.recurrent:
            after = (ts // self.period) % 2 == 1
        else:
            after = ts >= self.drift_point
        labels = np.where(
            after,
            self.table_after.class_assignment[cells],
            self.table_before.class_assignment[cells],
        )
        self._t += _BLOCK
        return [Instance(tuple(row), int(y)) for row, y in zip(values.tolist(), labels.tolist())]


# STAGGER concept definitions, attributes (size, color, shape) each with
# three values: size {small, medium, large}, color {red, green, blue},
# shape {square, circular, triangular}.
SMALL, MEDIUM, LARGE = 0, 1, 2
RED, GREEN, BLUE = 0, 1, 2
SQUARE, CIRCULAR, TRIANGULAR = 0, 1, 2


def stagger_concept(function: int, size: int, color: int, shape: int) -> int:
    if function == 1:
        return int(size == SMALL and color == RED)
    if function == 2:
        return int(color == GREEN or shape == CIRCULAR)
    if function == 3:
        return int(size == MEDIUM or size == LARGE)
    raise ValueError(f"STAGGER function must be 1..3, got {function}")


class StaggerGenerator(_BlockStream):
    """Three ternary attributes, binary class from one of three boolean rules."""

    def __init__(self, function: int = 1, seed: int = 1):
        super().__init__()
        if function not in (1, 2, 3):
            raise ValueError(f"STAGGER function must be 1..3, got {function}")
        self.schema = Schema.uniform_nominal(3, 3, 2)
        self.function = function
        self._rng = make_rng(seed)

    def _make_block(self) -> list[Instance]:
        vals = self._rng.integers(0, 3, size=(_BLOCK, 3))
        size, color, shape = vals[:, 0], vals[:, 1], vals[:, 2]
        if self.function == 1:
            labels = (size == SMALL) & (color == RED)
        elif self.function == 2:
            labels = (color == GREEN) | (shape == CIRCULAR)
        else:
            labels = (size == MEDIUM) | (size == LARGE)
        return [
            Instance(tuple(row), int(y))
            for row, y in zip(vals.tolist(), labels.astype(int).tolist())
        ]


SEA_THRESHOLDS = {1: 0.8, 2: 0.9, 3: 0.7, 4: 0.95}


class SeaGenerator(_BlockStream):
    """Three numeric attributes on [0,1]; class 1 when x0 + x1 <= threshold."""

    def __init__(self, function: int = 1, noise: float = 0.0, seed: int = 1):
        super().__init__()
        if function not in SEA_THRESHOLDS:
            raise ValueError(f"SEA function must be 1..4, got {function}")
        if not 0.0 <= noise < 1.0:
            raise ValueError(f"noise fraction {noise} outside [0, 1)")
        self.schema = Schema.unit_numeric(3)
        self.function = function
        self.threshold = SEA_THRESHOLDS[function]
        self.noise = noise
        self._rng = make_rng(seed)

    def _make_block(self) -> list[Instance]:
        x = self._rng.random((_BLOCK, 3))
        labels = (x[:, 0] + x[:, 1] <= self.threshold).astype(int)
        if self.noise > 0.0:
            flips = self._rng.random(_BLOCK) < self.noise
            labels = labels ^ flips
        return [Instance(tuple(row), int(y)) for row, y in zip(x.tolist(), labels.tolist())]


class HyperplaneGenerator(_BlockStream):
    """Rotating hyperplane in [0,1]^d; k weights drift by t per instance.

    Label is 1 when sum(w_i x_i) >= sum(w_i) / 2. Each drifting weight moves
    by ``magnitude`` per instance along a direction that reverses with
    probability ``sigma``.
    """

    def __init__(
        self,
        n_attributes: int = 10,
        drift_attributes: int = 2,
        magnitude: float = 0.0,
        sigma: float = 0.1,
        noise: float = 0.0,
        seed: int = 1,
    ):
        super().__init__()
        if drift_attributes > n_attributes:
            raise ValueError("drift_attributes cannot exceed n_attributes")
        self.schema = Schema.unit_numeric(n_attributes)
        self.n_attributes = n_attributes
        self.drift_attributes = drift_attributes
        self.magnitude = magnitude
        self.sigma = sigma
        self.noise = noise
        self._rng = make_rng(seed)
        self._weights = self._rng.random(n_attributes)
        self._directions = np.ones(drift_attributes)

    def _make_block(self) -> list[Instance]:
        d, k = self.n_attributes, self.drift_attributes
        x = self._rng.random((_BLOCK, d))
        w = np.tile(self._weights, (_BLOCK, 1))
        if k and self.magnitude:
            flips = self._rng.random((_BLOCK, k)) < self.sigma
            signs = np.where(flips, -1.0, 1.0)
            signs[0] *= self._directions
            dirs = np.cumprod(signs, axis=0)
            steps = np.cumsum(dirs * self.magnitude, axis=0)
            w[:, :k] += steps
            self._weights = w[-1].copy()
            self._directions = dirs[-1]
        sums = (w * x).sum(axis=1)
        labels = (sums >= w.sum(axis=1) / 2.0).astype(int)
        if self.noise > 0.0:
            flips = self._rng.random(_BLOCK) < self.noise
            labels = labels ^ flips
        return [Instance(tuple(row), int(y)) for row, y in zip(x.tolist(), labels.tolist())]


class RecurrentConceptDriftStream:
    """Sigmoid mixture of two sub-streams with drift recurring every period.

    Concept centers sit at ``position + m * period``; around center m the
    probability of drawing from the incoming stream follows
    1 / (1 + exp(-4 (t - center) / width)). Odd transitions lead back to the
    first stream, so the concept alternates indefinitely.
    """

    def __init__(self, base, drift, position: int, period: int, width: int, seed: int = 1):
        if base.schema != drift.schema:
            raise ValueError("sub-streams must share a schema")
        if position < 1 or period < 1 or width < 1:
            raise ValueError("position, period and width must be >= 1")
        self.schema = base.schema
        self.base = base
        self.drift = drift
        self.position = position
        self.period = period
        self.width = width
        self._rng = make_rng(seed)
        self._t = 0
        self._u = np.empty(0)
        self._upos = 0

    def _uniform(self) -> float:
        if self._upos >= len(self._u):
            self._u = self._rng.random(_BLOCK)
            self._upos = 0
        u = self._u[self._upos]
        self._upos += 1
        return float(u)

    def prob_drift_stream(self, t: int) -> float:
        """Probability that instance t comes from the second (drift) stream."""
        m = max(0, round((t - self.position) / self.period))
        center = self.position + m * self.period
        z = 4.0 * (t - center) / self.width
        if z > 60:
            sig = 1.0
        elif z < -60:
            sig = 0.0
        else:
            sig = 1.0 / (1.0 + math.exp(-z))
        return sig if m % 2 == 0 else 1.0 - sig

    def next_instance(self) -> Instance:
        p = self.prob_drift_stream(self._t)
        self._t += 1
        if p >= 1.0:
            pick_drift = True
        elif p <= 0.0:
            pick_drift = False
        else:
            pick_drift = self._uniform() < p
        return self.drift.next_instance() if pick_drift else self.base.next_instance()

    def take(self, n: int) -> list[Instance]:
        return [self.next_instance() for _ in range(n)]

    def __iter__(self):
        while True:
            yield self.next_instance()
