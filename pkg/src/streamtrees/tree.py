"""Incremental decision tree driven by the Hoeffding split test.

Leaves accumulate attribute-value-class counts (``n[attr][value][class]``)
in place of instances and are evaluated for a split whenever their counter
has advanced by a grace period. Every behavior the base algorithm leaves
open is a flag on :class:`StrategyConfig`:

- ``eidetic``: keep a replay buffer so fresh children start from exact
  recounts instead of zeroed statistics (the default "amnesiac" children).
  Buffers are unbounded and grow with the stream; desk-scale runs only.
- ``allow_resplit``: let nominal attributes already used on the path win the
  split evaluation again, producing one reachable child with clean counts.
- ``eviscerate_on_used_best``: instead of resplitting, clear the leaf's
  statistics and class distribution in place when a used attribute wins.
- ``infogain_mode``: score candidates by the latest computed gain (with the
  Hoeffding n taken from the leaf counter) or by the running mean of gains
  across evaluations (with n = number of evaluations).
- ``counter_mode``: drive evaluation cadence and the Hoeffding n off the
  instance count or off the accumulated class weight, which includes mass
  inherited from the parent at creation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .schema import Instance, Schema, check_instance

INSTANTANEOUS = "instantaneous_over_examples"
AVERAGED = "averaged_over_evaluations"
NODE_TIME = "node_time"
WEIGHT_SEEN = "weight_seen"

NO_SPLIT = "no_split"
SPLIT = "split"
RESPLIT = "resplit"
EVISCERATE = "eviscerate"

_NUMERIC_SPLIT_POINTS = 10
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class StrategyConfig:
    eidetic: bool = False
    allow_resplit: bool = False
    eviscerate_on_used_best: bool = False
    infogain_mode: str = INSTANTANEOUS
    counter_mode: str = WEIGHT_SEEN
    grace_period: int = 200
    delta: float = 1e-7
    tau: float = 0.05

    def __post_init__(self) -> None:
        if self.allow_resplit and self.eviscerate_on_used_best:
            raise ValueError("allow_resplit and eviscerate_on_used_best are mutually exclusive")
        if self.infogain_mode not in (INSTANTANEOUS, AVERAGED):
            raise ValueError(f"bad infogain_mode {self.infogain_mode!r}")
        if self.counter_mode not in (NODE_TIME, WEIGHT_SEEN):
            raise ValueError(f"bad counter_mode {self.counter_mode!r}")
        if self.grace_period < 1:
            raise ValueError("grace_period must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.tau < 0.0:
            raise ValueError("tau must be >= 0")


# --------------------------------------------------------------------------
# merit primitives
# --------------------------------------------------------------------------

def entropy(mass, total: float | None = None) -> float:
    """Base-2 entropy of a non-negative mass vector; zero mass gives 0."""
    if total is None:
        total = 0.0
        for m in mass:
            total += m
    if total <= 0.0:
        return 0.0
    h = 0.0
    for m in mass:
        if m > 0.0:
            p = m / total
            if p > 0.0:  # a tiny mass over a huge total can underflow to 0
                h -= p * math.log2(p)
    return h


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """Confidence radius sqrt(R^2 ln(1/delta) / (2n))."""
    if value_range < 0.0:
        raise ValueError("range must be non-negative")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if n <= 0:
        raise ValueError("no observations: n must be positive")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


class NodeStatistics:
    """Per-leaf attribute observers: nominal counts and per-class Gaussians."""

    __slots__ = ("schema", "nominal", "numeric", "minmax")

    def __init__(self, schema: Schema):
        self.schema = schema
        c = schema.class_count
        self.nominal: list = []
        self.numeric: list = []
        self.minmax: list = []
        for attr in schema.attributes:
            if schema.is_nominal(len(self.nominal)):
                self.nominal.append([[0.0] * c for _ in range(attr.n_values)])
                self.numeric.append(None)
                self.minmax.append(None)
            else:
                self.nominal.append(None)
                self.numeric.append([[0.0, 0.0, 0.0] for _ in range(c)])
                self.minmax.append([math.inf, -math.inf])

    def observe(self, values, label: int, weight: float) -> None:
        if weight <= 0.0:
            return
        nominal = self.nominal
        numeric = self.numeric
        minmax = self.minmax
        for i, v in enumerate(values):
            counts = nominal[i]
            if counts is not None:
                counts[v][label] += weight
            else:
                obs = numeric[i][label]
                count = obs[0] + weight
                delta = v - obs[1]
                mean = obs[1] + weight * delta / count
                obs[0] = count
                obs[1] = mean
                obs[2] += weight * delta * (v - mean)
                mm = minmax[i]
                if v < mm[0]:
                    mm[0] = v
                if v > mm[1]:
                    mm[1] = v

    def total_observed(self, attr: int) -> float:
        counts = self.nominal[attr]
        if counts is not None:
            return sum(sum(row) for row in counts)
        return sum(obs[0] for obs in self.numeric[attr])


def _gaussian_left_mass(obs, t: float) -> float:
    count, mean, m2 = obs
    if count <= 0.0:
        return 0.0
    var = m2 / count
    if var <= 1e-12:
        return count if mean <= t else 0.0
    z = (t - mean) / math.sqrt(var)
    return count * 0.5 * (1.0 + math.erf(z / _SQRT2))


def info_gain(stats: NodeStatistics, class_dist, attribute: int):
    """Information gain of splitting on one attribute.

    The parent entropy comes from ``class_dist`` (the leaf's distribution,
    parent-derived mass included), child distributions from the observed
    statistics only, so gains can go negative after a drift. Attributes with
    no observed weight, or with all observed mass on a single value, gain
    exactly 0.
    """
    gain, _ = _gain_with_split(stats, class_dist, entropy(class_dist), attribute)
    return gain


def _gain_with_split(stats, class_dist, parent_entropy, attribute):
    counts = stats.nominal[attribute]
    if counts is not None:
        totals = [sum(row) for row in counts]
        total = sum(totals)
        if total <= 0.0:
            return 0.0, None
        if sum(1 for t in totals if t > 0.0) <= 1:
            return 0.0, None
        weighted = 0.0
        for row, t in zip(counts, totals):
            if t > 0.0:
                weighted += t * entropy(row, t)
        return parent_entropy - weighted / total, None

    observers = stats.numeric[attribute]
    lo, hi = stats.minmax[attribute]
    total = sum(obs[0] for obs in observers)
    if total <= 0.0 or hi <= lo:
        return 0.0, None
    c = len(observers)
    best_gain = -math.inf
    best = None
    step = (hi - lo) / (_NUMERIC_SPLIT_POINTS + 1)
    for k in range(1, _NUMERIC_SPLIT_POINTS + 1):
        t = lo + k * step
        left = [_gaussian_left_mass(observers[i], t) for i in range(c)]
        right = [observers[i][0] - left[i] for i in range(c)]
        wl = sum(left)
        wr = total - wl
        if wl <= 1e-12 or wr <= 1e-12:
            continue
        weighted = (wl * entropy(left, wl) + wr * entropy(right, wr)) / total
        gain = parent_entropy - weighted
        if gain > best_gain:
            best_gain = gain
            best = (t, left, right)
    if best is None:
        return 0.0, None
    return best_gain, best


# --------------------------------------------------------------------------
# nodes
# --------------------------------------------------------------------------

class SplitNode:
    """Internal node: multiway on a nominal attribute or binary on a threshold."""

    __slots__ = ("attr", "threshold", "children")

    def __init__(self, attr: int, threshold: float | None, children: list):
        self.attr = attr
        self.threshold = threshold
        self.children = children

    def branch(self, values) -> int:
        if self.threshold is None:
            return values[self.attr]
        return 0 if values[self.attr] <= self.threshold else 1


class LearningLeaf:
    """Leaf accumulating statistics; the only place learning happens."""

    __slots__ = (
        "stats",
        "class_dist",
        "total_weight",
        "node_time",
        "counter_at_last_eval",
        "used_attributes",
        "buffer",
        "eval_count",
        "gain_sums",
    )

    def __init__(self, schema: Schema, class_dist=None, used_attributes=frozenset(), eidetic=False):
        self.stats = NodeStatistics(schema)
        self.class_dist = list(class_dist) if class_dist is not None else [0.0] * schema.class_count
        self.total_weight = sum(self.class_dist)
        self.node_time = 0
        self.counter_at_last_eval = 0.0
        self.used_attributes = frozenset(used_attributes)
        self.buffer: list | None = [] if eidetic else None
        self.eval_count = 0
        self.gain_sums = [0.0] * schema.n_attributes

    def learn(self, values, label: int, weight: float) -> None:
        self.node_time += 1
        if weight <= 0.0:
            return
        self.stats.observe(values, label, weight)
        self.class_dist[label] += weight
        self.total_weight += weight

    def replay(self, inst: Instance) -> None:
        """Feed a buffered instance back in without counting it as new."""
        self.stats.observe(inst.values, inst.class_label, inst.weight)
        self.class_dist[inst.class_label] += inst.weight
        self.total_weight += inst.weight
        self.buffer.append(inst)

    def is_pure(self) -> bool:
        seen = 0
        for m in self.class_dist:
            if m > 0.0:
                seen += 1
                if seen > 1:
                    return False
        return True

    def eviscerate(self) -> None:
        """Clear statistics and class distribution in place."""
        schema = self.stats.schema
        self.stats = NodeStatistics(schema)
        self.class_dist = [0.0] * schema.class_count
        self.total_weight = 0.0
        self.node_time = 0
        self.counter_at_last_eval = 0.0
        self.eval_count = 0
        self.gain_sums = [0.0] * schema.n_attributes
        if self.buffer is not None:
            self.buffer = []


@dataclass
class SplitDecision:
    best_attribute: int | None  # None stands for the null split
    second_best_attribute: int | None
    best_merit: float
    second_merit: float
    epsilon: float
    action: str
    threshold: float | None = None
    child_dists: tuple | None = None  # numeric splits: (left, right) class masses


def evaluate_split(leaf: LearningLeaf, config: StrategyConfig, class_count: int) -> SplitDecision:
    """Score all candidate attributes against the null split.

    Used nominal attributes only enter the candidate set when resplitting or
    evisceration is enabled; the null split carries merit 0 and loses merit
    ties to real attributes.
    """
    schema = leaf.stats.schema
    allow_used = config.allow_resplit or config.eviscerate_on_used_best
    parent_entropy = entropy(leaf.class_dist, leaf.total_weight)
    raw = []  # (attr, gain, split_info)
    for attr in range(schema.n_attributes):
        if leaf.stats.nominal[attr] is not None and attr in leaf.used_attributes and not allow_used:
            continue
        gain, split_info = _gain_with_split(leaf.stats, leaf.class_dist, parent_entropy, attr)
        raw.append((attr, gain, split_info))

    leaf.eval_count += 1
    if config.infogain_mode == AVERAGED:
        sums = leaf.gain_sums
        for attr, gain, _ in raw:
            sums[attr] += gain
        merits = [(attr, sums[attr] / leaf.eval_count, info) for attr, gain, info in raw]
        n = leaf.eval_count
    else:
        merits = raw
        n = leaf.node_time if config.counter_mode == NODE_TIME else leaf.total_weight

    best = second = None
    for cand in merits:
        if best is None or cand[1] > best[1]:
            best, second = cand, best
        elif second is None or cand[1] > second[1]:
            second = cand
    eps = hoeffding_bound(math.log2(class_count), config.delta, n)

    if best is None or best[1] < 0.0:
        # the null split outranks every attribute
        second_merit = best[1] if best is not None else 0.0
        return SplitDecision(None, best[0] if best else None, 0.0, second_merit, eps, NO_SPLIT)

    second_attr, second_merit = (second[0], second[1]) if second is not None else (None, -math.inf)
    if second_merit < 0.0:
        second_attr, second_merit = None, 0.0  # null split becomes the runner-up

    attr, merit, split_info = best
    decision = SplitDecision(attr, second_attr, merit, second_merit, eps, NO_SPLIT)
    if split_info is not None:
        decision.threshold = split_info[0]
        decision.child_dists = (split_info[1], split_info[2])
    if merit - second_merit > eps or eps < config.tau:
        if leaf.stats.nominal[attr] is not None and attr in leaf.used_attributes:
            decision.action = EVISCERATE if config.eviscerate_on_used_best else RESPLIT
        else:
            decision.action = SPLIT
    return decision


def perform_split(leaf: LearningLeaf, decision: SplitDecision, config: StrategyConfig,
                  wrap_child=None):
    """Turn the leaf into a split node, or clear it for an evisceration.

    Fresh children start with zeroed statistics and a class distribution read
    off the parent's counts for their branch (amnesiac default); in eidetic
    mode the buffered instances are replayed instead so child statistics are
    exact. Returns the new SplitNode, or None when the leaf was eviscerated
    in place.
    """
    if decision.action == NO_SPLIT:
        raise ValueError("cannot perform a no_split decision")
    if decision.action == EVISCERATE:
        leaf.eviscerate()
        return None

    schema = leaf.stats.schema
    attr = decision.best_attribute
    eidetic = config.eidetic
    children: list[LearningLeaf] = []
    if leaf.stats.nominal[attr] is not None:
        used = leaf.used_attributes | {attr}
        for j in range(schema.n_values(attr)):
            dist = None if eidetic else list(leaf.stats.nominal[attr][j])
            children.append(LearningLeaf(schema, dist, used, eidetic))
        threshold = None
    else:
        left, right = decision.child_dists
        used = leaf.used_attributes
        children.append(LearningLeaf(schema, None if eidetic else list(left), used, eidetic))
        children.append(LearningLeaf(schema, None if eidetic else list(right), used, eidetic))
        threshold = decision.threshold

    node = SplitNode(attr, threshold, children)
    if eidetic:
        for inst in leaf.buffer:
            children[node.branch(inst.values)].replay(inst)
    for child in children:
        child.counter_at_last_eval = 0.0 if config.counter_mode == NODE_TIME else child.total_weight
    if wrap_child is not None:
        node.children = [wrap_child(child) for child in children]
    return node


def argmax_label(dist) -> int:
    best = 0
    best_mass = dist[0]
    for i in range(1, len(dist)):
        if dist[i] > best_mass:
            best_mass = dist[i]
            best = i
    return best


# --------------------------------------------------------------------------
# the classifier
# --------------------------------------------------------------------------

class HoeffdingTreeClassifier:
    """Single-pass decision tree: route, count, split when confident."""

    def __init__(self, schema: Schema, config: StrategyConfig | None = None):
        self.schema = schema
        self.config = config if config is not None else StrategyConfig()
        self.root = LearningLeaf(schema, eidetic=self.config.eidetic)
        self._use_node_time = self.config.counter_mode == NODE_TIME
        self._n_splits = 0

    def _sort_to_leaf(self, values):
        node = self.root
        parent = None
        slot = 0
        while node.__class__ is SplitNode:
            parent = node
            if node.threshold is None:
                slot = values[node.attr]
            else:
                slot = 0 if values[node.attr] <= node.threshold else 1
            node = node.children[slot]
        return node, parent, slot

    def train(self, instance: Instance) -> None:
        values = instance.values
        if len(values) != self.schema.n_attributes or not (
            0 <= instance.class_label < self.schema.class_count
        ):
            raise ValueError(
                f"instance does not match schema: {len(values)} values, "
                f"label {instance.class_label}"
            )
        leaf, parent, slot = self._sort_to_leaf(values)
        leaf.learn(values, instance.class_label, instance.weight)
        if leaf.buffer is not None:
            leaf.buffer.append(instance)
        counter = leaf.node_time if self._use_node_time else leaf.total_weight
        if counter - leaf.counter_at_last_eval < self.config.grace_period:
            return
        leaf.counter_at_last_eval = counter
        if leaf.is_pure():
            return
        decision = evaluate_split(leaf, self.config, self.schema.class_count)
        if decision.action == NO_SPLIT:
            return
        new_node = perform_split(leaf, decision, self.config)
        if new_node is not None:
            self._n_splits += 1
            if parent is None:
                self.root = new_node
            else:
                parent.children[slot] = new_node

    def predict(self, instance: Instance) -> list:
        leaf, _, _ = self._sort_to_leaf(instance.values)
        return list(leaf.class_dist)

    def predict_label(self, instance: Instance) -> int:
        leaf, _, _ = self._sort_to_leaf(instance.values)
        return argmax_label(leaf.class_dist)

    def check_instance(self, instance: Instance) -> None:
        check_instance(self.schema, instance)

    def dump(self) -> str:
        lines: list[str] = []
        _dump_node(self.root, 0, lines, [0])
        return "\n".join(lines) + "\n"

    def leaves(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.__class__ is SplitNode:
                stack.extend(node.children)
            else:
                out.append(node)
        return out


def _format_dist(dist) -> str:
    return "[" + ", ".join(f"{m:g}" for m in dist) + "]"


def _dump_node(node, depth: int, lines: list, counter: list) -> None:
    node_id = counter[0]
    counter[0] += 1
    indent = "  " * depth
    if node.__class__ is SplitNode:
        test = "nominal" if node.threshold is None else f"<= {node.threshold:.6g}"
        lines.append(f"{indent}[{node_id}] split attr={node.attr} test={test}")
        for child in node.children:
            _dump_node(child, depth + 1, lines, counter)
    else:
        used = ",".join(str(a) for a in sorted(node.used_attributes)) or "-"
        lines.append(
            f"{indent}[{node_id}] leaf dist={_format_dist(node.class_dist)} "
            f"node_time={node.node_time} weight_seen={node.total_weight:g} used={used}"
        )
