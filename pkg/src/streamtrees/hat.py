"""Adaptive tree: a Hoeffding tree with a change detector at every node.

A node whose detector fires starts a fresh alternate subtree that trains in
parallel on the same instances. The alternate replaces the mainline once its
windowed error is lower with non-overlapping confidence bounds (checked every
``replacement_check_interval`` instances), and is discarded if it proves
significantly worse. Every contested behavior is a flag on
:class:`HatConfig`:

- ``voting_mode``: whether unpromoted alternates contribute to predictions
  (none / the shallowest one on the path / all of them / all except alternates
  that are still single leaves).
- ``poisson_weighting``: draw each leaf update's weight from Poisson(1).
- ``eval_timer``: drive split evaluations off instance counts or accumulated
  weight (overrides the base config's counter mode).
- ``replace_root_on_alternate_split`` / ``replace_subtree_on_alternate_split``:
  promote an alternate the moment it performs its own first split, skipping
  the error comparison, at the root / below the root respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .detectors import AdwinDetector, NeverFireDetector
from .schema import Instance, Schema
from .tree import (
    NO_SPLIT,
    WEIGHT_SEEN,
    LearningLeaf,
    SplitNode,
    StrategyConfig,
    argmax_label,
    evaluate_split,
    perform_split,
)

VOTE_NONE = "none"
VOTE_SINGLE = "single_alternate"
VOTE_MULTI = "multiple_alternates"
VOTE_MULTI_NO_SINGLE_LEAVES = "multiple_excluding_single_leaves"

_VOTE_MODES = (VOTE_NONE, VOTE_SINGLE, VOTE_MULTI, VOTE_MULTI_NO_SINGLE_LEAVES)


@dataclass(frozen=True)
class HatConfig:
    base: StrategyConfig = StrategyConfig()
    voting_mode: str = VOTE_NONE
    poisson_weighting: bool = False
    eval_timer: str = WEIGHT_SEEN
    replace_root_on_alternate_split: bool = False
    replace_subtree_on_alternate_split: bool = False
    replacement_check_interval: int = 300
    replacement_delta: float = 0.05
    alternate_depth_cap: int = 10
    detector: str = "adwin"
    detector_delta: float = 0.002
    detector_check_interval: int = 32

    def __post_init__(self) -> None:
        if self.voting_mode not in _VOTE_MODES:
            raise ValueError(f"bad voting_mode {self.voting_mode!r}")
        if self.detector not in ("adwin", "neverfire"):
            raise ValueError(f"bad detector {self.detector!r}")
        if self.replacement_check_interval < 1:
            raise ValueError("replacement_check_interval must be >= 1")
        if not 0.0 < self.replacement_delta < 1.0:
            raise ValueError("replacement_delta must be in (0, 1)")

    def effective_base(self) -> StrategyConfig:
        return replace(self.base, counter_mode=self.eval_timer)


class _HatNode:
    """Mainline payload plus the drift detector and an optional alternate.

    The detector doubles as the node's windowed error estimator; an alternate
    subtree's root detector plays the same role for the replacement test.
    """

    __slots__ = ("mainline", "alternate", "detector", "nesting", "alt_instances")

    def __init__(self, mainline, detector, nesting: int):
        self.mainline = mainline
        self.alternate: _HatNode | None = None
        self.detector = detector
        self.nesting = nesting
        self.alt_instances = 0


class HoeffdingAdaptiveTreeClassifier:
    """Hoeffding tree wrapped with per-node drift detection and alternates."""

    def __init__(self, schema: Schema, config: HatConfig | None = None, seed: int = 0):
        self.schema = schema
        self.config = config if config is not None else HatConfig()
        self._base = self.config.effective_base()
        self._use_node_time = self._base.counter_mode != WEIGHT_SEEN
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._poisson_buf: list[float] = []
        self._root = self._new_node(0)
        self._nest_in_alternates = self.config.voting_mode in (
            VOTE_MULTI,
            VOTE_MULTI_NO_SINGLE_LEAVES,
        )
        self._n_promotions = 0
        self._n_sprouts = 0

    # -- construction helpers ------------------------------------------------

    def _new_detector(self):
        if self.config.detector == "neverfire":
            return NeverFireDetector()
        return AdwinDetector(
            delta=self.config.detector_delta,
            check_interval=self.config.detector_check_interval,
        )

    def _new_node(self, nesting: int) -> _HatNode:
        leaf = LearningLeaf(self.schema, eidetic=self._base.eidetic)
        return _HatNode(leaf, self._new_detector(), nesting)

    def _poisson_weight(self) -> float:
        if not self._poisson_buf:
            self._poisson_buf = self._rng.poisson(1.0, 1024).astype(float).tolist()
        return self._poisson_buf.pop()

    # -- training --------------------------------------------------------------

    def train(self, instance: Instance) -> None:
        if len(instance.values) != self.schema.n_attributes or not (
            0 <= instance.class_label < self.schema.class_count
        ):
            raise ValueError(
                f"instance does not match schema: {len(instance.values)} values, "
                f"label {instance.class_label}"
            )
        self._train_subtree(self._root, instance, instance.class_label, True)

    def _route(self, hnode: _HatNode, values):
        """Mainline path of _HatNodes from hnode down to its leaf."""
        path = [hnode]
        node = hnode
        while True:
            m = node.mainline
            if m.__class__ is not SplitNode:
                return path
            node = m.children[m.branch(values)]
            path.append(node)

    def _train_subtree(self, hnode: _HatNode, instance: Instance, y: int, at_root: bool) -> None:
        values = instance.values
        path = self._route(hnode, values)
        leaf_node = path[-1]
        bit = 1.0 if argmax_label(leaf_node.mainline.class_dist) != y else 0.0
        cfg = self.config
        for nd in path:
            fired = nd.detector.add_element(bit)
            if fired and self._may_sprout(nd):
                if nd.alternate is None:
                    nd.alternate = self._new_node(nd.nesting + 1)
                    nd.alt_instances = 0
                    self._n_sprouts += 1
                else:
                    # the change invalidates an alternate that is not already
                    # tracking better than the mainline; restart it
                    alt = nd.alternate
                    wa, wm = alt.detector.width, nd.detector.width
                    if wa > 0 and wm > 0 and alt.detector.estimate() >= nd.detector.estimate():
                        nd.alternate = self._new_node(nd.nesting + 1)
                        nd.alt_instances = 0
                        self._n_sprouts += 1
            alt = nd.alternate
            if alt is None:
                continue
            alt_was_leaf = alt.mainline.__class__ is not SplitNode
            self._train_subtree(alt, instance, y, False)
            nd.alt_instances += 1
            node_is_root = at_root and nd is path[0] and nd is self._root
            promoted = False
            if alt_was_leaf and alt.mainline.__class__ is SplitNode:
                if (node_is_root and cfg.replace_root_on_alternate_split) or (
                    not node_is_root and cfg.replace_subtree_on_alternate_split
                ):
                    self._promote(nd)
                    promoted = True
            if not promoted and nd.alt_instances % cfg.replacement_check_interval == 0:
                promoted = self.maybe_replace(nd)
            if promoted:
                # everything deeper on the old path is discarded, and the
                # promoted subtree already trained on this instance
                return
        self._learn_at_leaf(leaf_node, instance, y)

    def _may_sprout(self, nd: _HatNode) -> bool:
        if nd.nesting == 0:
            return True
        return self._nest_in_alternates and nd.nesting < self.config.alternate_depth_cap

    def _learn_at_leaf(self, leaf_node: _HatNode, instance: Instance, y: int) -> None:
        leaf: LearningLeaf = leaf_node.mainline
        weight = instance.weight
        if self.config.poisson_weighting:
            weight *= self._poisson_weight()
        leaf.learn(instance.values, y, weight)
        if leaf.buffer is not None:
            leaf.buffer.append(Instance(instance.values, y, weight))
        counter = leaf.node_time if self._use_node_time else leaf.total_weight
        if counter - leaf.counter_at_last_eval < self._base.grace_period:
            return
        leaf.counter_at_last_eval = counter
        if leaf.is_pure():
            return
        decision = evaluate_split(leaf, self._base, self.schema.class_count)
        if decision.action == NO_SPLIT:
            return
        nesting = leaf_node.nesting
        new_node = perform_split(
            leaf,
            decision,
            self._base,
            wrap_child=lambda child: _HatNode(child, self._new_detector(), nesting),
        )
        if new_node is not None:
            leaf_node.mainline = new_node

    # -- replacement -----------------------------------------------------------

    def maybe_replace(self, nd: _HatNode) -> bool:
        """Promote the alternate when its error is lower beyond both bounds.

        A significantly worse alternate is discarded instead, freeing the
        slot for a future detection.
        """
        alt = nd.alternate
        if alt is None:
            return False
        wm, wa = nd.detector.width, alt.detector.width
        if wm <= 0 or wa <= 0:
            return False
        em, ea = nd.detector.estimate(), alt.detector.estimate()
        log_term = math.log(1.0 / self.config.replacement_delta)
        bm = math.sqrt(log_term / (2.0 * wm))
        ba = math.sqrt(log_term / (2.0 * wa))
        if ea + ba < em - bm:
            self._promote(nd)
            return True
        if em + bm < ea - ba:
            nd.alternate = None
            nd.alt_instances = 0
        return False

    def _promote(self, nd: _HatNode) -> None:
        """Install the alternate in place of the mainline subtree."""
        alt = nd.alternate
        nd.mainline = alt.mainline
        nd.alternate = alt.alternate
        nd.detector = self._new_detector()
        nd.alt_instances = alt.alt_instances
        self._renumber(nd.mainline, nd.alternate, -1)
        self._n_promotions += 1

    def _renumber(self, mainline, alternate, delta: int) -> None:
        stack = []
        if mainline.__class__ is SplitNode:
            stack.extend(mainline.children)
        if alternate is not None:
            stack.append(alternate)
        while stack:
            node = stack.pop()
            node.nesting += delta
            if node.mainline.__class__ is SplitNode:
                stack.extend(node.mainline.children)
            if node.alternate is not None:
                stack.append(node.alternate)

    # -- prediction ------------------------------------------------------------

    def _leaf_dist(self, hnode: _HatNode, values):
        node = hnode
        while True:
            m = node.mainline
            if m.__class__ is not SplitNode:
                return m.class_dist
            node = m.children[m.branch(values)]

    def _collect_alternate_votes(self, hnode: _HatNode, values, out: list) -> None:
        node = hnode
        exclude_single = self.config.voting_mode == VOTE_MULTI_NO_SINGLE_LEAVES
        while True:
            alt = node.alternate
            if alt is not None:
                if not (exclude_single and alt.mainline.__class__ is not SplitNode):
                    out.append(self._leaf_dist(alt, values))
                self._collect_alternate_votes(alt, values, out)
            m = node.mainline
            if m.__class__ is not SplitNode:
                return
            node = m.children[m.branch(values)]

    def vote(self, instance: Instance) -> list:
        """Class distribution, with alternates contributing per voting_mode."""
        values = instance.values
        mode = self.config.voting_mode
        if mode == VOTE_NONE:
            return list(self._leaf_dist(self._root, values))
        contributions: list = []
        if mode == VOTE_SINGLE:
            node = self._root
            while True:
                if node.alternate is not None:
                    contributions.append(self._leaf_dist(node.alternate, values))
                    break
                m = node.mainline
                if m.__class__ is not SplitNode:
                    break
                node = m.children[m.branch(values)]
        else:
            self._collect_alternate_votes(self._root, values, contributions)
        mainline = self._leaf_dist(self._root, values)
        if not contributions:
            return list(mainline)
        combined = [0.0] * self.schema.class_count
        for dist in [mainline] + contributions:
            total = sum(dist)
            if total > 0.0:
                for i, m in enumerate(dist):
                    combined[i] += m / total
        return combined

    predict = vote

    def predict_label(self, instance: Instance) -> int:
        return argmax_label(self.vote(instance))

    # -- introspection -----------------------------------------------------------

    def n_alternates(self) -> int:
        count = 0
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.alternate is not None:
                count += 1
                stack.append(node.alternate)
            if node.mainline.__class__ is SplitNode:
                stack.extend(node.mainline.children)
        return count

    def dump(self, include_detectors: bool = True) -> str:
        lines: list[str] = []
        self._dump_node(self._root, 0, lines, [0], include_detectors, "")
        return "\n".join(lines) + "\n"

    def _dump_node(self, hnode: _HatNode, depth: int, lines, counter, include_detectors, marker):
        node_id = counter[0]
        counter[0] += 1
        indent = "  " * depth
        det = ""
        if include_detectors:
            width = hnode.detector.width
            est = f"{hnode.detector.estimate():.4f}" if width > 0 else "-"
            det = f" det_width={width} det_est={est}"
        m = hnode.mainline
        if m.__class__ is SplitNode:
            test = "nominal" if m.threshold is None else f"<= {m.threshold:.6g}"
            lines.append(f"{indent}[{node_id}]{marker} split attr={m.attr} test={test}{det}")
            for child in m.children:
                self._dump_node(child, depth + 1, lines, counter, include_detectors, "")
        else:
            dist = "[" + ", ".join(f"{v:g}" for v in m.class_dist) + "]"
            lines.append(
                f"{indent}[{node_id}]{marker} leaf dist={dist} node_time={m.node_time} "
                f"weight_seen={m.total_weight:g}{det}"
            )
        if hnode.alternate is not None:
            self._dump_node(hnode.alternate, depth + 1, lines, counter, include_detectors, " ALT-root")
