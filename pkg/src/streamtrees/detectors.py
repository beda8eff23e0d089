"""Adaptive-windowing change detection over a stream of values in [0, 1].

The detector interface used throughout the package is four methods:
``add_element``, ``estimate``, ``width`` and ``reset``. ``AdwinDetector`` is
the real implementation; ``NeverFireDetector`` is an inert stand-in so an
adaptive tree can be collapsed onto its non-adaptive base for differential
testing.
"""

from __future__ import annotations

import math


class AdwinDetector:
    """Adaptive window backed by an exponential histogram.

    Elements are kept in buckets whose capacities are powers of two, with at
    most ``max_buckets`` buckets per capacity class. On each insertion the
    window is repeatedly cut at the oldest bucket boundary where the two
    sub-window means differ by at least

        eps_cut = sqrt((1 / (2 m)) * ln(4 / delta'))

    with m = 1 / (1/n0 + 1/n1) (the harmonic-mean term of the sub-window
    sizes) and delta' = delta / (number of cut points tested). Cuts only ever
    drop a prefix of the window.

    ``check_interval`` > 1 runs the cut scan only every that many insertions;
    the histogram itself is maintained on every insertion.
    """

    __slots__ = (
        "delta",
        "max_buckets",
        "check_interval",
        "_rows",
        "total_count",
        "total_sum",
        "_n_buckets",
        "_ticks",
    )

    def __init__(self, delta: float = 0.002, max_buckets: int = 5, check_interval: int = 1):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {delta}")
        if max_buckets < 1 or check_interval < 1:
            raise ValueError("max_buckets and check_interval must be >= 1")
        self.delta = delta
        self.max_buckets = max_buckets
        self.check_interval = check_interval
        self.reset()

    def reset(self) -> None:
        # _rows[i] holds (sum, count) buckets of capacity 2**i, oldest first
        self._rows: list[list[list[float]]] = [[]]
        self.total_count = 0
        self.total_sum = 0.0
        self._n_buckets = 0
        self._ticks = 0

    @property
    def width(self) -> int:
        return self.total_count

    @property
    def n_buckets(self) -> int:
        return self._n_buckets

    def estimate(self) -> float:
        """Mean of the current (post-cut) window."""
        if self.total_count == 0:
            raise ValueError("empty detector has no estimate")
        return self.total_sum / self.total_count

    def add_element(self, x: float) -> bool:
        """Append x; return True when at least one cut dropped old data."""
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"element {x} outside [0, 1]")
        self._rows[0].append([x, 1.0])
        self._n_buckets += 1
        self.total_count += 1
        self.total_sum += x
        self._compress()
        self._ticks += 1
        if self._ticks % self.check_interval != 0:
            return False
        return self._cut()

    def _compress(self) -> None:
        rows = self._rows
        level = 0
        while level < len(rows):
            row = rows[level]
            if len(row) <= self.max_buckets:
                break
            a = row.pop(0)
            b = row.pop(0)
            if level + 1 == len(rows):
                rows.append([])
            rows[level + 1].append([a[0] + b[0], a[1] + b[1]])
            self._n_buckets -= 1
            level += 1

    def _cut(self) -> bool:
        cut_any = False
        while self.total_count >= 2 and self._n_buckets >= 2:
            # delta' spreads the confidence over the boundaries tested in this scan
            dprime = self.delta / max(self._n_buckets - 1, 1)
            log_term = math.log(4.0 / dprime)
            total = self.total_count
            total_sum = self.total_sum
            # scan boundaries oldest-first: head = prefix (older), tail = rest
            head_count = 0.0
            head_sum = 0.0
            cut_at = None  # (level, index within row) of last bucket in the prefix
            for level in range(len(self._rows) - 1, -1, -1):
                row = self._rows[level]
                for idx in range(len(row)):
                    bsum, bcount = row[idx]
                    head_count += bcount
                    head_sum += bsum
                    tail_count = total - head_count
                    if tail_count <= 0:
                        break
                    m = 1.0 / (1.0 / head_count + 1.0 / tail_count)
                    eps = math.sqrt(log_term / (2.0 * m))
                    diff = abs(head_sum / head_count - (total_sum - head_sum) / tail_count)
                    if diff >= eps:
                        cut_at = (level, idx)
                        break
                if cut_at is not None:
                    break
            if cut_at is None:
                return cut_any
            self._drop_through(cut_at)
            cut_any = True
        return cut_any

    def _drop_through(self, cut_at: tuple[int, int]) -> None:
        """Drop every bucket at least as old as cut_at (oldest qualifying prefix)."""
        level, idx = cut_at
        for lv in range(len(self._rows) - 1, level, -1):
            for bsum, bcount in self._rows[lv]:
                self.total_sum -= bsum
                self.total_count -= int(bcount)
                self._n_buckets -= 1
            self._rows[lv] = []
        row = self._rows[level]
        for bsum, bcount in row[: idx + 1]:
            self.total_sum -= bsum
            self.total_count -= int(bcount)
            self._n_buckets -= 1
        self._rows[level] = row[idx + 1 :]
        while len(self._rows) > 1 and not self._rows[-1]:
            self._rows.pop()
        if self.total_count == 0:
            self.total_sum = 0.0


class NeverFireDetector:
    """Detector stub that accepts every element and never signals change."""

    __slots__ = ()

    def add_element(self, x: float) -> bool:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"element {x} outside [0, 1]")
        return False

    def estimate(self) -> float:
        raise ValueError("empty detector has no estimate")

    @property
    def width(self) -> int:
        return 0

    def reset(self) -> None:
        pass
