"""Event-time windows, aggregates and keyed window state."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Iterator

SECOND_MS = 1000
DAY_MS = 86_400_000


class WindowKind(str, enum.Enum):
    TUMBLING = "tumbling"
    HOPPING = "hopping"


@dataclass(frozen=True)
class WindowSpec:
    """Window geometry in seconds. Internally everything runs on integer milliseconds."""

    kind: WindowKind
    size: float
    slide: float | None = None
    grace: float = 0.0
    early_emit_interval: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", WindowKind(self.kind))
        if self.size <= 0:
            raise ValueError("window size must be positive")
        if self.grace < 0:
            raise ValueError("grace must be non-negative")
        if self.kind is WindowKind.TUMBLING:
            if self.slide not in (None, self.size):
                raise ValueError("tumbling windows have slide == size")
            object.__setattr__(self, "slide", self.size)
        else:
            if self.slide is None or not 0 < self.slide < self.size:
                raise ValueError("hopping windows need 0 < slide < size")
            if self.size_ms % self.slide_ms:
                raise ValueError("hopping window size must be a multiple of slide")

    @classmethod
    def tumbling(cls, size: float, grace: float = 0.0,
                 early_emit_interval: float | None = None) -> WindowSpec:
        return cls(WindowKind.TUMBLING, size, grace=grace, early_emit_interval=early_emit_interval)

    @classmethod
    def hopping(
        cls, size: float, slide: float, grace: float = 0.0, early_emit_interval: float | None = None
    ) -> WindowSpec:
        return cls(WindowKind.HOPPING, size, slide, grace, early_emit_interval)

    @property
    def size_ms(self) -> int:
        return round(self.size * SECOND_MS)

    @property
    def slide_ms(self) -> int:
        return round(self.slide * SECOND_MS)

    @property
    def grace_ms(self) -> int:
        return round(self.grace * SECOND_MS)

    @property
    def windows_per_record(self) -> int:
        return self.size_ms // self.slide_ms


def windows_for(ts_ms: int, w: WindowSpec) -> list[int]:
    """Start times (ms, ascending, >= 0) of every window containing ``ts_ms``."""
    if ts_ms < 0:
        raise ValueError("event time must be non-negative")
    size, slide = w.size_ms, w.slide_ms
    last = ts_ms - ts_ms % slide
    first = max(0, last - size + slide)
    return list(range(first, last + 1, slide))


class Aggregate:
    """Running sum/count/min/max. Mergeable, so partial aggregates compose."""

    __slots__ = ("sum", "count", "min", "max")

    def __init__(self, sum: float = 0.0, count: int = 0, min: float = float("inf"),
                 max: float = float("-inf")) -> None:
        self.sum = sum
        self.count = count
        self.min = min
        self.max = max

    @classmethod
    def of(cls, value: float) -> Aggregate:
        return cls(value, 1, value, value)

    def add(self, value: float) -> None:
        self.sum += value
        self.count += 1
        if value < self.min:
            self.min = value
        if value > self.max:
            self.max = value

    def merge(self, other: Aggregate) -> None:
        self.sum += other.sum
        self.count += other.count
        if other.min < self.min:
            self.min = other.min
        if other.max > self.max:
            self.max = other.max

    def absorb(self, value: float | Aggregate) -> None:
        if type(value) is Aggregate:
            self.merge(value)
            return
        self.sum += value
        self.count += 1
        if value < self.min:
            self.min = value
        if value > self.max:
            self.max = value

    @property
    def mean(self) -> float:
        return self.sum / self.count if self.count else float("nan")

    def copy(self) -> Aggregate:
        return Aggregate(self.sum, self.count, self.min, self.max)

    def as_tuple(self) -> tuple[float, int, float, float]:
        return (self.sum, self.count, self.min, self.max)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Aggregate):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __repr__(self) -> str:
        return f"Aggregate(sum={self.sum!r}, count={self.count}, min={self.min!r}, max={self.max!r})"


@dataclass(frozen=True)
class WindowResult:
    key: str
    window_start: int
    window_end: int
    aggregate: Aggregate
    final: bool = True


class KeyedWindowState:
    """Per (window_start, key) aggregates with watermark-driven closing.

    A window [s, s+size) is closed once the watermark reaches s + size + grace;
    closed cells are emitted and evicted. A record whose windows are all
    closed is late and gets dropped.
    """

    def __init__(self, window: WindowSpec) -> None:
        self.window = window
        self._size = window.size_ms
        self._slide = window.slide_ms
        self._span = window.size_ms + window.grace_ms
        self._early = window.early_emit_interval is not None
        self.cells: dict[int, dict[str, Aggregate]] = {}
        self._starts: list[int] = []
        self._dirty: dict[tuple[int, str], None] = {}
        self.watermark = -1
        self.dropped = 0

    def __len__(self) -> int:
        return sum(len(c) for c in self.cells.values())

    def _closes_at(self, start: int) -> int:
        return start + self._span

    def add(self, key: str, ts_ms: int, value: float | Aggregate, disorder_ms: int = 0) -> list[WindowResult]:
        """Fold one record in; returns any window results finalized by the watermark advance."""
        wm = self.watermark
        span = self._span
        slide = self._slide
        last = ts_ms - ts_ms % slide
        first = last - self._size + slide
        if first < 0:
            first = 0
        updated = 0
        for start in range(first, last + 1, slide):
            if start + span <= wm:
                continue
            bucket = self.cells.get(start)
            if bucket is None:
                bucket = self.cells[start] = {}
                heapq.heappush(self._starts, start)
            agg = bucket.get(key)
            if agg is None:
                agg = bucket[key] = Aggregate()
            agg.absorb(value)
            if self._early:
                self._dirty[(start, key)] = None
            updated += 1
        if not updated:
            self.dropped += 1
            return []
        candidate = ts_ms - disorder_ms
        if candidate > wm:
            self.watermark = candidate
            return self.close_until(candidate)
        return []

    def close_until(self, watermark: int) -> list[WindowResult]:
        out: list[WindowResult] = []
        size = self._size
        while self._starts and self._starts[0] + self._span <= watermark:
            start = heapq.heappop(self._starts)
            for key, agg in self.cells.pop(start).items():
                out.append(WindowResult(key, start, start + size, agg))
                self._dirty.pop((start, key), None)
        return out

    def close_all(self) -> list[WindowResult]:
        if not self._starts:
            return []
        return self.close_until(self._closes_at(max(self._starts)))

    def early_results(self) -> list[WindowResult]:
        """Snapshot every cell touched since the previous call (provisional results)."""
        size = self.window.size_ms
        out = [
            WindowResult(key, start, start + size, self.cells[start][key].copy(), final=False)
            for start, key in self._dirty
        ]
        self._dirty.clear()
        return out

    def iter_cells(self) -> Iterator[tuple[int, str, Aggregate]]:
        for start in sorted(self.cells):
            for key, agg in self.cells[start].items():
                yield start, key, agg
