"""Deterministic sensor load generation and the nested-group hierarchy."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .plog import PartitionedLog

MAX_SAFE_RATE = 2**53
FAN_OUT = 4
ROOT = "root"


class LoadKind(str, enum.Enum):
    SENSOR_COUNT = "sensor_count"
    NESTED_GROUPS = "nested_groups"
    WINDOW_DURATION_DAYS = "window_duration_days"


@dataclass(frozen=True)
class LoadSpec:
    kind: LoadKind
    magnitude: int
    base_sensors: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", LoadKind(self.kind))
        if self.magnitude < 1:
            raise ValueError(f"load magnitude must be >= 1, got {self.magnitude}")
        if self.base_sensors < 1:
            raise ValueError("base_sensors must be >= 1")


def messages_per_second(spec: LoadSpec) -> int:
    if spec.kind is LoadKind.SENSOR_COUNT:
        rate = spec.magnitude
    elif spec.kind is LoadKind.NESTED_GROUPS:
        rate = FAN_OUT**spec.magnitude
    else:
        rate = spec.base_sensors
    if rate > MAX_SAFE_RATE:
        raise OverflowError(f"{spec.kind.value}={spec.magnitude} exceeds 2^53 messages/second")
    return rate


@dataclass(frozen=True)
class SensorHierarchy:
    """Complete 4-ary tree of depth ``depth``; leaves are sensors.

    Node ids are dotted paths from the root: groups are ``g<i>`` segments and
    the last segment of a sensor is ``s<i>``, e.g. ``g0.g2.s3`` at depth 3.
    The root is ``"root"``.
    """

    depth: int
    fan_out: int = FAN_OUT

    @staticmethod
    def parent_of(node: str) -> str:
        head, sep, _ = node.rpartition(".")
        return head if sep else ROOT

    @staticmethod
    def level_of(node: str) -> int:
        return 0 if node == ROOT else node.count(".") + 1

    def nodes_at(self, level: int) -> Iterator[str]:
        """Node ids at ``level`` (0 = root, ``depth`` = sensors) in leaf order."""
        if level == 0:
            yield ROOT
            return
        for index in range(self.fan_out**level):
            digits = []
            for _ in range(level):
                index, d = divmod(index, self.fan_out)
                digits.append(d)
            digits.reverse()
            prefix = "s" if level == self.depth else "g"
            yield ".".join([f"g{d}" for d in digits[:-1]] + [f"{prefix}{digits[-1]}"])

    @cached_property
    def sensors(self) -> list[str]:
        return list(self.nodes_at(self.depth))

    @property
    def groups(self) -> list[str]:
        return [g for level in range(self.depth) for g in self.nodes_at(level)]

    @cached_property
    def parent(self) -> dict[str, str]:
        return {
            node: self.parent_of(node)
            for level in range(1, self.depth + 1)
            for node in self.nodes_at(level)
        }

    @property
    def leaf_count(self) -> int:
        return self.fan_out**self.depth

    @property
    def internal_count(self) -> int:
        return (self.fan_out**self.depth - 1) // (self.fan_out - 1)


def build_hierarchy(n: int) -> SensorHierarchy:
    if not 1 <= n <= 12:
        raise ValueError(f"hierarchy depth must be in [1, 12], got {n}")
    return SensorHierarchy(n)


def sensor_ids(spec: LoadSpec) -> list[str]:
    if spec.kind is LoadKind.NESTED_GROUPS:
        return build_hierarchy(spec.magnitude).sensors
    return [f"s-{i}" for i in range(messages_per_second(spec))]


def late_stride(p_late: float) -> int:
    """Every ``late_stride``-th generated record is made late; 0 disables lateness."""
    if not 0.0 <= p_late < 1.0:
        raise ValueError("p_late must be in [0, 1)")
    return math.ceil(1.0 / p_late) if p_late > 0 else 0


class LoadGenerator:
    """Emits one measurement per sensor per second of virtual time.

    Records are handed out round-robin over the sensor list; sensor ``i`` always
    writes to partition ``i mod P`` so the input topic is balanced across
    partitions (like a producer with a round-robin sensor partitioner).
    """

    def __init__(
        self,
        spec: LoadSpec,
        *,
        tick_ms: int = 100,
        p_late: float = 0.0,
        d_late_s: float = 90.0,
        epoch_ms: int = 0,
    ) -> None:
        if tick_ms <= 0 or 1000 % tick_ms:
            raise ValueError(f"tick length {tick_ms} ms must evenly divide 1 s")
        self.spec = spec
        self.rate = messages_per_second(spec)
        self.sensors = sensor_ids(spec)
        self.tick_ms = tick_ms
        self.stride = late_stride(p_late)
        self.d_late_ms = int(round(d_late_s * 1000))
        self.epoch_ms = epoch_ms

    def records_before(self, tick_index: int) -> int:
        """Total records generated by ticks ``0 .. tick_index-1``."""
        return tick_index * self.tick_ms * self.rate // 1000

    def generate_tick(self, tick_index: int, log: PartitionedLog, topic: str) -> int:
        start = self.records_before(tick_index)
        stop = self.records_before(tick_index + 1)
        now = self.epoch_ms + tick_index * self.tick_ms
        n_parts = log.topic(topic).partition_count
        sensors = self.sensors
        n_sensors = len(sensors)
        stride = self.stride
        late_ts = max(0, now - self.d_late_ms)
        rows = []
        for j in range(start, stop):
            idx = j % n_sensors
            ts = late_ts if stride and (j + 1) % stride == 0 else now
            rows.append((idx % n_parts, sensors[idx], ts, float((idx * 37 + j) % 1000) / 10.0))
        log.append_batch(topic, rows)
        return stop - start
