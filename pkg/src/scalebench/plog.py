"""In-process partitioned log with consumer groups and committed-offset lag."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class UnknownTopic(KeyError):
    pass


class UnknownGroup(KeyError):
    pass


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def partition_for_key(key: str, n: int) -> int:
    """Stable partition index for ``key``: FNV-1a 64 of the UTF-8 bytes, mod ``n``."""
    if n < 1:
        raise ValueError(f"partition count must be >= 1, got {n}")
    return fnv1a_64(key.encode("utf-8")) % n


@dataclass(slots=True, frozen=True)
class Record:
    key: str
    event_time: int
    value: Any
    ingest_seq: int = -1


class Topic:
    """Append-only partitions. ``log_seq`` holds the topic-wide append order of each record."""

    def __init__(self, name: str, partition_count: int) -> None:
        if partition_count < 1:
            raise ValueError("partition_count must be positive")
        self.name = name
        self.partition_count = partition_count
        self.partitions: list[list[Record]] = [[] for _ in range(partition_count)]
        self.log_seq: list[list[int]] = [[] for _ in range(partition_count)]
        self.appended = 0

    def __len__(self) -> int:
        return self.appended

    def __repr__(self) -> str:
        return f"Topic({self.name!r}, partitions={self.partition_count}, records={self.appended})"


@dataclass
class ConsumerGroupState:
    group_id: str
    topic: str
    committed_offsets: list[int]
    read_positions: list[int]


class PartitionedLog:
    """A set of topics plus the consumer groups reading them.

    All mutating calls take one lock, so appends are linearizable per partition
    and commits/lag queries see a consistent snapshot.
    """

    def __init__(self) -> None:
        self._topics: dict[str, Topic] = {}
        self._groups: dict[str, ConsumerGroupState] = {}
        self._lock = threading.RLock()

    # topics -------------------------------------------------------------

    def create_topic(self, name: str, partition_count: int = 100) -> Topic:
        with self._lock:
            if name in self._topics:
                raise ValueError(f"topic {name!r} already exists")
            topic = Topic(name, partition_count)
            self._topics[name] = topic
            return topic

    def topic(self, name: str) -> Topic:
        try:
            return self._topics[name]
        except KeyError:
            raise UnknownTopic(name) from None

    @property
    def topics(self) -> list[str]:
        return list(self._topics)

    def delete_all(self) -> None:
        with self._lock:
            self._topics.clear()
            self._groups.clear()

    def append(self, topic: str, record: Record, partition: int | None = None) -> int:
        """Append ``record`` and return its per-partition ``ingest_seq``.

        Without an explicit ``partition`` the record is routed by key hash.
        """
        t = self.topic(topic)
        if partition is None:
            partition = partition_for_key(record.key, t.partition_count)
        elif not 0 <= partition < t.partition_count:
            raise ValueError(f"partition {partition} out of range for {topic!r}")
        with self._lock:
            part = t.partitions[partition]
            seq = len(part)
            part.append(Record(record.key, record.event_time, record.value, seq))
            t.log_seq[partition].append(t.appended)
            t.appended += 1
        return seq

    def append_batch(self, topic: str, rows: list[tuple[int, str, int, Any]]) -> None:
        """Append ``(partition, key, event_time, value)`` rows in order under one lock."""
        t = self.topic(topic)
        parts, seqs = t.partitions, t.log_seq
        with self._lock:
            n = t.appended
            for partition, key, ts, value in rows:
                part = parts[partition]
                part.append(Record(key, ts, value, len(part)))
                seqs[partition].append(n)
                n += 1
            t.appended = n

    # consumer groups ----------------------------------------------------

    def register_group(self, group_id: str, topic: str) -> ConsumerGroupState:
        t = self.topic(topic)
        with self._lock:
            if group_id in self._groups:
                raise ValueError(f"group {group_id!r} already registered")
            state = ConsumerGroupState(
                group_id, topic, [0] * t.partition_count, [0] * t.partition_count
            )
            self._groups[group_id] = state
            return state

    def group(self, group_id: str) -> ConsumerGroupState:
        try:
            return self._groups[group_id]
        except KeyError:
            raise UnknownGroup(group_id) from None

    def poll(self, group_id: str, partition: int) -> Record | None:
        """Read the next record of ``partition`` for the group, advancing its read position."""
        g = self.group(group_id)
        part = self._topics[g.topic].partitions[partition]
        with self._lock:
            pos = g.read_positions[partition]
            if pos >= len(part):
                return None
            g.read_positions[partition] = pos + 1
            return part[pos]

    def pending(self, group_id: str, partition: int) -> int:
        g = self.group(group_id)
        return len(self._topics[g.topic].partitions[partition]) - g.read_positions[partition]

    def next_log_seq(self, group_id: str, partition: int) -> int | None:
        g = self.group(group_id)
        t = self._topics[g.topic]
        pos = g.read_positions[partition]
        seqs = t.log_seq[partition]
        return seqs[pos] if pos < len(seqs) else None

    def commit_offsets(self, group_id: str) -> None:
        """Commit the group's current read positions."""
        g = self.group(group_id)
        with self._lock:
            g.committed_offsets = list(g.read_positions)

    def committed_count(self, group_id: str) -> int:
        return sum(self.group(group_id).committed_offsets)

    def total_lag(self, topic: str, group_id: str) -> int:
        t = self.topic(topic)
        g = self.group(group_id)
        if g.topic != topic:
            raise UnknownGroup(f"{group_id} is not registered on {topic}")
        with self._lock:
            return sum(len(p) - c for p, c in zip(t.partitions, g.committed_offsets))
