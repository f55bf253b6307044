"""Capacity-throttled execution of a use case over the partitioned log.

Each instance owns a contiguous range of partitions on every topic of the use
case (co-partitioned tasks) and one work-unit budget per tick that all of its
stage tasks draw from. Stages run downstream-first within a tick, and each
task consumes its partitions in topic-wide append order.
"""

from __future__ import annotations

import heapq
import math
import threading
from concurrent.futures import Executor
from fractions import Fraction
from typing import Iterable

from ..plog import PartitionedLog, Record
from .dataflow import Stage, UseCase
from .profiles import ResourceConfig, SutProfile, exact
from .windows import KeyedWindowState, WindowResult


def assign_partitions(partition_count: int, instances: int) -> dict[int, list[int]]:
    """Balanced contiguous ranges; earlier instances take the remainder."""
    if instances < 1:
        raise ValueError("instances must be >= 1")
    base, extra = divmod(partition_count, instances)
    out: dict[int, list[int]] = {}
    start = 0
    for i in range(instances):
        size = base + (1 if i < extra else 0)
        out[i] = list(range(start, start + size))
        start += size
    return out


def repartition(log: PartitionedLog, topic: str, results: Iterable[WindowResult], key_fn) -> int:
    """Re-append window results to ``topic`` keyed by ``key_fn(result.key)``."""
    n = 0
    for r in results:
        log.append(topic, Record(key_fn(r.key), r.window_start, r.aggregate))
        n += 1
    return n


class _SharedSink:
    def __init__(self, capacity_per_tick: Fraction) -> None:
        self.per_tick = capacity_per_tick
        self.tokens = Fraction(0)
        self.lock = threading.Lock()

    def refill(self) -> None:
        # carry at most one record's worth so an idle sink cannot bank a burst
        self.tokens = min(self.tokens, Fraction(1)) + self.per_tick

    def take(self) -> bool:
        with self.lock:
            if self.tokens >= 1:
                self.tokens -= 1
                return True
            return False


class StageTask:
    """One stage on one instance: its partitions, keyed window state and cursor."""

    def __init__(self, deployment: Deployment, stage: Stage, partitions: list[int], cost_units: int) -> None:
        self.deployment = deployment
        self.stage = stage
        self.partitions = partitions
        self.cost_units = cost_units
        self.group_id = deployment.use_case.group_id(stage)
        log = deployment.log
        topic = log.topic(stage.input_topic)
        self._records = topic.partitions
        self._seqs = topic.log_seq
        self._positions = log.group(self.group_id).read_positions
        self._heap: list[tuple[int, int]] = []
        self._queued: set[int] = set()
        self.state = KeyedWindowState(stage.window) if stage.window is not None else None
        self.processed = 0
        self.sunk = 0

    @property
    def dropped(self) -> int:
        return self.state.dropped if self.state is not None else 0

    def refresh(self) -> None:
        for p in self.partitions:
            if p not in self._queued:
                pos = self._positions[p]
                seqs = self._seqs[p]
                if pos < len(seqs):
                    heapq.heappush(self._heap, (seqs[pos], p))
                    self._queued.add(p)

    def has_pending(self) -> bool:
        pos = self._positions
        seqs = self._seqs
        return any(pos[p] < len(seqs[p]) for p in self.partitions)

    def next_record(self) -> Record | None:
        if not self._heap:
            return None
        _, p = heapq.heappop(self._heap)
        pos = self._positions[p]
        rec = self._records[p][pos]
        pos += 1
        self._positions[p] = pos
        seqs = self._seqs[p]
        if pos < len(seqs):
            heapq.heappush(self._heap, (seqs[pos], p))
        else:
            self._queued.discard(p)
        return rec

    def process(self, rec: Record) -> None:
        self.processed += 1
        if self.state is None:
            self.sunk += 1
            return
        stage = self.stage
        key = stage.state_key(rec) if stage.state_key is not None else rec.key
        results = self.state.add(key, rec.event_time, rec.value, self.deployment.disorder_ms)
        if results:
            self.deployment._route(stage, results)

    def flush(self) -> None:
        if self.state is not None:
            results = self.state.close_all()
            if results:
                self.deployment._route(self.stage, results)

    def emit_early(self) -> None:
        if self.state is not None and self.stage.window.early_emit_interval is not None:
            results = self.state.early_results()
            if results:
                self.deployment._publish_early(results)


class Instance:
    def __init__(self, index: int, partitions: list[int], tasks: list[StageTask],
                 budget_per_tick: int, carry_cap: int) -> None:
        self.index = index
        self.partitions = partitions
        self.tasks = tasks
        self.budget_per_tick = budget_per_tick
        self.carry_cap = carry_cap
        self.carry = 0

    def run_tick(self, sink: _SharedSink | None) -> int:
        budget = self.carry + self.budget_per_tick
        done = 0
        for task in reversed(self.tasks):
            cost = task.cost_units
            task.refresh()
            gated = sink is not None and task.state is None
            while budget >= cost and task._heap:
                if gated and not sink.take():
                    break
                rec = task.next_record()
                budget -= cost
                task.process(rec)
                done += 1
        if any(t.has_pending() for t in self.tasks):
            self.carry = min(budget, self.carry_cap)
        else:
            self.carry = 0
        return done


class Deployment:
    """A running use case: fresh topics, consumer groups and state on ``log``."""

    def __init__(
        self,
        use_case: UseCase,
        profile: SutProfile,
        resources: ResourceConfig,
        *,
        log: PartitionedLog | None = None,
        partitions: int = 100,
        tick_ms: int = 100,
        disorder_ms: int = 0,
    ) -> None:
        if tick_ms <= 0 or 1000 % tick_ms:
            raise ValueError(f"tick length {tick_ms} ms must evenly divide 1 s")
        commit_ms = exact(profile.commit_interval) * 1000
        if commit_ms.denominator != 1 or commit_ms % tick_ms:
            raise ValueError(f"tick length {tick_ms} ms must evenly divide the commit interval")
        self.use_case = use_case
        self.profile = profile
        self.resources = resources
        self.log = log if log is not None else PartitionedLog()
        self.partition_count = partitions
        self.tick_ms = tick_ms
        self.commit_ms = int(commit_ms)
        self.disorder_ms = disorder_ms
        self.final_results: list[WindowResult] = []
        self.early_emitted = 0
        self._out_lock = threading.Lock()

        for name in use_case.topics:
            self.log.create_topic(name, partitions)
        for stage in use_case.stages:
            self.log.register_group(use_case.group_id(stage), stage.input_topic)

        tick_s = Fraction(tick_ms, 1000)
        costs = [self._stage_cost(s) for s in use_case.stages]
        capacity = profile.instance_capacity(resources.cores) * tick_s
        scale = math.lcm(capacity.denominator, *(c.denominator for c in costs))
        cost_units = [int(c * scale) for c in costs]
        budget = int(capacity * scale)

        sink = use_case.sink
        self._sink = (
            _SharedSink(exact(sink.capacity) * tick_s) if sink is not None and sink.shared else None
        )
        self.assignment = assign_partitions(partitions, resources.instances)
        self.instances = [
            Instance(
                i,
                parts,
                [StageTask(self, s, parts, c) for s, c in zip(use_case.stages, cost_units)],
                budget,
                max(cost_units),
            )
            for i, parts in self.assignment.items()
        ]

    def _stage_cost(self, stage: Stage) -> Fraction:
        uc = self.use_case
        cost = exact(self.profile.cost(uc.id, stage.intermediate)) * stage.cost_factor
        if stage.window is None and uc.sink is not None:
            cost += exact(uc.sink.cost)
        return cost

    # routing --------------------------------------------------------------

    def _route(self, stage: Stage, results: list[WindowResult]) -> None:
        if stage.publish:
            with self._out_lock:
                self.final_results.extend(results)
            for r in results:
                self.log.append(self.use_case.output_topic, Record(r.key, r.window_start, r.aggregate))
        if stage.emit_to is not None:
            repartition(self.log, stage.emit_to, results, stage.emit_key)

    def _publish_early(self, results: list[WindowResult]) -> None:
        with self._out_lock:
            self.early_emitted += len(results)
        for r in results:
            self.log.append(self.use_case.output_topic, Record(r.key, r.window_start, r.aggregate))

    # execution ------------------------------------------------------------

    def run_tick(self, tick: int, executor: Executor | None = None) -> int:
        """Advance one tick: consume within budget, then commit/early-emit on interval boundaries."""
        if self._sink is not None:
            self._sink.refill()
        if executor is None:
            done = sum(inst.run_tick(self._sink) for inst in self.instances)
        else:
            done = sum(executor.map(lambda inst: inst.run_tick(self._sink), self.instances))
        end_ms = (tick + 1) * self.tick_ms
        if end_ms % self.commit_ms == 0:
            self.commit()
        for inst in self.instances:
            for task in inst.tasks:
                interval = task.stage.window.early_emit_interval if task.state is not None else None
                if interval is not None and end_ms % round(interval * 1000) == 0:
                    task.emit_early()
        return done

    def commit(self) -> None:
        for stage in self.use_case.stages:
            self.log.commit_offsets(self.use_case.group_id(stage))

    def drain(self) -> int:
        """Process everything queued regardless of capacity, then close every window.

        Stages are drained in topological order so each level sees all of its
        upstream results before closing. Within a stage, records are taken
        across instances in topic-wide append order, so no instance runs ahead
        in event time and makes another instance's results look late
        downstream. Used to collect final outputs of finite inputs.
        """
        done = 0
        for pos in range(len(self.use_case.stages)):
            tasks = [inst.tasks[pos] for inst in self.instances]
            heads: list[tuple[int, int]] = []
            for i, task in enumerate(tasks):
                task.refresh()
                if task._heap:
                    heads.append((task._heap[0][0], i))
            heapq.heapify(heads)
            while heads:
                _, i = heapq.heappop(heads)
                task = tasks[i]
                task.process(task.next_record())
                done += 1
                if task._heap:
                    heapq.heappush(heads, (task._heap[0][0], i))
            for task in tasks:
                task.flush()
        self.commit()
        return done

    # metrics --------------------------------------------------------------

    def total_lag(self) -> int:
        uc = self.use_case
        return sum(self.log.total_lag(s.input_topic, uc.group_id(s)) for s in uc.stages)

    @property
    def dropped(self) -> int:
        return sum(t.dropped for inst in self.instances for t in inst.tasks)

    @property
    def sink_count(self) -> int:
        return sum(t.sunk for inst in self.instances for t in inst.tasks)

    @property
    def processed(self) -> int:
        return sum(t.processed for inst in self.instances for t in inst.tasks)

    def teardown(self) -> None:
        self.log.delete_all()
