"""Shared helpers for driving deployments over fixed record sets."""

from __future__ import annotations

from scalebench.engine import Deployment, ResourceConfig, SutProfile
from scalebench.plog import Record, partition_for_key

UNIT = SutProfile("unit", {"UC1": 1, "UC2": 1, "UC3": 1, "UC4": 1}, capacity_per_core=1000)


def profile(cost: float = 1, capacity: float = 1000, **kw) -> SutProfile:
    return SutProfile("t", {uc: cost for uc in ("UC1", "UC2", "UC3", "UC4")},
                      capacity_per_core=capacity, **kw)


def feed(deployment: Deployment, rows, topic: str = "input") -> None:
    n = deployment.partition_count
    for key, ts, value in rows:
        deployment.log.append(topic, Record(key, ts, value), partition=partition_for_key(key, n))


def run_to_completion(use_case, rows, instances: int, *, partitions: int = 16, ticks: int = 0,
                      prof: SutProfile = UNIT) -> Deployment:
    """Feed ``rows``, run ``ticks`` capacity-limited ticks, then drain everything."""
    dep = Deployment(use_case, prof, ResourceConfig(instances=instances), partitions=partitions)
    feed(dep, rows)
    for t in range(ticks):
        dep.run_tick(t)
    dep.drain()
    return dep


def final_outputs(dep: Deployment) -> list[tuple]:
    return sorted((r.key, r.window_start, r.aggregate.as_tuple()) for r in dep.final_results)


def ticked_rows(sensors: list[str], seconds: int, *, epoch_ms: int = 0):
    """(second, sensor index, key, event_time, value): one integer-valued record per sensor per second.

    Integer values keep float sums exact whatever the merge order.
    """
    for sec in range(seconds):
        for i, sensor in enumerate(sensors):
            yield sec, i, sensor, epoch_ms + sec * 1000, float((i * 7 + sec) % 23)


def run_ticked(use_case, sensors: list[str], seconds: int, instances: int, *,
               partitions: int = 16, epoch_ms: int = 0, prof: SutProfile = UNIT) -> Deployment:
    """Feed ``ticked_rows`` second by second (sensor i on partition i mod P), ticking the
    deployment in between, then drain."""
    dep = Deployment(use_case, prof, ResourceConfig(instances=instances), partitions=partitions)
    ticks_per_s = 1000 // dep.tick_ms
    rows = list(ticked_rows(sensors, seconds, epoch_ms=epoch_ms))
    pos = 0
    for tick in range(seconds * ticks_per_s):
        while pos < len(rows) and rows[pos][0] * ticks_per_s == tick:
            _, i, key, ts, value = rows[pos]
            dep.log.append(use_case.input_topic, Record(key, ts, value), partition=i % partitions)
            pos += 1
        dep.run_tick(tick)
    dep.drain()
    return dep
