"""The four benchmark task samples as dataflows.

UC1  stateless: every record goes to a counting sink (stands in for a DB write).
UC2  per-sensor aggregates over 60 s tumbling windows, late records dropped.
UC3  per (sensor, hour-of-day) aggregates over hopping windows of
     ``duration_days`` days sliding by one day, early results every 5 s.
UC4  nested-group aggregation over 60 s tumbling windows, without feedback.
"""

from __future__ import annotations

from .engine.dataflow import SinkSpec, Stage, UseCase
from .engine.windows import DAY_MS, WindowSpec
from .plog import Record
from .workload import LoadKind, LoadSpec, SensorHierarchy, build_hierarchy

HOUR_MS = 3_600_000
UC2_WINDOW_S = 60
UC4_WINDOW_S = 60
EARLY_EMIT_S = 5


def hour_of_day(ts_ms: int) -> int:
    return (ts_ms % DAY_MS) // HOUR_MS


def _sensor_hour_key(record: Record) -> str:
    return f"{record.key}@{hour_of_day(record.event_time):02d}"


def uc1_pipeline(sink_cost: float = 0.0, shared_sink: bool = False,
                 sink_capacity: float | None = None) -> UseCase:
    sink = SinkSpec(sink_cost, shared_sink, sink_capacity)
    return UseCase("UC1", (Stage("sink", "input"),), sink=sink,
                   params={"sink_cost": sink_cost, "shared_sink": shared_sink,
                           "sink_capacity": sink_capacity})


def uc2_pipeline(window_s: int = UC2_WINDOW_S, grace_s: float = 0.0) -> UseCase:
    stage = Stage("aggregate", "input", window=WindowSpec.tumbling(window_s, grace_s))
    return UseCase("UC2", (stage,), params={"window_s": window_s, "grace_s": grace_s})


def uc3_pipeline(duration_days: int = 3) -> UseCase:
    if duration_days < 1:
        raise ValueError("duration_days must be >= 1")
    day_s = DAY_MS // 1000
    if duration_days == 1:
        window = WindowSpec.tumbling(day_s, early_emit_interval=EARLY_EMIT_S)
    else:
        window = WindowSpec.hopping(duration_days * day_s, day_s, early_emit_interval=EARLY_EMIT_S)
    # (sensor, hour) refines the sensor key, so state stays on the sensor's
    # instance and no repartition is needed.
    stage = Stage("aggregate", "input", window=window, state_key=_sensor_hour_key,
                  cost_factor=window.windows_per_record)
    return UseCase("UC3", (stage,), params={"duration_days": duration_days})


def uc4_pipeline(hierarchy: SensorHierarchy, window_s: int = UC4_WINDOW_S) -> UseCase:
    """Sensor pre-aggregation followed by one keyed stage per group level.

    Stage ``sensors`` reduces each sensor's window and repartitions the result
    by leaf group. Stage ``level-k`` aggregates level-k groups from their
    children, publishes every group aggregate, and repartitions it by parent
    until the root is reached.
    """
    n = hierarchy.depth
    window = WindowSpec.tumbling(window_s)
    parent = SensorHierarchy.parent_of
    stages = [Stage("sensors", "input", window=window, emit_to=f"uc4-level-{n - 1}",
                    emit_key=parent, publish=False)]
    for level in range(n - 1, -1, -1):
        stages.append(Stage(
            f"level-{level}",
            f"uc4-level-{level}",
            window=window,
            emit_to=f"uc4-level-{level - 1}" if level > 0 else None,
            emit_key=parent if level > 0 else None,
            intermediate=True,
        ))
    return UseCase("UC4", tuple(stages), params={"depth": n, "window_s": window_s})


def build_use_case(uc_id: str, load: LoadSpec | None = None, **options) -> UseCase:
    """Instantiate a use case for one experiment; the load fixes UC3's window
    duration and UC4's hierarchy depth when it is of the matching kind."""
    uc_id = uc_id.upper()
    if uc_id == "UC1":
        return uc1_pipeline(**options)
    if uc_id == "UC2":
        return uc2_pipeline(**options)
    if uc_id == "UC3":
        if load is not None and load.kind is LoadKind.WINDOW_DURATION_DAYS:
            options = {**options, "duration_days": load.magnitude}
        return uc3_pipeline(**options)
    if uc_id == "UC4":
        depth = options.pop("depth", None)
        if load is not None and load.kind is LoadKind.NESTED_GROUPS:
            depth = load.magnitude
        if depth is None:
            raise ValueError("UC4 needs a nested_groups load or an explicit depth")
        return uc4_pipeline(build_hierarchy(depth), **options)
    raise ValueError(f"unknown use case {uc_id!r}")
