"""Immutable dataflow descriptions executed by the runtime."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..plog import Record
from .windows import WindowSpec


@dataclass(frozen=True)
class SinkSpec:
    """Counting side-effect sink. ``shared`` makes all instances contend for one
    sink limited to ``capacity`` records/second."""

    cost: float = 0.0
    shared: bool = False
    capacity: float | None = None

    def __post_init__(self) -> None:
        if self.cost < 0:
            raise ValueError("sink cost must be non-negative")
        if self.shared and not (self.capacity and self.capacity > 0):
            raise ValueError("a shared sink needs a positive capacity")


@dataclass(frozen=True)
class Stage:
    """One keyed operator consuming ``input_topic`` with its own consumer group.

    Windowed stages fold records into per-(key, window) aggregates. Final
    results go to the use case output topic when ``publish`` is set and are
    re-keyed with ``emit_key`` onto ``emit_to`` when that is set (repartition).
    Stages without a window feed the use case sink.
    """

    name: str
    input_topic: str
    window: WindowSpec | None = None
    state_key: Callable[[Record], str] | None = None
    emit_to: str | None = None
    emit_key: Callable[[str], str] | None = None
    publish: bool = True
    intermediate: bool = False
    cost_factor: int = 1


@dataclass(frozen=True)
class UseCase:
    id: str
    stages: tuple[Stage, ...]
    input_topic: str = "input"
    output_topic: str = "output"
    sink: SinkSpec | None = None
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def intermediate_topics(self) -> list[str]:
        return [s.emit_to for s in self.stages if s.emit_to is not None]

    @property
    def topics(self) -> list[str]:
        return [self.input_topic, *self.intermediate_topics, self.output_topic]

    def group_id(self, stage: Stage) -> str:
        return f"{self.id.lower()}.{stage.name}"
