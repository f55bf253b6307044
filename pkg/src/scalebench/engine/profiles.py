"""SUT cost profiles and resource configurations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

USE_CASES = ("UC1", "UC2", "UC3", "UC4")


def exact(x: float | int | str | Fraction) -> Fraction:
    """Decimal-exact rational for a configured number (0.1 -> 1/10, not the binary float)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(str(x))


@dataclass(frozen=True)
class SutProfile:
    """Cost model standing in for a stream-processing framework.

    ``cost_per_record`` maps a use case to work units per consumed input record.
    For UC3 the cost is charged per window update, so a record costs
    ``cost * windows_per_record``. ``intermediate_cost`` optionally prices
    records read back from repartition topics (UC4 group stages); it defaults
    to the use case's input cost. ``core_efficiency`` is the capacity
    contributed by each core beyond the first, as a fraction of a full core.
    """

    name: str
    cost_per_record: Mapping[str, float]
    capacity_per_core: float
    commit_interval: float = 5.0
    lag_slo_ratio: float = 0.01
    core_efficiency: float = 1.0
    intermediate_cost: Mapping[str, float] = field(default_factory=dict)
    description: str = ""

    def __post_init__(self) -> None:
        if not self.cost_per_record:
            raise ValueError(f"profile {self.name!r}: cost_per_record is empty")
        for uc, cost in {**self.cost_per_record, **self.intermediate_cost}.items():
            if uc not in USE_CASES:
                raise ValueError(f"profile {self.name!r}: unknown use case {uc!r}")
            if not cost > 0:
                raise ValueError(f"profile {self.name!r}: cost for {uc} must be positive")
        if not self.capacity_per_core > 0:
            raise ValueError(f"profile {self.name!r}: capacity_per_core must be positive")
        if not self.commit_interval > 0:
            raise ValueError(f"profile {self.name!r}: commit_interval must be positive")
        if not 0 < self.lag_slo_ratio < 1:
            raise ValueError(f"profile {self.name!r}: lag_slo_ratio must be in (0, 1)")
        if not 0 < self.core_efficiency <= 1:
            raise ValueError(f"profile {self.name!r}: core_efficiency must be in (0, 1]")

    def cost(self, use_case: str, intermediate: bool = False) -> float:
        if intermediate and use_case in self.intermediate_cost:
            return self.intermediate_cost[use_case]
        try:
            return self.cost_per_record[use_case]
        except KeyError:
            raise ValueError(f"profile {self.name!r} has no cost for {use_case}") from None

    def instance_capacity(self, cores: int) -> Fraction:
        """Work units per second of one instance with ``cores`` cores."""
        eff = exact(self.core_efficiency)
        return exact(self.capacity_per_core) * (1 + eff * (cores - 1))

    def to_dict(self) -> dict[str, Any]:
        d = {
            "name": self.name,
            "cost_per_record": dict(self.cost_per_record),
            "capacity_per_core": self.capacity_per_core,
            "commit_interval": self.commit_interval,
            "lag_slo_ratio": self.lag_slo_ratio,
            "core_efficiency": self.core_efficiency,
        }
        if self.intermediate_cost:
            d["intermediate_cost"] = dict(self.intermediate_cost)
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SutProfile:
        known = {"name", "cost_per_record", "capacity_per_core", "commit_interval",
                 "lag_slo_ratio", "core_efficiency", "intermediate_cost", "description"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown profile fields: {sorted(unknown)}")
        return cls(**d)


class ResourceKind(str, enum.Enum):
    INSTANCES = "instances"
    CORES_PER_INSTANCE = "cores_per_instance"


@dataclass(frozen=True)
class ResourceConfig:
    kind: ResourceKind = ResourceKind.INSTANCES
    instances: int = 1
    cores: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ResourceKind(self.kind))
        if self.instances < 1 or self.cores < 1:
            raise ValueError("instances and cores must be positive")

    @classmethod
    def amount(cls, kind: ResourceKind | str, amount: int, *, instances: int = 1,
               cores: int = 1) -> ResourceConfig:
        """The grid point ``amount`` along ``kind``; the other axis stays fixed."""
        kind = ResourceKind(kind)
        if kind is ResourceKind.INSTANCES:
            return cls(kind, instances=amount, cores=cores)
        return cls(kind, instances=instances, cores=amount)

    @property
    def scaled_amount(self) -> int:
        return self.instances if self.kind is ResourceKind.INSTANCES else self.cores

    def total_cores(self) -> int:
        return self.instances * self.cores

    def capacity(self, profile: SutProfile) -> Fraction:
        return self.instances * profile.instance_capacity(self.cores)


# Illustrative, non-empirical defaults. Relative costs only echo the qualitative
# ordering of framework demand; absolute values mean nothing outside this harness.
BUILTIN_PROFILES: dict[str, SutProfile] = {
    p.name: p
    for p in [
        SutProfile(
            "deterministic",
            {"UC1": 1.0, "UC2": 1.0, "UC3": 1.0, "UC4": 1.0},
            capacity_per_core=1000.0,
            description="unit costs, for oracle checks",
        ),
        SutProfile(
            "kstreams-like",
            {"UC1": 1.0, "UC2": 1.2, "UC3": 1.0, "UC4": 1.5},
            capacity_per_core=1000.0,
        ),
        SutProfile(
            "flink-like",
            {"UC1": 1.0, "UC2": 1.0, "UC3": 0.9, "UC4": 1.2},
            capacity_per_core=1000.0,
        ),
        SutProfile(
            "hazelcast-like",
            {"UC1": 0.8, "UC2": 1.0, "UC3": 1.2, "UC4": 2.5},
            capacity_per_core=1000.0,
            core_efficiency=0.8,
        ),
        SutProfile(
            "beam-flink-like",
            {"UC1": 2.0, "UC2": 2.0, "UC3": 1.8, "UC4": 2.4},
            capacity_per_core=1000.0,
        ),
        SutProfile(
            "beam-samza-like",
            {"UC1": 2.2, "UC2": 2.4, "UC3": 2.0, "UC4": 2.8},
            capacity_per_core=1000.0,
            lag_slo_ratio=0.05,
        ),
    ]
}


def get_profile(name: str) -> SutProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown SUT profile {name!r}; known: {sorted(BUILTIN_PROFILES)}") from None
