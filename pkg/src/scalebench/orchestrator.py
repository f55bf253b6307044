"""Isolated experiments, search strategies and the resource-demand function."""

from __future__ import annotations

import enum
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .engine.profiles import ResourceConfig, ResourceKind, SutProfile, exact
from .engine.runtime import Deployment
from .engine.windows import DAY_MS
from .plog import PartitionedLog
from .slo import (
    LagSeries,
    RepetitionRule,
    SloVerdict,
    aggregate_repetitions,
    check_dropped_slo,
    check_lag_slo,
    lag_trend,
    repetition_passed,
)
from .usecases import UC4_WINDOW_S, build_use_case
from .workload import FAN_OUT, LoadGenerator, LoadKind, LoadSpec, messages_per_second

log = logging.getLogger(__name__)

# (duration, warm-up) in seconds
DEFAULT_DURATIONS = {"UC1": (300, 120), "UC2": (300, 120), "UC3": (300, 120), "UC4": (600, 240)}
DROPPED_SLO_USE_CASES = frozenset({"UC2", "UC4"})
# Event time starts 30 days in, so hopping windows of up to 30 days are never
# clipped at time zero.
DEFAULT_EPOCH_MS = 30 * DAY_MS


class Mode(str, enum.Enum):
    VIRTUAL = "virtual"
    WALLCLOCK = "wallclock"


@dataclass(frozen=True)
class ExperimentSpec:
    use_case: str
    profile: SutProfile
    load: LoadSpec
    resource: ResourceConfig
    duration: float | None = None
    warmup: float | None = None
    repetitions: int = 3
    partitions: int = 100
    tick_ms: int = 100
    sample_interval: float | None = None
    p_late: float = 0.0
    d_late: float = 90.0
    epoch_ms: int = DEFAULT_EPOCH_MS
    dropped_max_ratio: float = 0.01
    repetition_rule: RepetitionRule = RepetitionRule.MAJORITY
    mode: Mode = Mode.VIRTUAL
    use_case_options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        uc = self.use_case.upper()
        if uc not in DEFAULT_DURATIONS:
            raise ValueError(f"unknown use case {self.use_case!r}")
        object.__setattr__(self, "use_case", uc)
        object.__setattr__(self, "repetition_rule", RepetitionRule(self.repetition_rule))
        object.__setattr__(self, "mode", Mode(self.mode))
        duration, warmup = DEFAULT_DURATIONS[uc]
        if self.duration is None:
            object.__setattr__(self, "duration", duration)
        if self.warmup is None:
            object.__setattr__(self, "warmup", warmup)
        if self.sample_interval is None:
            object.__setattr__(self, "sample_interval", self.profile.commit_interval)
        if not 0 <= self.warmup < self.duration:
            raise ValueError("warm-up must be non-negative and shorter than the duration")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for name in ("duration", "warmup", "sample_interval"):
            ms = exact(getattr(self, name)) * 1000
            if ms.denominator != 1 or ms % self.tick_ms:
                raise ValueError(f"{name} must be a whole number of {self.tick_ms} ms ticks")
        if uc == "UC4" and self.load.kind is not LoadKind.NESTED_GROUPS:
            raise ValueError("UC4 requires a nested_groups load")
        if self.load.kind is LoadKind.WINDOW_DURATION_DAYS and uc != "UC3":
            raise ValueError("window_duration_days loads only apply to UC3")


@dataclass(frozen=True)
class TrialResult:
    repetition: int
    verdicts: tuple[SloVerdict, ...]
    slope: float
    dropped_ratio: float
    generated: int
    dropped: int
    lag_samples: tuple[tuple[float, int], ...]

    @property
    def passed(self) -> bool:
        return repetition_passed(self.verdicts)


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    trials: tuple[TrialResult, ...]

    @property
    def verdicts(self) -> list[tuple[SloVerdict, ...]]:
        return [t.verdicts for t in self.trials]

    @property
    def passed(self) -> bool:
        return aggregate_repetitions(self.verdicts, self.spec.repetition_rule)


def _run_trial(spec: ExperimentSpec, repetition: int) -> TrialResult:
    log_ = PartitionedLog()
    uc = build_use_case(spec.use_case, spec.load, **spec.use_case_options)
    deployment = Deployment(uc, spec.profile, spec.resource, log=log_,
                            partitions=spec.partitions, tick_ms=spec.tick_ms)
    gen = LoadGenerator(spec.load, tick_ms=spec.tick_ms, p_late=spec.p_late,
                        d_late_s=spec.d_late, epoch_ms=spec.epoch_ms)
    tick_ms = spec.tick_ms
    n_ticks = round(spec.duration * 1000) // tick_ms
    warmup_ms = round(spec.warmup * 1000)
    sample_ms = round(spec.sample_interval * 1000)

    executor = ThreadPoolExecutor(spec.resource.instances) if spec.mode is Mode.WALLCLOCK else None
    started = time.monotonic()
    samples: list[tuple[float, int]] = []
    dropped_at_warmup = 0
    try:
        for tick in range(n_ticks):
            gen.generate_tick(tick, log_, uc.input_topic)
            deployment.run_tick(tick, executor)
            end_ms = (tick + 1) * tick_ms
            if end_ms == warmup_ms:
                dropped_at_warmup = deployment.dropped
            if end_ms % sample_ms == 0:
                samples.append((end_ms / 1000, deployment.total_lag()))
            if executor is not None:
                delay = started + end_ms / 1000 - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
        dropped = deployment.dropped - dropped_at_warmup
    finally:
        if executor is not None:
            executor.shutdown()
        deployment.teardown()
    generated = gen.records_before(n_ticks) - gen.records_before(warmup_ms // tick_ms)

    slope = lag_trend(LagSeries(tuple(samples), spec.warmup))
    rate = messages_per_second(spec.load)
    verdicts = [check_lag_slo(slope, rate, spec.profile.lag_slo_ratio)]
    dropped_ratio = dropped / generated if generated else 0.0
    if spec.use_case in DROPPED_SLO_USE_CASES:
        verdicts.append(check_dropped_slo(dropped, generated, spec.dropped_max_ratio))
    return TrialResult(repetition, tuple(verdicts), slope, dropped_ratio, generated, dropped,
                       tuple(samples))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every repetition on fresh topics, state and consumer groups."""
    trials = tuple(_run_trial(spec, r) for r in range(spec.repetitions))
    result = ExperimentResult(spec, trials)
    log.debug("%s load=%s %s=%d -> %s", spec.use_case, spec.load.magnitude,
              spec.resource.kind.value, spec.resource.scaled_amount,
              "pass" if result.passed else "fail")
    return result


# search ------------------------------------------------------------------

@dataclass(frozen=True)
class CellResult:
    load: int
    resources: int
    passed: bool
    experiment: ExperimentResult | None = None


Probe = Callable[[int, int], CellResult]


@dataclass(frozen=True)
class DemandPoint:
    load: int
    demand: int | None

    @property
    def status(self) -> str:
        return "ok" if self.demand is not None else "exceeded"


@dataclass
class DemandCurve:
    points: list[DemandPoint]
    cells: list[CellResult] = field(default_factory=list)

    @property
    def demands(self) -> dict[int, int | None]:
        return {p.load: p.demand for p in self.points}

    @property
    def experiments_run(self) -> int:
        return len(self.cells)

    def matrix(self) -> dict[tuple[int, int], bool]:
        return {(c.load, c.resources): c.passed for c in self.cells}

    def same_demand(self, other: DemandCurve) -> bool:
        return self.points == other.points


def _check_grid(name: str, values: Sequence[int]) -> None:
    if not values:
        raise ValueError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} grid must be strictly increasing")


def linear_search_demand(probe: Probe, loads: Sequence[int], resources: Sequence[int],
                         lower_bound_restriction: bool = True) -> DemandCurve:
    """Per load, the first passing resource amount scanning upwards.

    With the lower-bound restriction each scan starts at the previous load's
    demand (or at the grid maximum after an exceeded load).
    """
    _check_grid("load", loads)
    _check_grid("resource", resources)
    points, cells = [], []
    start = 0
    for load in loads:
        demand = None
        first = start if lower_bound_restriction else 0
        for idx in range(first, len(resources)):
            cell = probe(load, resources[idx])
            cells.append(cell)
            if cell.passed:
                demand = resources[idx]
                start = idx
                break
        else:
            start = len(resources) - 1
        points.append(DemandPoint(load, demand))
    return DemandCurve(points, cells)


def full_search_demand(probe: Probe, loads: Sequence[int], resources: Sequence[int]) -> DemandCurve:
    """Execute every cell; demand per load is the least passing amount."""
    _check_grid("load", loads)
    _check_grid("resource", resources)
    points, cells = [], []
    for load in loads:
        row = [probe(load, r) for r in resources]
        cells.extend(row)
        passing = [c.resources for c in row if c.passed]
        points.append(DemandPoint(load, passing[0] if passing else None))
    return DemandCurve(points, cells)


def load_capacity(probe: Probe, resources: Sequence[int], loads: Sequence[int]) -> dict[int, int | None]:
    """Per resource amount, the greatest load on the grid whose SLOs pass (``None`` if none does).

    Loads are scanned upwards until the first failure; for each larger
    resource amount the scan resumes at the previous capacity.
    """
    _check_grid("resource", resources)
    _check_grid("load", loads)
    out: dict[int, int | None] = {}
    start = 0
    for r in resources:
        best = None
        idx = start
        while idx < len(loads):
            if not probe(loads[idx], r).passed:
                break
            best = idx
            idx += 1
        if best is not None:
            start = best
        out[r] = loads[best] if best is not None else None
    return out


@dataclass
class Benchmark:
    """Turns (load magnitude, resource amount) grid points into experiments."""

    base: ExperimentSpec
    load_kind: LoadKind = LoadKind.SENSOR_COUNT
    resource_kind: ResourceKind = ResourceKind.INSTANCES
    base_sensors: int = 1
    fixed_instances: int = 1
    fixed_cores: int = 1
    executed: int = 0

    def spec_for(self, load: int, amount: int) -> ExperimentSpec:
        return replace(
            self.base,
            load=LoadSpec(self.load_kind, load, self.base_sensors),
            resource=ResourceConfig.amount(self.resource_kind, amount,
                                           instances=self.fixed_instances, cores=self.fixed_cores),
        )

    def probe(self, load: int, amount: int) -> CellResult:
        self.executed += 1
        result = run_experiment(self.spec_for(load, amount))
        return CellResult(load, amount, result.passed, result)


# oracle ------------------------------------------------------------------

def work_rate(use_case: str, profile: SutProfile, load: LoadSpec,
              use_case_options: Mapping[str, Any] | None = None) -> Fraction:
    """Closed-form work units per second the use case needs at ``load``."""
    opts = dict(use_case_options or {})
    uc = use_case.upper()
    rate = Fraction(messages_per_second(load))
    cost = exact(profile.cost(uc))
    if uc == "UC1":
        return rate * (cost + exact(opts.get("sink_cost", 0.0)))
    if uc == "UC2":
        return rate * cost
    if uc == "UC3":
        days = load.magnitude if load.kind is LoadKind.WINDOW_DURATION_DAYS else opts.get("duration_days", 3)
        return rate * cost * days
    if uc == "UC4":
        n = load.magnitude
        window_s = opts.get("window_s", UC4_WINDOW_S)
        # every level consumes one aggregate per child per window:
        # 4^n sensor results + 4^(n-1) + ... + 4 group results
        child_results = Fraction(FAN_OUT * (FAN_OUT**n - 1), FAN_OUT - 1)
        return rate * cost + child_results / window_s * exact(profile.cost(uc, intermediate=True))
    raise ValueError(f"unknown use case {use_case!r}")


def analytic_demand_oracle(use_case: str, profile: SutProfile, load: LoadSpec,
                           resource_kind: ResourceKind | str = ResourceKind.INSTANCES, *,
                           fixed_instances: int = 1, fixed_cores: int = 1,
                           use_case_options: Mapping[str, Any] | None = None) -> int | None:
    """Smallest resource amount whose capacity covers the work rate.

    Assumes zero lateness and perfectly balanced partitions. Returns ``None``
    when no amount suffices (a shared UC1 sink slower than the load).
    """
    opts = dict(use_case_options or {})
    if use_case.upper() == "UC1" and opts.get("shared_sink"):
        if messages_per_second(load) > exact(opts["sink_capacity"]):
            return None
    work = work_rate(use_case, profile, load, opts)
    kind = ResourceKind(resource_kind)
    if kind is ResourceKind.INSTANCES:
        return max(1, math.ceil(work / profile.instance_capacity(fixed_cores)))
    per_core = exact(profile.capacity_per_core) * fixed_instances
    eff = exact(profile.core_efficiency)
    # per_core * (1 + eff * (c - 1)) >= work
    return max(1, math.ceil(1 + (work / per_core - 1) / eff))


def oracle_demand_curve(loads: Sequence[int], resources: Sequence[int], oracle: Callable[[int], int | None]) -> DemandCurve:
    """Project closed-form demands onto a resource grid (least grid amount >= demand)."""
    points = []
    for load in loads:
        need = oracle(load)
        fit = [r for r in resources if need is not None and r >= need]
        points.append(DemandPoint(load, fit[0] if fit else None))
    return DemandCurve(points)
