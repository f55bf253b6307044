"""Declarative benchmark configuration documents (YAML or JSON)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .engine.profiles import ResourceConfig, ResourceKind, SutProfile, get_profile
from .orchestrator import (
    DEFAULT_DURATIONS,
    DEFAULT_EPOCH_MS,
    Benchmark,
    DemandCurve,
    ExperimentSpec,
    Mode,
    full_search_demand,
    linear_search_demand,
)
from .slo import RepetitionRule
from .usecases import build_use_case
from .workload import LoadKind, LoadSpec

OUT_ENV = "SCALEBENCH_OUT"
STRATEGIES = ("linear", "full")


class ConfigParseError(ValueError):
    """The document could not be read or is not a mapping."""


class ConfigError(ValueError):
    """The document parsed but is not a valid benchmark configuration."""


@dataclass(frozen=True)
class LoadGrid:
    kind: LoadKind
    magnitudes: tuple[int, ...]
    base_sensors: int = 1


@dataclass(frozen=True)
class ResourceGrid:
    kind: ResourceKind
    amounts: tuple[int, ...]
    instances: int = 1
    cores: int = 1


@dataclass(frozen=True)
class BenchmarkConfig:
    name: str
    use_case: str
    sut_profile: SutProfile
    load: LoadGrid
    resources: ResourceGrid
    strategy: str = "linear"
    lower_bound_restriction: bool = True
    duration: float | None = None
    warmup: float | None = None
    repetitions: int = 3
    repetition_rule: RepetitionRule = RepetitionRule.MAJORITY
    deterministic: bool = True
    partitions: int = 100
    tick_ms: int = 100
    p_late: float = 0.0
    d_late: float = 90.0
    epoch_ms: int = DEFAULT_EPOCH_MS
    use_case_options: Mapping[str, Any] = field(default_factory=dict)
    output_dir: str = "results"

    def base_spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            use_case=self.use_case,
            profile=self.sut_profile,
            load=LoadSpec(self.load.kind, self.load.magnitudes[0], self.load.base_sensors),
            resource=ResourceConfig.amount(self.resources.kind, self.resources.amounts[0],
                                           instances=self.resources.instances,
                                           cores=self.resources.cores),
            duration=self.duration,
            warmup=self.warmup,
            repetitions=self.repetitions,
            partitions=self.partitions,
            tick_ms=self.tick_ms,
            p_late=self.p_late,
            d_late=self.d_late,
            epoch_ms=self.epoch_ms,
            repetition_rule=self.repetition_rule,
            mode=Mode.VIRTUAL if self.deterministic else Mode.WALLCLOCK,
            use_case_options=dict(self.use_case_options),
        )

    def benchmark(self) -> Benchmark:
        return Benchmark(
            self.base_spec(),
            load_kind=self.load.kind,
            resource_kind=self.resources.kind,
            base_sensors=self.load.base_sensors,
            fixed_instances=self.resources.instances,
            fixed_cores=self.resources.cores,
        )

    def to_dict(self) -> dict[str, Any]:
        """Fully resolved document; parsing it back yields an equal config."""
        duration, warmup = DEFAULT_DURATIONS[self.use_case]
        return {
            "name": self.name,
            "use_case": self.use_case,
            "use_case_options": dict(self.use_case_options),
            "sut_profile": self.sut_profile.to_dict(),
            "load": {"kind": self.load.kind.value, "magnitudes": list(self.load.magnitudes),
                     "base_sensors": self.load.base_sensors},
            "resources": {"kind": self.resources.kind.value, "amounts": list(self.resources.amounts),
                          "instances": self.resources.instances, "cores": self.resources.cores},
            "search": {"strategy": self.strategy,
                       "lower_bound_restriction": self.lower_bound_restriction},
            "duration": self.duration if self.duration is not None else duration,
            "warmup": self.warmup if self.warmup is not None else warmup,
            "repetitions": self.repetitions,
            "repetition_rule": self.repetition_rule.value,
            "deterministic": self.deterministic,
            "engine": {"partitions": self.partitions, "tick_ms": self.tick_ms,
                       "p_late": self.p_late, "d_late": self.d_late, "epoch_ms": self.epoch_ms},
            "output_dir": self.output_dir,
        }


_TOP_LEVEL = {"name", "use_case", "use_case_options", "sut_profile", "load", "resources", "search",
              "duration", "warmup", "repetitions", "repetition_rule", "deterministic", "engine",
              "output_dir", "manifest"}
_ENGINE = {"partitions", "tick_ms", "p_late", "d_late", "epoch_ms"}


def _grid(doc: Mapping[str, Any], section: str, field_name: str) -> tuple[int, ...]:
    values = doc.get(field_name)
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{section}.{field_name}: must be a non-empty list")
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in values):
        raise ConfigError(f"{section}.{field_name}: entries must be positive integers")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{section}.{field_name}: must be strictly increasing")
    return tuple(values)


def _section(doc: Mapping[str, Any], name: str, required: bool = True) -> Mapping[str, Any]:
    sec = doc.get(name)
    if sec is None and not required:
        return {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"{name}: missing or not a mapping")
    return sec


def from_dict(doc: Mapping[str, Any], default_name: str = "benchmark") -> BenchmarkConfig:
    unknown = set(doc) - _TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown fields: {', '.join(sorted(unknown))}")
    try:
        use_case = str(doc["use_case"]).upper()
    except KeyError:
        raise ConfigError("use_case: required") from None
    if use_case not in DEFAULT_DURATIONS:
        raise ConfigError(f"use_case: unknown {use_case!r}")

    prof = doc.get("sut_profile")
    try:
        if isinstance(prof, str):
            profile = get_profile(prof)
        elif isinstance(prof, Mapping):
            profile = SutProfile.from_dict(prof)
        else:
            raise ConfigError("sut_profile: a profile name or an inline mapping is required")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"sut_profile: {exc}") from None
    if use_case not in profile.cost_per_record:
        raise ConfigError(f"sut_profile: profile {profile.name!r} has no cost for {use_case}")

    load_doc = _section(doc, "load")
    res_doc = _section(doc, "resources")
    search = _section(doc, "search", required=False)
    engine = _section(doc, "engine", required=False)
    if set(engine) - _ENGINE:
        raise ConfigError(f"engine: unknown fields {sorted(set(engine) - _ENGINE)}")
    try:
        load = LoadGrid(LoadKind(load_doc.get("kind", "sensor_count")),
                        _grid(load_doc, "load", "magnitudes"),
                        int(load_doc.get("base_sensors", 1)))
        resources = ResourceGrid(ResourceKind(res_doc.get("kind", "instances")),
                                 _grid(res_doc, "resources", "amounts"),
                                 int(res_doc.get("instances", 1)), int(res_doc.get("cores", 1)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"load/resources: {exc}") from None
    strategy = search.get("strategy", "linear")
    if strategy not in STRATEGIES:
        raise ConfigError(f"search.strategy: must be one of {STRATEGIES}")

    try:
        cfg = BenchmarkConfig(
            name=str(doc.get("name", default_name)),
            use_case=use_case,
            sut_profile=profile,
            load=load,
            resources=resources,
            strategy=strategy,
            lower_bound_restriction=bool(search.get("lower_bound_restriction", True)),
            duration=doc.get("duration"),
            warmup=doc.get("warmup"),
            repetitions=int(doc.get("repetitions", 3)),
            repetition_rule=RepetitionRule(doc.get("repetition_rule", "majority")),
            deterministic=bool(doc.get("deterministic", True)),
            partitions=int(engine.get("partitions", 100)),
            tick_ms=int(engine.get("tick_ms", 100)),
            p_late=float(engine.get("p_late", 0.0)),
            d_late=float(engine.get("d_late", 90.0)),
            epoch_ms=int(engine.get("epoch_ms", DEFAULT_EPOCH_MS)),
            use_case_options=dict(doc.get("use_case_options") or {}),
            output_dir=str(doc.get("output_dir", "results")),
        )
        # surface experiment-level errors (durations, tick alignment, load kind) early
        build_use_case(use_case, cfg.base_spec().load, **cfg.use_case_options)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path: str | os.PathLike) -> BenchmarkConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from None
    if not isinstance(doc, Mapping):
        raise ConfigParseError(f"{path}: top level must be a mapping")
    return from_dict(doc, default_name=path.stem)


def execute(cfg: BenchmarkConfig) -> DemandCurve:
    bench = cfg.benchmark()
    loads, amounts = cfg.load.magnitudes, cfg.resources.amounts
    if cfg.strategy == "full":
        return full_search_demand(bench.probe, loads, amounts)
    return linear_search_demand(bench.probe, loads, amounts, cfg.lower_bound_restriction)
