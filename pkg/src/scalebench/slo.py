"""Lag-trend and dropped-records SLOs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class NoSamplesAfterWarmup(ValueError):
    pass


class SloId(str, enum.Enum):
    LAG_TREND = "lag_trend"
    DROPPED_RATIO = "dropped_ratio"


@dataclass(frozen=True)
class SloVerdict:
    slo_id: SloId
    measured: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class LagSeries:
    samples: tuple[tuple[float, float], ...]
    warmup: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple((t, lag) for t, lag in self.samples))
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample times must be strictly increasing")

    def after_warmup(self) -> list[tuple[float, float]]:
        return [(t, lag) for t, lag in self.samples if t >= self.warmup]


def lag_trend(series: LagSeries) -> float:
    """Least-squares slope (messages/second) of lag over time after warm-up.

    Evaluated in exact rational arithmetic, so integer lag series give the
    same slope under any constant shift.
    """
    pts = series.after_warmup()
    if len(pts) < 2:
        raise NoSamplesAfterWarmup(
            f"{len(pts)} lag sample(s) at or after warm-up {series.warmup}s; need 2"
        )
    ts = [Fraction(t) for t, _ in pts]
    ys = [Fraction(y) for _, y in pts]
    n = len(pts)
    t_mean = sum(ts) / n
    y_mean = sum(ys) / n
    sxx = sum((t - t_mean) ** 2 for t in ts)
    sxy = sum((t - t_mean) * (y - y_mean) for t, y in zip(ts, ys))
    return float(sxy / sxx)


def check_lag_slo(slope: float, load_msgs_per_sec: float, ratio: float = 0.01) -> SloVerdict:
    if load_msgs_per_sec <= 0:
        raise ValueError("load must be positive")
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    threshold = ratio * load_msgs_per_sec
    passed = Fraction(slope) <= Fraction(str(ratio)) * Fraction(load_msgs_per_sec)
    return SloVerdict(SloId.LAG_TREND, slope, threshold, passed)


def check_dropped_slo(dropped_count: int, generated_count: int, max_ratio: float = 0.01) -> SloVerdict:
    if generated_count <= 0:
        raise ValueError("generated_count must be positive")
    passed = Fraction(dropped_count, generated_count) <= Fraction(str(max_ratio))
    return SloVerdict(SloId.DROPPED_RATIO, dropped_count / generated_count, max_ratio, passed)


class RepetitionRule(str, enum.Enum):
    MAJORITY = "majority"
    ALL = "all"
    ANY = "any"


def repetition_passed(verdicts: Iterable[SloVerdict]) -> bool:
    return all(v.passed for v in verdicts)


def aggregate_repetitions(verdict_lists: Sequence[Sequence[SloVerdict]],
                          rule: RepetitionRule | str = RepetitionRule.MAJORITY) -> bool:
    """Combine per-repetition verdicts: a repetition passes iff every SLO in it passes."""
    if not verdict_lists:
        raise ValueError("need at least one repetition")
    rule = RepetitionRule(rule)
    passes = sum(repetition_passed(v) for v in verdict_lists)
    if rule is RepetitionRule.ALL:
        return passes == len(verdict_lists)
    if rule is RepetitionRule.ANY:
        return passes > 0
    return 2 * passes > len(verdict_lists)
