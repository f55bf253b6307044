# Lag trend: how a consumer falling behind shows up as a positive slope.
#
# One instance with capacity 1000 records/s reads a UC1 stream. Below capacity
# the committed lag stays flat; above it, lag grows by exactly the rate gap.

from scalebench.engine import ResourceConfig, SutProfile
from scalebench.orchestrator import ExperimentSpec, run_experiment
from scalebench.slo import LagSeries, check_lag_slo, lag_trend
from scalebench.workload import LoadSpec

# %% a cost profile: one work unit per record, 1000 units per core-second
prof = SutProfile("demo", {"UC1": 1.0}, capacity_per_core=1000.0)

for load in (800, 1000, 1200, 1500):
    spec = ExperimentSpec("UC1", prof, LoadSpec("sensor_count", load), ResourceConfig(instances=1),
                          duration=120, warmup=40, repetitions=1, partitions=60)
    trial = run_experiment(spec).trials[0]
    verdict = trial.verdicts[0]
    print(f"load {load:5d} msg/s  slope {trial.slope:8.2f}  threshold {verdict.threshold:6.1f}  "
          f"{'pass' if verdict.passed else 'fail'}")

# %% the trend is an ordinary least-squares slope over samples after warm-up
samples = [(t, 200 + 3 * t) for t in range(0, 61, 5)]
print("slope of 200 + 3t:", lag_trend(LagSeries(tuple(samples))))

# %% the threshold scales with load; a 5 % profile tolerates a steeper trend
for slope, ratio in [(400, 0.01), (600, 0.01), (2400, 0.05)]:
    v = check_lag_slo(slope, 50_000, ratio)
    print(f"slope {slope} at 50000 msg/s, ratio {ratio}: {'pass' if v.passed else 'fail'}")
