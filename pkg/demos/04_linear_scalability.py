# Demand grows linearly with load, and a profile that spends twice the work
# per record needs about twice the instances at every load.

from scalebench.engine import ResourceConfig, SutProfile
from scalebench.orchestrator import Benchmark, ExperimentSpec, linear_search_demand
from scalebench.workload import LoadSpec


def demand_curve(prof, loads, partitions=120):
    base = ExperimentSpec("UC2", prof, LoadSpec("sensor_count", loads[0]), ResourceConfig(),
                          repetitions=1, partitions=partitions)
    return [p.demand for p in linear_search_demand(Benchmark(base).probe, loads, range(1, 21)).points]


native = SutProfile("native-like", {"UC2": 1.0}, capacity_per_core=60.0)
layered = SutProfile("layered-like", {"UC2": 2.0}, capacity_per_core=60.0)

# %% loads k * 120 msg/s with 60 msg/s per instance
# 120 partitions do not split evenly over 16 instances, so the heaviest
# instance overflows there and the layered profile needs one more.
loads = [120 * k for k in range(1, 6)]
a = demand_curve(native, loads)
b = demand_curve(layered, loads)
for load, x, y in zip(loads, a, b):
    print(f"load {load:4d}: {x:2d} instances vs {y:2d} instances (ratio {y / x:.1f})")
