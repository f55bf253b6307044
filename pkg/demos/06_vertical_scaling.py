# Scaling out (more instances) versus scaling up (more cores per instance).
# With perfect per-core efficiency both axes need the same cores; with
# diminishing returns the single big instance needs more.

from scalebench.engine import ResourceConfig, SutProfile
from scalebench.orchestrator import Benchmark, ExperimentSpec, linear_search_demand
from scalebench.workload import LoadSpec

loads = [60, 150, 240, 330, 600]


def demands(prof, kind, amounts):
    base = ExperimentSpec("UC2", prof, LoadSpec("sensor_count", loads[0]), ResourceConfig(),
                          repetitions=1, partitions=60)
    bench = Benchmark(base, resource_kind=kind)
    return [p.demand for p in linear_search_demand(bench.probe, loads, amounts).points]


# %%
full = SutProfile("e=1", {"UC2": 1.0}, capacity_per_core=60.0)
half = SutProfile("e=0.5", {"UC2": 1.0}, capacity_per_core=60.0, core_efficiency=0.5)
out = demands(full, "instances", range(1, 11))
up_full = demands(full, "cores_per_instance", range(1, 21))
up_half = demands(half, "cores_per_instance", range(1, 21))
print("load  instances  cores(e=1)  cores(e=0.5)")
for row in zip(loads, out, up_full, up_half):
    print("{:4d}  {:9d}  {:10d}  {:12d}".format(*row))
