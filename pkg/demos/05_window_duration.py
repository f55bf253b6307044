# Longer hopping windows: every record updates one window per day of the
# window duration, so work (and demand) scales with the duration.

from scalebench.engine import ResourceConfig, SutProfile
from scalebench.orchestrator import Benchmark, ExperimentSpec, analytic_demand_oracle, linear_search_demand
from scalebench.workload import LoadKind, LoadSpec

prof = SutProfile("demo", {"UC3": 1.0}, capacity_per_core=180.0)
days = [3, 6, 12, 15, 30]
first = LoadSpec(LoadKind.WINDOW_DURATION_DAYS, days[0], base_sensors=60)
base = ExperimentSpec("UC3", prof, first, ResourceConfig(), repetitions=1, partitions=60)
bench = Benchmark(base, load_kind=LoadKind.WINDOW_DURATION_DAYS, base_sensors=60)

# %% 60 sensors, window duration 3 to 30 days
curve = linear_search_demand(bench.probe, days, list(range(1, 11)))
for p in curve.points:
    oracle = analytic_demand_oracle("UC3", prof, LoadSpec(LoadKind.WINDOW_DURATION_DAYS, p.load, 60))
    print(f"{p.load:2d} days: {p.demand} instances (closed form {oracle})")
