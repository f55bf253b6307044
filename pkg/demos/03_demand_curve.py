# Resource demand: for each load, the fewest instances whose SLOs hold,
# compared with the closed-form expectation and plotted.

from pathlib import Path

from scalebench.config import from_dict, execute
from scalebench.orchestrator import analytic_demand_oracle
from scalebench.plot import plot_results
from scalebench.results import write_results
from scalebench.workload import LoadSpec

doc = {
    "name": "uc2-demo",
    "use_case": "UC2",
    "sut_profile": {"name": "demo", "cost_per_record": {"UC2": 1.0}, "capacity_per_core": 60.0},
    "load": {"kind": "sensor_count", "magnitudes": [60, 150, 240, 330, 600]},
    "resources": {"kind": "instances", "amounts": list(range(1, 11))},
    "repetitions": 1,
    "engine": {"partitions": 60},
}
cfg = from_dict(doc)

# %% linear search with the lower-bound restriction
curve = execute(cfg)
for p in curve.points:
    expected = analytic_demand_oracle("UC2", cfg.sut_profile, LoadSpec("sensor_count", p.load))
    print(f"load {p.load:4d}: measured {p.demand}, closed form {expected}")
print("experiments run:", curve.experiments_run, "of", 5 * 10)

# %% results on disk and a chart
out = Path("demo-results") / cfg.name
write_results(out, cfg.to_dict(), curve)
print("wrote", *plot_results(out))
