# Windowed aggregation: tumbling (UC2), hour-of-day hopping (UC3) and the
# nested-group hierarchy (UC4), each checked against a direct computation.

from collections import defaultdict

from scalebench.engine import Deployment, ResourceConfig, SutProfile
from scalebench.engine.windows import DAY_MS, KeyedWindowState, WindowSpec, windows_for
from scalebench.plog import Record
from scalebench.usecases import uc4_pipeline
from scalebench.workload import build_hierarchy

# %% window assignment
print(windows_for(61_000, WindowSpec.tumbling(60)))                  # [60000]
three_day = WindowSpec.hopping(3 * 86400, 86400)
ts = 5 * DAY_MS + 3_600_000
print([s // DAY_MS for s in windows_for(ts, three_day)])              # days 3, 4, 5

# %% one minute of readings 1..60 for one sensor
state = KeyedWindowState(WindowSpec.tumbling(60))
for v in range(1, 61):
    state.add("s-0", (v - 1) * 1000, float(v))
(result,) = state.close_all()
print("sum", result.aggregate.sum, "count", result.aggregate.count)   # 1830.0 60

# %% a record 90 s late falls into a closed window and is dropped
state.add("s-0", 200_000, 1.0)
state.add("s-0", 110_000, 1.0)
print("dropped:", state.dropped)

# %% UC4: every group aggregate equals the sum over its subtree
h = build_hierarchy(2)
prof = SutProfile("demo", {"UC4": 1.0}, capacity_per_core=1000.0)
dep = Deployment(uc4_pipeline(h), prof, ResourceConfig(instances=3), partitions=8)
for i, sensor in enumerate(h.sensors):
    dep.log.append("input", Record(sensor, 0, 1.0), partition=i % 8)
dep.drain()
sums = defaultdict(float)
for r in dep.final_results:
    sums[r.key] += r.aggregate.sum
print({k: sums[k] for k in sorted(sums)})                             # root 16, groups 4
