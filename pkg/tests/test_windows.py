from collections import defaultdict

import pytest
from hypothesis import given, settings, strategies as st

from scalebench.engine.windows import (
    DAY_MS,
    Aggregate,
    KeyedWindowState,
    WindowSpec,
    windows_for,
)

HOUR_MS = 3_600_000


def test_tumbling_assignment():
    assert windows_for(61_000, WindowSpec.tumbling(60)) == [60_000]


def test_hopping_three_of_three_days():
    w = WindowSpec.hopping(3 * 86400, 86400)
    ts = 5 * DAY_MS + HOUR_MS
    assert windows_for(ts, w) == [3 * DAY_MS, 4 * DAY_MS, 5 * DAY_MS]


def test_hopping_clipped_near_zero():
    assert windows_for(30_000, WindowSpec.hopping(3 * 86400, 86400)) == [0]


def _brute_windows(ts, size, slide):
    # enumerate every candidate start on the slide grid
    return [s for s in range(0, ts + 1, slide) if s <= ts < s + size]


@given(st.integers(0, 10 * DAY_MS), st.sampled_from([(3, 1), (4, 2), (30, 1), (6, 3)]))
def test_hopping_matches_enumeration(ts, geometry):
    size_d, slide_d = geometry
    w = WindowSpec.hopping(size_d * 86400, slide_d * 86400)
    got = windows_for(ts, w)
    assert got == _brute_windows(ts, size_d * DAY_MS, slide_d * DAY_MS)
    if ts >= w.size_ms - w.slide_ms:
        assert len(got) == w.windows_per_record


@given(st.integers(0, 10**9), st.integers(1, 3600))
def test_tumbling_single_window(ts, size_s):
    (start,) = windows_for(ts, WindowSpec.tumbling(size_s))
    assert start == ts // (size_s * 1000) * size_s * 1000


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="tumbling", size=0),
        dict(kind="hopping", size=10, slide=10),
        dict(kind="hopping", size=10, slide=3),
        dict(kind="tumbling", size=10, grace=-1),
    ],
)
def test_invalid_windows(kwargs):
    with pytest.raises(ValueError):
        WindowSpec(**kwargs)


def test_aggregate_merge_equals_sequential_adds():
    a, b, whole = Aggregate(), Aggregate(), Aggregate()
    for v in (3.0, -1.0, 7.5):
        a.add(v)
        whole.add(v)
    for v in (2.0, 10.0):
        b.add(v)
        whole.add(v)
    a.merge(b)
    assert a == whole
    assert a.as_tuple() == (21.5, 5, -1.0, 10.0)
    assert a.mean == pytest.approx(4.3)


def test_on_time_record_creates_cell_without_emission():
    state = KeyedWindowState(WindowSpec.tumbling(60))
    assert state.add("s", 5_000, 1.0) == []
    assert len(state) == 1


def test_late_record_after_close_is_dropped():
    state = KeyedWindowState(WindowSpec.tumbling(60))
    state.add("s", 100_000, 1.0)
    closed = state.add("s", 200_000, 1.0)
    assert [r.window_start for r in closed] == [60_000]
    assert state.add("s", 110_000, 5.0) == []
    assert state.dropped == 1


def test_grace_keeps_window_open():
    state = KeyedWindowState(WindowSpec.tumbling(60, grace=30))
    state.add("s", 10_000, 1.0)
    assert state.add("s", 80_000, 1.0) == []
    state.add("s", 20_000, 2.0)
    closed = state.add("s", 95_000, 1.0)
    assert closed[0].aggregate.as_tuple() == (3.0, 2, 1.0, 2.0)
    assert state.dropped == 0


def test_hopping_record_updates_three_cells():
    state = KeyedWindowState(WindowSpec.hopping(3 * 86400, 86400))
    state.add("s@01", 5 * DAY_MS + HOUR_MS, 4.0)
    assert len(state) == 3


def test_partially_late_record_still_counts_in_open_windows():
    state = KeyedWindowState(WindowSpec.hopping(3 * 86400, 86400))
    state.add("k", 5 * DAY_MS, 1.0)
    state.add("k", 7 * DAY_MS, 1.0)  # closes [3d, 6d) and [4d, 7d)
    state.add("k", 5 * DAY_MS + 1, 2.0)
    assert state.dropped == 0
    cells = {start: agg.count for start, _, agg in state.iter_cells()}
    assert cells[5 * DAY_MS] == 3


def test_early_results_snapshot_dirty_cells_only():
    state = KeyedWindowState(WindowSpec.tumbling(60, early_emit_interval=5))
    state.add("a", 1_000, 1.0)
    state.add("b", 2_000, 1.0)
    first = state.early_results()
    assert {r.key for r in first} == {"a", "b"}
    assert all(not r.final for r in first)
    assert state.early_results() == []
    state.add("a", 3_000, 2.0)
    (again,) = state.early_results()
    assert again.aggregate.as_tuple() == (3.0, 2, 1.0, 2.0)


records = st.lists(
    st.tuples(st.sampled_from("abcd"), st.integers(0, 600_000), st.integers(-50, 50)),
    max_size=200,
)


def _brute(recs, w):
    out = defaultdict(Aggregate)
    for k, ts, v in recs:
        for s in windows_for(ts, w):
            out[(k, s)].add(float(v))
    return {key: agg.as_tuple() for key, agg in out.items()}


@settings(max_examples=60, deadline=None)
@given(records, st.sampled_from([WindowSpec.tumbling(60), WindowSpec.hopping(120, 30)]))
def test_in_order_stream_equals_brute_force(recs, w):
    recs = sorted(recs, key=lambda r: r[1])
    state = KeyedWindowState(w)
    emitted = []
    for k, ts, v in recs:
        emitted += state.add(k, ts, float(v))
    emitted += state.close_all()
    assert state.dropped == 0
    got = {(r.key, r.window_start): r.aggregate.as_tuple() for r in emitted}
    assert got == _brute(recs, w)


@settings(max_examples=60, deadline=None)
@given(records)
def test_every_record_is_either_counted_or_dropped(recs):
    state = KeyedWindowState(WindowSpec.tumbling(60))
    emitted = []
    for k, ts, v in recs:
        emitted += state.add(k, ts, float(v))
    emitted += state.close_all()
    assert sum(r.aggregate.count for r in emitted) + state.dropped == len(recs)
