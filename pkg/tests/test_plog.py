import pytest
from hypothesis import given, strategies as st

from scalebench.plog import (
    PartitionedLog,
    Record,
    UnknownGroup,
    UnknownTopic,
    fnv1a_64,
    partition_for_key,
)


def _fnv_reference(data: bytes) -> int:
    # textbook loop with explicit modulus, kept apart from the implementation
    h = 14695981039346656037
    for b in data:
        h = ((h ^ b) * 1099511628211) % 2**64
    return h


@pytest.mark.parametrize(
    "data, expected",
    [(b"", 0xCBF29CE484222325), (b"a", 0xAF63DC4C8601EC8C), (b"foobar", 0x85944171F73967E8)],
)
def test_fnv1a_published_vectors(data, expected):
    assert fnv1a_64(data) == expected


def test_partition_golden_value():
    assert fnv1a_64(b"s-17") == 0x46E5AC17C051AD49
    assert partition_for_key("s-17", 100) == 73


def test_single_partition_is_zero():
    assert partition_for_key("s-0", 1) == 0


def test_partition_count_must_be_positive():
    with pytest.raises(ValueError):
        partition_for_key("x", 0)


@given(st.text(max_size=40), st.integers(1, 1000))
def test_routing_is_pure_and_in_range(key, n):
    p = partition_for_key(key, n)
    assert 0 <= p < n
    assert p == partition_for_key(key, n)
    assert p == _fnv_reference(key.encode("utf-8")) % n


def _log(partitions=1):
    log = PartitionedLog()
    log.create_topic("t", partitions)
    return log


def test_append_returns_sequential_offsets():
    log = _log()
    assert log.append("t", Record("k", 0, 1.0)) == 0
    assert log.append("t", Record("k", 0, 2.0)) == 1
    assert [r.ingest_seq for r in log.topic("t").partitions[0]] == [0, 1]


def test_append_to_unknown_topic():
    with pytest.raises(UnknownTopic):
        PartitionedLog().append("nope", Record("k", 0, 0))


def test_explicit_partition_bounds():
    log = _log(2)
    with pytest.raises(ValueError):
        log.append("t", Record("k", 0, 0), partition=2)


def test_duplicate_topic_rejected():
    log = _log()
    with pytest.raises(ValueError):
        log.create_topic("t", 3)


def test_append_batch_matches_single_appends():
    a, b = _log(3), _log(3)
    rows = [(i % 3, f"k{i}", i, float(i)) for i in range(10)]
    for p, k, ts, v in rows:
        a.append("t", Record(k, ts, v), partition=p)
    b.append_batch("t", rows)
    assert a.topic("t").partitions == b.topic("t").partitions
    assert a.topic("t").log_seq == b.topic("t").log_seq


def _read(log, group, partition, n):
    for _ in range(n):
        assert log.poll(group, partition) is not None


def test_commit_without_reads():
    log = _log()
    log.register_group("g", "t")
    log.commit_offsets("g")
    assert log.group("g").committed_offsets == [0]


@pytest.mark.parametrize("read, lag", [(10, 0), (4, 6), (0, 10)])
def test_lag_after_partial_reads(read, lag):
    log = _log()
    for i in range(10):
        log.append("t", Record("k", i, i))
    log.register_group("g", "t")
    _read(log, "g", 0, read)
    log.commit_offsets("g")
    assert log.total_lag("t", "g") == lag


def test_lag_counts_only_committed_progress():
    log = _log()
    for i in range(5):
        log.append("t", Record("k", i, i))
    log.register_group("g", "t")
    _read(log, "g", 0, 5)
    assert log.total_lag("t", "g") == 5
    log.commit_offsets("g")
    assert log.total_lag("t", "g") == 0


def test_lag_empty_topic():
    log = _log()
    log.register_group("g", "t")
    assert log.total_lag("t", "g") == 0


def test_lag_hundred_appended_forty_committed():
    log = _log()
    for i in range(100):
        log.append("t", Record("k", i, i))
    log.register_group("g", "t")
    _read(log, "g", 0, 40)
    log.commit_offsets("g")
    assert log.total_lag("t", "g") == 60


def test_lag_sums_partitions():
    log = _log(2)
    for i in range(3):
        log.append("t", Record("a", i, i), partition=0)
    for i in range(7):
        log.append("t", Record("b", i, i), partition=1)
    log.register_group("g", "t")
    log.commit_offsets("g")
    assert log.total_lag("t", "g") == 10


def test_unknown_group():
    log = _log()
    with pytest.raises(UnknownGroup):
        log.total_lag("t", "missing")


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 5)), max_size=60))
def test_lag_conservation(ops):
    """appended == committed + lag, whatever the interleaving of reads and commits."""
    log = _log(4)
    log.register_group("g", "t")
    for part, reads in ops:
        log.append("t", Record("k", 0, 0), partition=part)
        for _ in range(reads):
            log.poll("g", part)
        if reads % 2:
            log.commit_offsets("g")
    assert len(log.topic("t")) == log.committed_count("g") + log.total_lag("t", "g")
    assert log.total_lag("t", "g") >= 0
