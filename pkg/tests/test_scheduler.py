import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsprofile import schedule_diagonals


def test_two_worker_pairing_example():
    # n=13, m=4, exclusion=1: offsets 2..9, target 10 - 1 = 9
    sched = schedule_diagonals(13, 4, 1, 2, ordering="sequential")
    assert sched.target == 9
    assert sched.pairs == (((2, 9), (4, 7)), ((3, 8), (5, 6)))
    assert sched.assignments == ((2, 4, 7, 9), (3, 5, 6, 8))
    assert all(
        sum(sched.diagonal_length(k) for k in pair) == 9
        for worker_pairs in sched.pairs
        for pair in worker_pairs
    )


def test_single_worker_gets_everything_once():
    sched = schedule_diagonals(13, 4, 1, 1, ordering="sequential")
    assert sched.assignments == ((2, 3, 4, 5, 6, 7, 8, 9),)


def test_balance_by_exhaustive_count():
    sched = schedule_diagonals(1000, 16, 4, 7, ordering="sequential")
    cells = sched.cells_per_worker()
    # recount from scratch
    length = 1000 - 16 + 1
    expected_total = sum(length - k for k in range(5, 1000 - 16 + 1))
    assert sum(cells) == expected_total
    assert max(cells) - min(cells) <= sched.target


def test_middle_offset_goes_to_least_loaded():
    # 3 computable offsets, 2 workers: one pair + a middle offset
    sched = schedule_diagonals(10, 4, 3, 2, ordering="sequential")
    # offsets 4..6: pair (4, 6) to worker 0, middle 5 to worker 1 (fewer cells)
    assert sched.pairs == (((4, 6),), ((5,),))


def test_random_ordering_is_seeded_permutation():
    a = schedule_diagonals(200, 8, 2, 3, ordering="random", seed=42)
    b = schedule_diagonals(200, 8, 2, 3, ordering="random", seed=42)
    c = schedule_diagonals(200, 8, 2, 3, ordering="random", seed=43)
    seq = schedule_diagonals(200, 8, 2, 3, ordering="sequential")
    assert a.assignments == b.assignments  # deterministic
    for wa, ws in zip(a.assignments, seq.assignments):
        assert sorted(wa) == list(ws)  # bijection on the sequential list
    assert a.assignments != c.assignments  # different seed, different order


def test_sequential_is_sorted():
    sched = schedule_diagonals(300, 8, 2, 4, ordering="sequential")
    for worker in sched.assignments:
        assert list(worker) == sorted(worker)


def test_errors():
    with pytest.raises(ValueError, match="workers"):
        schedule_diagonals(100, 8, 2, 0)
    with pytest.raises(ValueError, match="no computable"):
        schedule_diagonals(20, 8, 12, 2)
    with pytest.raises(ValueError, match="exceed"):
        schedule_diagonals(8, 8, 1, 2)
    with pytest.raises(ValueError, match="exclusion"):
        schedule_diagonals(100, 8, -1, 2)
    with pytest.raises(ValueError, match="ordering"):
        schedule_diagonals(100, 8, 2, 2, ordering="shuffled")


@given(
    n=st.integers(12, 600),
    m=st.integers(4, 64),
    workers=st.integers(1, 12),
    seed=st.integers(0, 2**32),
    ordering=st.sampled_from(["random", "sequential"]),
)
@settings(max_examples=150, deadline=None)
def test_partition_properties(n, m, workers, seed, ordering):
    if n <= m:
        n = m + 2
    exclusion = m // 4
    if exclusion >= n - m:
        n = m + exclusion + 2
    sched = schedule_diagonals(n, m, exclusion, workers, ordering, seed)
    length = n - m + 1

    # coverage: exact set partition of the computable offsets
    flat = [k for worker in sched.assignments for k in worker]
    assert sorted(flat) == list(range(exclusion + 1, n - m + 1))

    # pair identity: every full pair covers exactly `target` cells
    for worker_pairs in sched.pairs:
        for pair in worker_pairs:
            if len(pair) == 2:
                assert (length - pair[0]) + (length - pair[1]) == sched.target

    # balance
    cells = sched.cells_per_worker()
    assert max(cells) - min(cells) <= sched.target

    # determinism
    again = schedule_diagonals(n, m, exclusion, workers, ordering, seed)
    assert again.assignments == sched.assignments
