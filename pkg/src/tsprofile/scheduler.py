"""Static diagonal scheduling with balanced pairing.

Diagonal k of the implicit distance matrix holds the cells (i, i+k) and has
(n-m+1) - k of them.  Offsets 0..exclusion are skipped (self and trivial
matches).  Pairing offset k with offset (n-m+1) + exclusion - k makes every
pair cover exactly ``target = (n-m+1) - exclusion`` cells, so dealing pairs
round-robin keeps workers balanced to within one pair regardless of series
length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiagonalSchedule:
    """Per-worker diagonal assignments.

    ``assignments`` holds each worker's offsets in execution order (after the
    ordering mode is applied); ``pairs`` records the balanced pairs as dealt,
    with the optional unpaired middle offset appearing as a 1-tuple.
    """

    assignments: tuple[tuple[int, ...], ...]
    pairs: tuple[tuple[tuple[int, ...], ...], ...]
    target: int
    ordering: str
    seed: int
    profile_length: int
    exclusion: int

    @property
    def workers(self):
        return len(self.assignments)

    def diagonal_length(self, offset):
        return self.profile_length - offset

    def cells_per_worker(self):
        return [sum(self.profile_length - k for k in a) for a in self.assignments]

    def total_diagonals(self):
        return sum(len(a) for a in self.assignments)


def schedule_diagonals(n, m, exclusion, workers, ordering="random", seed=0):
    """Partition the computable diagonals among workers in balanced pairs.

    Pairs are built outermost-first (first with last, second with
    penultimate, ...) and dealt round-robin; an unpaired middle offset goes
    to the worker with the fewest assigned cells (lowest id on ties).
    ``ordering="sequential"`` sorts each worker's list ascending;
    ``ordering="random"`` applies a per-worker seeded shuffle, which
    preserves the anytime property of an interrupted run.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if n <= m:
        raise ValueError(f"series length {n} must exceed window length {m}")
    if exclusion < 0:
        raise ValueError(f"exclusion must be >= 0, got {exclusion}")
    length = n - m + 1
    first, last = exclusion + 1, n - m
    if first > last:
        raise ValueError(
            f"no computable diagonals: exclusion {exclusion} >= n - m = {n - m}"
        )
    target = length - exclusion

    lo, hi = first, last
    dealt = [[] for _ in range(workers)]  # pairs per worker, deal order
    w = 0
    while lo < hi:
        dealt[w].append((lo, hi))
        lo += 1
        hi -= 1
        w = (w + 1) % workers
    if lo == hi:
        cells = [target * len(p) for p in dealt]
        w_min = min(range(workers), key=lambda i: (cells[i], i))
        dealt[w_min].append((lo,))

    assignments = []
    for wid in range(workers):
        offsets = [k for pair in dealt[wid] for k in pair]
        if ordering == "sequential":
            offsets.sort()
        elif ordering == "random":
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), wid]))
            rng.shuffle(offsets)
        else:
            raise ValueError(f"unknown ordering {ordering!r}")
        assignments.append(tuple(int(k) for k in offsets))

    return DiagonalSchedule(
        assignments=tuple(assignments),
        pairs=tuple(tuple(p) for p in dealt),
        target=target,
        ordering=ordering,
        seed=int(seed),
        profile_length=length,
        exclusion=int(exclusion),
    )
