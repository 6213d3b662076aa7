"""Parallel diagonal execution over worker-private profiles.

Each worker traverses its assigned diagonals with the batched inner loop:
the dot-product correction terms of a batch are formed independently per
lane, a sequential prefix pass folds the carried dot product through the
batch (the one loop with a true dependency), the carry-out feeds the next
batch, and distances plus min-updates are applied per lane.  The carried
dot product is always advanced as ``q + (add - sub)``, so results are
bit-identical for every batch width.  Updates keep the lexicographically
smaller (distance, neighbor index) pair, which makes the merged profile
independent of worker count, ordering, and update order.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    EPS_SCALE,
    NO_NEIGHBOR,
    Profile,
    RunConfig,
    WindowStats,
    _dot_seq,
    _zdist,
    precompute_stats,
    validate_series,
)
from .scheduler import schedule_diagonals

_KERNEL_OPTS = dict(nogil=True, cache=True, fastmath=False, error_model="numpy")


@dataclass
class RunResult:
    """Outcome of one profile run, complete or budget-interrupted."""

    profile: Profile
    diagonals_completed: int
    total_diagonals: int
    elapsed: float
    completed: bool
    cells: int


@njit(**_KERNEL_OPTS)
def _diagonal_kernel(values, means, stds, k, P, I, m, batch_width,
                     m_f, two_m, four_m, one, zero, eps_scale, terms):
    length = P.shape[0] - k

    # first cell (0, k): direct dot product
    q = _dot_seq(values, 0, k, m)
    d = _zdist(q, means[0], stds[0], means[k], stds[k],
               m_f, two_m, four_m, one, zero, eps_scale)
    lt = d < P[0]
    eq = d == P[0]
    if lt or (eq and k < I[0]):
        P[0] = d
        I[0] = k
    lt = d < P[k]
    eq = d == P[k]
    if lt or (eq and 0 < I[k]):
        P[k] = d
        I[k] = 0

    c = 1
    while c < length:
        b = min(batch_width, length - c)
        # correction terms, one independent lane per cell
        for l in range(b):
            terms[l] = (values[c + m - 1 + l] * values[c + k + m - 1 + l]
                        - values[c - 1 + l] * values[c + k - 1 + l])
        # sequential prefix accumulation; carry-out feeds the next batch
        terms[0] = terms[0] + q
        for l in range(1, b):
            terms[l] = terms[l] + terms[l - 1]
        q = terms[b - 1]
        # per-lane distance and min-update of both sides
        for l in range(b):
            i = c + l
            j = i + k
            d = _zdist(terms[l], means[i], stds[i], means[j], stds[j],
                       m_f, two_m, four_m, one, zero, eps_scale)
            pi = P[i]
            lt = d < pi
            eq = d == pi
            if lt or (eq and j < I[i]):
                P[i] = d
                I[i] = j
            pj = P[j]
            lt = d < pj
            eq = d == pj
            if lt or (eq and i < I[j]):
                P[j] = d
                I[j] = i
        c += b
    return length


@njit(**_KERNEL_OPTS)
def _diagonals_kernel(values, means, stds, offsets, P, I, m, batch_width,
                      m_f, two_m, four_m, one, zero, eps_scale):
    terms = np.empty(batch_width, dtype=values.dtype)
    cells = 0
    for di in range(offsets.shape[0]):
        cells += _diagonal_kernel(values, means, stds, offsets[di], P, I, m,
                                  batch_width, m_f, two_m, four_m, one, zero,
                                  eps_scale, terms)
    return cells


def _kernel_consts(dtype, m, eps_scale):
    s = np.dtype(dtype).type
    return (s(m), s(2 * m), s(4 * m), s(1.0), s(0.0), s(eps_scale))


def compute_diagonal(series, stats, offset, profile, batch_width=8, eps_scale=None):
    """Evaluate every cell (i, i+offset) of one diagonal into ``profile``.

    The profile must be private to the caller; it is updated in place and
    returned.  ``series``, ``stats`` and ``profile`` must share one dtype.
    """
    x = np.ascontiguousarray(series)
    if not isinstance(stats, WindowStats):
        raise TypeError("stats must be a WindowStats")
    n = x.shape[0]
    m = stats.m
    length = n - m + 1
    if len(profile) != length or len(stats) != length:
        raise ValueError("profile/stats length does not match the series and window")
    if not 1 <= offset <= n - m:
        raise ValueError(f"diagonal offset {offset} out of range [1, {n - m}]")
    if batch_width < 1:
        raise ValueError(f"batch_width must be >= 1, got {batch_width}")
    if not (x.dtype == stats.means.dtype == profile.distances.dtype):
        raise ValueError("series, stats, and profile must share one dtype")
    if eps_scale is None:
        eps_scale = EPS_SCALE["single" if x.dtype == np.float32 else "double"]
    consts = _kernel_consts(x.dtype, m, eps_scale)
    terms = np.empty(batch_width, dtype=x.dtype)
    _diagonal_kernel(x, stats.means, stats.stddevs, int(offset),
                     profile.distances, profile.indices, int(m),
                     int(batch_width), *consts, terms)
    return profile


def reduce_profiles(profiles):
    """Merge worker-private profiles by the (distance, index) tie rule.

    Smaller distance wins; at exactly equal distance the smaller neighbor
    index wins.  A single profile is returned unchanged (as a copy).
    """
    if not profiles:
        raise ValueError("need at least one profile to reduce")
    first = profiles[0]
    for p in profiles[1:]:
        if len(p) != len(first):
            raise ValueError("profiles have mismatched lengths")
        if p.m != first.m:
            raise ValueError("profiles have mismatched window lengths")
        if p.distances.dtype != first.distances.dtype:
            raise ValueError("profiles have mismatched dtypes")
    merged = first.copy()
    P, I = merged.distances, merged.indices
    for p in profiles[1:]:
        better = (p.distances < P) | ((p.distances == P) & (p.indices < I))
        np.copyto(P, p.distances, where=better)
        np.copyto(I, p.indices, where=better)
    return merged


def _budget_quotas(lengths, budget):
    """Deterministic per-worker diagonal quotas for a global budget.

    Spends the budget along a round-robin interleaving of the workers'
    assignment lists, so the diagonals completed under a smaller budget are
    always a subset of those completed under a larger one.
    """
    quotas = [0] * len(lengths)
    left = budget
    pos = 0
    while left > 0:
        advanced = False
        for w, ln in enumerate(lengths):
            if pos < ln:
                advanced = True
                quotas[w] += 1
                left -= 1
                if left == 0:
                    break
        if not advanced:
            break
        pos += 1
    return quotas


def run(values, config, progress=None):
    """Compute the matrix profile of a series under ``config``.

    Precomputes window statistics, schedules the diagonals, executes them on
    ``config.workers`` independent lanes over worker-private profiles, and
    merges the private profiles into the result.  ``progress``, if given, is
    called as ``progress(diagonals_completed, total)`` at every diagonal
    completion, possibly from any lane.
    """
    t0 = time.perf_counter()
    if not isinstance(config, RunConfig):
        raise TypeError("config must be a RunConfig")
    x = validate_series(values, dtype=config.dtype)
    n = x.shape[0]
    config.validate(n)
    m = config.m
    stats = precompute_stats(x, m)
    sched = schedule_diagonals(
        n, m, config.resolved_exclusion, config.workers, config.ordering, config.seed
    )
    length = n - m + 1
    total = sched.total_diagonals()
    lane_lengths = [len(a) for a in sched.assignments]
    if config.budget_diagonals is not None:
        quotas = _budget_quotas(lane_lengths, min(config.budget_diagonals, total))
    else:
        quotas = lane_lengths
    deadline = None
    if config.budget_ms is not None:
        deadline = t0 + config.budget_ms / 1000.0

    consts = _kernel_consts(config.dtype, m, config.eps_scale)
    means, stds = stats.means, stats.stddevs
    counter_lock = threading.Lock()
    counter = [0]

    def lane(wid):
        offsets = np.asarray(sched.assignments[wid][: quotas[wid]], dtype=np.int64)
        P = np.full(length, np.inf, dtype=config.dtype)
        I = np.full(length, NO_NEIGHBOR, dtype=config.index_dtype)
        done = 0
        cells = 0
        if progress is None and deadline is None:
            if offsets.shape[0]:
                cells = int(_diagonals_kernel(x, means, stds, offsets, P, I,
                                              m, config.batch_width, *consts))
            done = offsets.shape[0]
        else:
            terms = np.empty(config.batch_width, dtype=config.dtype)
            for k in offsets:
                if deadline is not None and time.perf_counter() >= deadline:
                    break
                cells += int(_diagonal_kernel(x, means, stds, int(k), P, I, m,
                                              config.batch_width, *consts, terms))
                done += 1
                if progress is not None:
                    with counter_lock:
                        counter[0] += 1
                        snapshot = counter[0]
                    progress(snapshot, total)
        return Profile(P, I, m), done, cells

    if config.workers == 1:
        outcomes = [lane(0)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(lane, range(config.workers)))

    merged = reduce_profiles([o[0] for o in outcomes])
    done = sum(o[1] for o in outcomes)
    cells = sum(o[2] for o in outcomes)
    return RunResult(
        profile=merged,
        diagonals_completed=done,
        total_diagonals=total,
        elapsed=time.perf_counter() - t0,
        completed=done == total,
        cells=cells,
    )


def matrix_profile(values, m, progress=None, **config_fields):
    """Convenience wrapper: build a RunConfig from keywords and run it."""
    return run(values, RunConfig(m=m, **config_fields), progress=progress)


def instrumented_diagonal(series, stats, offset, batch_width=8,
                          eps_scale=EPS_SCALE["double"]):
    """Pure-Python mirror of ``compute_diagonal`` that counts float ops.

    Replicates the kernel's arithmetic (same association, same branches) in
    float64 so its outputs are bit-identical to the compiled kernel, and
    tallies the operations executed for the steady-state cells (everything
    after the first cell).  Integer index comparisons and loop bookkeeping
    are not counted.  Returns ``(profile, ops, events, cells)`` where
    ``events`` counts degenerate paths (flat windows, clamps, distance
    ties) that would make the per-cell census uneven.
    """
    x = np.asarray(series, dtype=np.float64)
    n = x.shape[0]
    m = stats.m
    length_profile = n - m + 1
    if not 1 <= offset <= n - m:
        raise ValueError(f"diagonal offset {offset} out of range [1, {n - m}]")
    means = np.asarray(stats.means, dtype=np.float64)
    stds = np.asarray(stats.stddevs, dtype=np.float64)
    P = np.full(length_profile, np.inf)
    I = np.full(length_profile, NO_NEIGHBOR, dtype=np.int64)
    m_f, two_m, four_m = float(m), float(2 * m), float(4 * m)
    ops = {"mul": 0, "add_sub": 0, "div": 0, "sqrt": 0, "abs": 0, "cmp": 0}
    events = {"flat": 0, "clamp": 0, "tie": 0}
    counting = False

    def zdist(q, mu_i, sig_i, mu_j, sig_j):
        def tick(op, k=1):
            if counting:
                ops[op] += k

        am_i = abs(mu_i)
        tick("abs")
        mx_i = am_i if am_i > 1.0 else 1.0
        tick("cmp")
        eps_i = eps_scale * mx_i
        tick("mul")
        am_j = abs(mu_j)
        tick("abs")
        mx_j = am_j if am_j > 1.0 else 1.0
        tick("cmp")
        eps_j = eps_scale * mx_j
        tick("mul")
        flat_i = sig_i < eps_i
        tick("cmp")
        flat_j = sig_j < eps_j
        tick("cmp")
        if flat_i and flat_j:
            events["flat"] += 1
            return 0.0
        if flat_i or flat_j:
            events["flat"] += 1
            return float(np.sqrt(two_m))
        cov = q - m_f * (mu_i * mu_j)
        tick("mul", 2)
        tick("add_sub")
        den = m_f * (sig_i * sig_j)
        tick("mul", 2)
        ratio = cov / den
        tick("div")
        rad = two_m * (1.0 - ratio)
        tick("add_sub")
        tick("mul")
        if rad < 0.0:
            events["clamp"] += 1
            return 0.0
        tick("cmp")
        if rad > four_m:
            events["clamp"] += 1
            return float(np.sqrt(four_m))
        tick("cmp")
        d = float(np.sqrt(rad))
        tick("sqrt")
        return d

    def update(i, j, d):
        if counting:
            ops["cmp"] += 2
        lt = d < P[i]
        eq = d == P[i]
        if eq and not lt:
            events["tie"] += 1
        if lt or (eq and j < I[i]):
            P[i] = d
            I[i] = j

    length = length_profile - offset
    q = x[0] * x[offset]
    for t in range(1, m):
        q += x[t] * x[offset + t]
    d = zdist(q, means[0], stds[0], means[offset], stds[offset])
    update(0, offset, d)
    update(offset, 0, d)

    counting = True
    terms = [0.0] * batch_width
    c = 1
    while c < length:
        b = min(batch_width, length - c)
        for l in range(b):
            terms[l] = (x[c + m - 1 + l] * x[c + offset + m - 1 + l]
                        - x[c - 1 + l] * x[c + offset - 1 + l])
            ops["mul"] += 2
            ops["add_sub"] += 1
        terms[0] = terms[0] + q
        ops["add_sub"] += 1
        for l in range(1, b):
            terms[l] = terms[l] + terms[l - 1]
            ops["add_sub"] += 1
        q = terms[b - 1]
        for l in range(b):
            i = c + l
            j = i + offset
            d = zdist(terms[l], means[i], stds[i], means[j], stds[j])
            update(i, j, d)
            update(j, i, d)
        c += b

    profile = Profile(P, I, m)
    return profile, ops, events, length
