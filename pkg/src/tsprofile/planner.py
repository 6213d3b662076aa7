"""Analytical capacity model for the diagonal kernel.

Answers two questions without running anything: how many workers a given
memory bandwidth can feed, and how many floating-point operations the inner
loop performs per byte it streams.  The per-cell operation census below is
kept in lockstep with the engine kernel; a test asserts exact agreement
against an instrumented execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import PRECISIONS

REGIME_MEMORY_BOUND = "memory-bound"
REGIME_COMPUTE_BOUND = "compute-bound"
REGIME_BALANCED = "balanced"

#: Floating-point operations per steady-state diagonal cell.  Float
#: comparisons and absolute values count as operations; integer index
#: comparisons and loop bookkeeping do not.
CELL_OP_CENSUS = {
    "mul": 9,      # 2 update terms, 2 flat thresholds, 2 covariance, 2 denominator, 1 radicand
    "add_sub": 4,  # update subtract + carry add, covariance subtract, 1 - ratio
    "div": 1,      # correlation ratio
    "sqrt": 1,     # distance root
    "abs": 2,      # |mean| per side for the flat threshold
    "cmp": 10,     # 2 flat-threshold maxes, 2 flat tests, 2 clamps, 4 profile updates
}
FLOPS_PER_CELL = sum(CELL_OP_CENSUS.values())

#: Memory accesses per steady-state cell under a no-cache stream model:
#: 2 series reads (leading edges), 4 statistics reads, and read-modify-write
#: of both profile sides' distance and index elements (8 accesses).
ACCESSES_PER_CELL = {"series": 2, "stats": 4, "profile": 8}
ELEMENT_WIDTH = {"double": 8, "single": 4}


@dataclass(frozen=True)
class PlanReport:
    """Capacity summary for one bandwidth / per-worker-demand point."""

    balanced_workers: int
    aggregate_demand: float
    regime: str
    requested_workers: int
    requested_demand: float
    bandwidth: float
    per_worker_demand: float
    arithmetic_intensity: float | None = None


def _classify(bandwidth, per_worker_demand, requested_workers):
    demand = requested_workers * per_worker_demand
    if demand > bandwidth:
        return REGIME_MEMORY_BOUND, demand
    if bandwidth - demand > per_worker_demand:
        return REGIME_COMPUTE_BOUND, demand
    return REGIME_BALANCED, demand


def balanced_workers(bandwidth, per_worker_demand, requested_workers=None):
    """Workers that exactly saturate ``bandwidth`` at ``per_worker_demand``.

    The balanced count is floor(bandwidth / per_worker_demand).  The regime
    classifies ``requested_workers`` (default: the balanced count itself):
    memory-bound when the requested aggregate demand exceeds the bandwidth,
    compute-bound when it falls short by more than one worker's demand.
    """
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if not per_worker_demand > 0:
        raise ValueError(f"per-worker demand must be positive, got {per_worker_demand}")
    workers = int(math.floor(bandwidth / per_worker_demand))
    if requested_workers is None:
        requested_workers = workers
    elif requested_workers < 1:
        raise ValueError(f"requested workers must be >= 1, got {requested_workers}")
    regime, requested_demand = _classify(bandwidth, per_worker_demand, requested_workers)
    return PlanReport(
        balanced_workers=workers,
        aggregate_demand=workers * per_worker_demand,
        regime=regime,
        requested_workers=requested_workers,
        requested_demand=requested_demand,
        bandwidth=float(bandwidth),
        per_worker_demand=float(per_worker_demand),
    )


def bytes_per_cell(precision="double"):
    if precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {PRECISIONS}, got {precision!r}")
    return sum(ACCESSES_PER_CELL.values()) * ELEMENT_WIDTH[precision]


def arithmetic_intensity(m, precision="double", batch_width=8):
    """FLOP per byte of the steady-state inner loop.

    The census is per cell, so the result is independent of the series
    length and (in this model) of the window length; window length and
    batch width are validated as kernel parameters only.  Halving the
    element width doubles the intensity at a fixed operation count.
    """
    if m < 4:
        raise ValueError(f"window length m must be >= 4, got {m}")
    if batch_width < 1:
        raise ValueError(f"batch_width must be >= 1, got {batch_width}")
    return FLOPS_PER_CELL / bytes_per_cell(precision)


def census_lines(precision="double"):
    """Human-readable census used by the CLI plan report."""
    width = ELEMENT_WIDTH[precision]
    lines = [
        "Per-cell operation census (steady-state diagonal cell):",
        "  dot-product update: 2 mul + 2 add/sub (correction term, prefix add)",
        "  flat thresholds:    2 abs + 2 cmp (max with 1) + 2 mul + 2 cmp",
        "  distance:           q - m*(mu_i*mu_j) [2 mul + 1 sub], m*(sig_i*sig_j) [2 mul],",
        "                      1 div, 1 - ratio [1 sub], 2m*(...) [1 mul], 2 clamp cmp, 1 sqrt",
        "  profile updates:    4 cmp (less-than and tie-equality, both sides)",
        f"  total: {FLOPS_PER_CELL} FLOP per cell "
        f"(mul {CELL_OP_CENSUS['mul']}, add/sub {CELL_OP_CENSUS['add_sub']}, "
        f"div {CELL_OP_CENSUS['div']}, sqrt {CELL_OP_CENSUS['sqrt']}, "
        f"abs {CELL_OP_CENSUS['abs']}, cmp {CELL_OP_CENSUS['cmp']})",
        "Per-cell memory traffic (no-cache stream model):",
        f"  2 series reads + 4 statistics reads + 8 profile read-modify-write accesses,",
        f"  {sum(ACCESSES_PER_CELL.values())} accesses x {width} B = "
        f"{bytes_per_cell(precision)} B per cell ({precision} precision)",
    ]
    return lines
