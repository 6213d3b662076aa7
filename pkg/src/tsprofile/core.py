"""Core types, rolling window statistics, and the distance kernels.

Everything here is a pure function over immutable inputs and is safe to call
from any number of threads.  The scalar kernels are compiled with numba and
shared with the engine, so library-level calls and the hot loop compute
bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.ndimage import maximum_filter1d, minimum_filter1d

#: Sentinel stored in a profile index before any neighbor has been recorded.
NO_NEIGHBOR = -1

PRECISIONS = ("double", "single")
ORDERINGS = ("random", "sequential")

#: Element dtype per precision mode.  Index vectors use a same-width integer
#: so the memory model of the planner halves exactly between modes.
DTYPES = {"double": np.float64, "single": np.float32}
INDEX_DTYPES = {"double": np.int64, "single": np.int32}

#: A window is treated as flat when sigma < eps_scale * max(1, |mu|).
EPS_SCALE = {"double": 1e-13, "single": 1e-5}

#: Rolling statistics restart their extended-precision accumulators every
#: this many windows, which bounds rounding-error growth independently of n.
_STATS_BLOCK = 4096

_KERNEL_OPTS = dict(nogil=True, cache=True, fastmath=False, error_model="numpy")


def validate_series(values, dtype=np.float64):
    """Validate and convert a time series to a contiguous 1-D float array.

    Rejects series shorter than 4 samples and any non-finite value (including
    values that overflow when cast to single precision).
    """
    with np.errstate(over="ignore"):
        x = np.ascontiguousarray(values, dtype=dtype)
    if x.ndim != 1:
        raise ValueError(f"series must be 1-D, got shape {x.shape}")
    if x.shape[0] < 4:
        raise ValueError(f"series must have at least 4 samples, got {x.shape[0]}")
    finite = np.isfinite(x)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise ValueError(f"series contains a non-finite value at position {bad}")
    return x


@dataclass(frozen=True)
class WindowStats:
    """Per-window means and population standard deviations for window length m."""

    means: np.ndarray
    stddevs: np.ndarray
    m: int

    def __len__(self):
        return self.means.shape[0]


@dataclass
class Profile:
    """A matrix profile: minimum distances and nearest-neighbor indices.

    Entries start at the +inf / NO_NEIGHBOR sentinels and only ever decrease
    (min-updates).  A finite distance always has a real neighbor index and
    vice versa.
    """

    distances: np.ndarray
    indices: np.ndarray
    m: int

    @classmethod
    def empty(cls, length, m, dtype=np.float64):
        dtype = np.dtype(dtype)
        idx_dtype = np.int32 if dtype == np.float32 else np.int64
        return cls(
            distances=np.full(length, np.inf, dtype=dtype),
            indices=np.full(length, NO_NEIGHBOR, dtype=idx_dtype),
            m=m,
        )

    def __len__(self):
        return self.distances.shape[0]

    def copy(self):
        return Profile(self.distances.copy(), self.indices.copy(), self.m)


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one profile computation.

    ``exclusion=None`` resolves to the default band of floor(m/4) diagonals
    next to the main diagonal.  ``budget_diagonals`` and ``budget_ms`` are
    mutually exclusive anytime budgets; either leaves a valid partial profile.
    """

    m: int
    exclusion: int | None = None
    precision: str = "double"
    workers: int = 1
    ordering: str = "random"
    seed: int = 0
    budget_diagonals: int | None = None
    budget_ms: float | None = None
    batch_width: int = 8

    @property
    def resolved_exclusion(self):
        return self.m // 4 if self.exclusion is None else self.exclusion

    @property
    def dtype(self):
        return np.dtype(DTYPES[self.precision])

    @property
    def index_dtype(self):
        return np.dtype(INDEX_DTYPES[self.precision])

    @property
    def eps_scale(self):
        return EPS_SCALE[self.precision]

    def validate(self, n):
        """Check every invariant against a series of length n."""
        if not isinstance(self.m, (int, np.integer)) or self.m < 4:
            raise ValueError(f"window length m must be an integer >= 4, got {self.m}")
        if n <= self.m:
            raise ValueError(f"series length {n} must exceed window length {self.m}")
        if self.precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {PRECISIONS}, got {self.precision!r}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        exclusion = self.resolved_exclusion
        if exclusion < 1:
            raise ValueError(f"exclusion width must be >= 1, got {exclusion}")
        if exclusion >= n - self.m:
            raise ValueError(
                f"exclusion width {exclusion} leaves no computable diagonal "
                f"(requires exclusion < n - m = {n - self.m})"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.batch_width < 1:
            raise ValueError(f"batch_width must be >= 1, got {self.batch_width}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")
        if self.budget_diagonals is not None and self.budget_ms is not None:
            raise ValueError("set at most one of budget_diagonals and budget_ms")
        if self.budget_diagonals is not None and self.budget_diagonals < 0:
            raise ValueError("budget_diagonals must be >= 0")
        if self.budget_ms is not None and self.budget_ms < 0:
            raise ValueError("budget_ms must be >= 0")


def precompute_stats(series, m):
    """Rolling mean and population standard deviation of every length-m window.

    O(n) sliding computation.  Sums run in extended precision over
    globally-centered values and restart every ``_STATS_BLOCK`` windows, so
    the result tracks a naive per-window two-pass evaluation to ~1e-13
    relative error even for very long series.  A window's sigma is exactly
    0.0 if and only if the window is constant (detected by a rolling range,
    not by the cancellation-prone sums).  Output arrays match the input
    dtype; float32 input yields float32 statistics computed in double.
    """
    x = np.asarray(series)
    out_dtype = x.dtype if x.dtype in (np.float32, np.float64) else np.float64
    n = x.shape[0]
    if not isinstance(m, (int, np.integer)) or m < 4:
        raise ValueError(f"window length m must be an integer >= 4, got {m}")
    if m >= n:
        raise ValueError(f"window length {m} must be smaller than series length {n}")
    length = n - m + 1

    center = np.longdouble(np.mean(x, dtype=np.float64))
    xc = x.astype(np.longdouble) - center
    means = np.empty(length, dtype=np.float64)
    var = np.empty(length, dtype=np.float64)
    start = 0
    while start < length:
        stop = min(start + _STATS_BLOCK, length)
        seg = xc[start : stop + m - 1]
        s1 = np.concatenate(([np.longdouble(0)], np.cumsum(seg)))
        s2 = np.concatenate(([np.longdouble(0)], np.cumsum(seg * seg)))
        cnt = stop - start
        w1 = (s1[m : m + cnt] - s1[:cnt]) / m
        w2 = (s2[m : m + cnt] - s2[:cnt]) / m
        means[start:stop] = np.asarray(w1 + center, dtype=np.float64)
        var[start:stop] = np.asarray(w2 - w1 * w1, dtype=np.float64)
        start = stop

    # rolling range == 0 identifies constant windows exactly
    xf = np.ascontiguousarray(x, dtype=np.float64)
    hi = maximum_filter1d(xf, size=m)[m // 2 : m // 2 + length]
    lo = minimum_filter1d(xf, size=m)[m // 2 : m // 2 + length]
    var[var < 0] = 0.0
    var[hi == lo] = 0.0
    return WindowStats(
        means=means.astype(out_dtype),
        stddevs=np.sqrt(var).astype(out_dtype),
        m=int(m),
    )


@njit(**_KERNEL_OPTS)
def _dot_seq(values, i, j, m):
    # strict left-to-right fold; the engine relies on this exact order
    q = values[i] * values[j]
    for t in range(1, m):
        q += values[i + t] * values[j + t]
    return q


@njit(inline="always", **_KERNEL_OPTS)
def _zdist(q, mu_i, sig_i, mu_j, sig_j, m_f, two_m, four_m, one, zero, eps_scale):
    # z-normalized Euclidean distance from the window dot product and stats.
    # All constants arrive pre-cast so float32 inputs stay in float32.
    am_i = abs(mu_i)
    mx_i = am_i if am_i > one else one
    am_j = abs(mu_j)
    mx_j = am_j if am_j > one else one
    flat_i = sig_i < eps_scale * mx_i
    flat_j = sig_j < eps_scale * mx_j
    if flat_i and flat_j:
        return zero
    if flat_i or flat_j:
        return np.sqrt(two_m)
    cov = q - m_f * (mu_i * mu_j)
    den = m_f * (sig_i * sig_j)
    ratio = cov / den
    rad = two_m * (one - ratio)
    # cancellation near perfect (anti-)correlation can push the radicand
    # just outside [0, 4m]; clamp to the mathematical range
    if rad < zero:
        return zero
    if rad > four_m:
        return np.sqrt(four_m)
    return np.sqrt(rad)


def dot_product(series, i, j, m):
    """Dot product of the two length-m windows starting at i and j."""
    x = np.asarray(series)
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)
    n = x.shape[0]
    if m < 1:
        raise ValueError(f"window length must be >= 1, got {m}")
    for name, idx in (("i", i), ("j", j)):
        if not 0 <= idx <= n - m:
            raise ValueError(f"window start {name}={idx} out of range [0, {n - m}]")
    return float(_dot_seq(np.ascontiguousarray(x), int(i), int(j), int(m)))


def update_dot(q_prev, t_im1, t_jm1, t_imm1, t_jmm1):
    """Advance a diagonal dot product by one cell.

    Returns Q[i, j] from Q[i-1, j-1]: drop the product of the departing
    samples, add the product of the arriving ones.  Evaluated as
    ``q + (add - sub)`` to match the engine's batched accumulation exactly.
    """
    return q_prev + (t_imm1 * t_jmm1 - t_im1 * t_jm1)


def distance(m, q, mu_i, sigma_i, mu_j, sigma_j, eps_scale=EPS_SCALE["double"]):
    """z-normalized Euclidean distance between two windows.

    ``q`` is the raw dot product of the windows; the stats are their means
    and population standard deviations.  Windows with sigma below
    ``eps_scale * max(1, |mu|)`` count as flat: two flat windows are at
    distance 0, a flat/non-flat pair at sqrt(2m).  Never returns NaN; the
    radicand is clamped to [0, 4m].
    """
    if m < 4:
        raise ValueError(f"window length m must be >= 4, got {m}")
    m_f = float(m)
    return float(
        _zdist(
            float(q),
            float(mu_i),
            float(sigma_i),
            float(mu_j),
            float(sigma_j),
            m_f,
            2.0 * m_f,
            4.0 * m_f,
            1.0,
            0.0,
            float(eps_scale),
        )
    )
