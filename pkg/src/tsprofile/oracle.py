"""Brute-force reference profile, kept independent of the engine's algebra.

Distances here are computed by explicitly z-normalizing both windows and
taking the plain Euclidean distance, never through the closed form the
engine uses, so a shared algebra bug cannot hide in both implementations.
Intended for validation at small sizes only.
"""

from __future__ import annotations

import numpy as np

from .core import EPS_SCALE, NO_NEIGHBOR, Profile

#: Refuse profiles longer than this; the oracle is O(L^2 * m).
MAX_PROFILE_LENGTH = 8192


def _normalized_windows(x, m, eps_scale):
    """Z-normalized window matrix and the flat-window mask.

    Means and deviations are evaluated per window with a naive two-pass
    sweep (independent of the engine's sliding statistics).  Flat windows
    normalize to all-zero rows and are handled by the flat rules.
    """
    windows = np.lib.stride_tricks.sliding_window_view(x, m)
    mu = windows.mean(axis=1)
    sigma = np.sqrt(((windows - mu[:, None]) ** 2).mean(axis=1))
    flat = sigma < eps_scale * np.maximum(1.0, np.abs(mu))
    safe = np.where(flat, 1.0, sigma)
    normed = np.where(flat[:, None], 0.0, (windows - mu[:, None]) / safe[:, None])
    return normed, flat


def pair_distance(values, m, i, j, eps_scale=EPS_SCALE["double"]):
    """Distance between windows i and j via explicit normalization."""
    x = np.asarray(values, dtype=np.float64)
    for name, idx in (("i", i), ("j", j)):
        if not 0 <= idx <= x.shape[0] - m:
            raise ValueError(f"window start {name}={idx} out of range")
    windows = np.stack([x[i : i + m], x[j : j + m]])
    mu = windows.mean(axis=1)
    sigma = np.sqrt(((windows - mu[:, None]) ** 2).mean(axis=1))
    flat = sigma < eps_scale * np.maximum(1.0, np.abs(mu))
    if flat.all():
        return 0.0
    if flat.any():
        return float(np.sqrt(2.0 * m))
    a = (windows[0] - mu[0]) / sigma[0]
    b = (windows[1] - mu[1]) / sigma[1]
    return float(np.sqrt(((a - b) ** 2).sum()))


def brute_force_profile(values, m, exclusion=None, eps_scale=EPS_SCALE["double"]):
    """Reference profile by exhaustive pairwise distances, one row at a time.

    Applies the same flat-window and exclusion rules as the engine, and the
    same tie rule (smaller distance, then smaller neighbor index).  The full
    distance matrix is never materialized.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.shape[0]
    if m < 4:
        raise ValueError(f"window length m must be >= 4, got {m}")
    if n <= m:
        raise ValueError(f"series length {n} must exceed window length {m}")
    length = n - m + 1
    if length > MAX_PROFILE_LENGTH:
        raise ValueError(
            f"profile length {length} exceeds the oracle guard of {MAX_PROFILE_LENGTH}"
        )
    if exclusion is None:
        exclusion = m // 4
    if not 0 <= exclusion < n - m:
        raise ValueError(f"exclusion {exclusion} out of range [0, {n - m})")

    normed, flat = _normalized_windows(x, m, eps_scale)
    flat_dist = np.sqrt(2.0 * m)
    profile = Profile.empty(length, m, dtype=np.float64)
    for i in range(length):
        row = np.sqrt(((normed - normed[i]) ** 2).sum(axis=1))
        if flat[i]:
            row = np.where(flat, 0.0, flat_dist)
        else:
            row[flat] = flat_dist
        lo = max(0, i - exclusion)
        hi = min(length, i + exclusion + 1)
        row[lo:hi] = np.inf
        j = int(np.argmin(row))  # first occurrence == smallest index on ties
        profile.distances[i] = row[j]
        profile.indices[i] = j if np.isfinite(row[j]) else NO_NEIGHBOR
    return profile
