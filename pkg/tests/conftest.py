import numpy as np
import pytest

from tsprofile import matrix_profile


def naive_window_stats(x, m):
    """Two-pass per-window mean and population sigma, the reference method."""
    x = np.asarray(x, dtype=np.float64)
    length = x.shape[0] - m + 1
    means = np.empty(length)
    stds = np.empty(length)
    for i in range(length):
        w = x[i : i + m]
        mu = w.mean()
        means[i] = mu
        stds[i] = np.sqrt(((w - mu) ** 2).mean())
    return means, stds


def sine_with_anomaly(n=500, period=50, lo=250, hi=270):
    """Periodic signal with a flattened stretch over [lo, hi] inclusive."""
    t = np.arange(n, dtype=np.float64)
    x = np.sin(2.0 * np.pi * t / period)
    x[lo : hi + 1] = x[lo]
    return x


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile both dtype specializations before any timing-sensitive test."""
    x = np.random.default_rng(0).standard_normal(256)
    matrix_profile(x, m=16, precision="double", workers=2)
    matrix_profile(x, m=16, precision="single")
