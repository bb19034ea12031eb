"""Self-contained statistical checks used to validate the samplers.

Nothing here touches the random streams, so these routines can sit in
judgement of them.  The normal CDF goes through the C library's erf, whose
absolute error is far below the 1e-7 the tests lean on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT_HALF = math.sqrt(0.5)


def normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x)."""
    return 0.5 * math.erfc(-x * _SQRT_HALF)


@dataclass(frozen=True)
class KsResult:
    """One-sample Kolmogorov-Smirnov comparison against N(0, 1).

    statistic is the sup distance between the empirical CDF and Phi;
    critical_1pct the asymptotic 1% threshold 1.63/sqrt(n); reject the
    comparison of the two.
    """

    statistic: float
    critical_1pct: float
    reject: bool
    n: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.statistic <= 1.0:
            raise ValueError(f"KS statistic must lie in [0, 1], got {self.statistic}")


def ks_normal(samples: np.ndarray) -> KsResult:
    """Kolmogorov-Smirnov test of ``samples`` against the standard normal.

    The statistic is max over order statistics x_(i) of
    max(i/n - Phi(x_(i)), Phi(x_(i)) - (i-1)/n).  Needs n >= 50 for the
    asymptotic critical value to be meaningful.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 50:
        raise ValueError(f"KS test needs at least 50 samples, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    cdf = np.array([normal_cdf(v) for v in x])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    statistic = float(max(d_plus, d_minus))
    critical = 1.63 / math.sqrt(n)
    return KsResult(statistic=statistic, critical_1pct=critical, reject=statistic > critical, n=n)


def sample_moments(samples: np.ndarray) -> tuple[float, float]:
    """Mean and unbiased variance, computed shift-stably.

    Two-pass: exact-summed mean first, then squared deviations from it, so
    samples with a huge common offset do not cancel catastrophically.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"need a vector of at least 2 samples, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    mean = math.fsum(x) / x.size
    dev = x - mean
    var = math.fsum(dev * dev) / (x.size - 1)
    return mean, var
