"""Correlation between projected ensembles and a historical series.

Correlations are computed on price levels by default (a log-price variant
is available for sensitivity checks), path by path, and folded into a
running mean over the ensemble index.  The fold is an exact serial sum, so
reordering the ensemble cannot move the final average.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .sde import ProjectionEnsemble


@dataclass(frozen=True)
class CorrelationTrace:
    """Per-path correlations and their running mean.

    per_path[n] is the correlation of ensemble member n with the historical
    series (members with no defined correlation are excluded before the
    fold); cumulative[n] is the mean of per_path[: n + 1].
    """

    per_path: np.ndarray = field(repr=False)
    cumulative: np.ndarray = field(repr=False)
    n_excluded: int = 0

    def __post_init__(self) -> None:
        per_path = np.asarray(self.per_path, dtype=float)
        cumulative = np.asarray(self.cumulative, dtype=float)
        if per_path.ndim != 1 or cumulative.shape != per_path.shape:
            raise ValueError("per_path and cumulative must be vectors of equal length")
        if per_path.size == 0:
            raise ValueError("trace needs at least one defined correlation")
        for name, arr in (("per_path", per_path), ("cumulative", cumulative)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            if np.any(np.abs(arr) > 1.0 + 1e-12):
                raise ValueError(f"{name} must lie in [-1, 1]")
        per_path.setflags(write=False)
        cumulative.setflags(write=False)
        object.__setattr__(self, "per_path", per_path)
        object.__setattr__(self, "cumulative", cumulative)

    def __len__(self) -> int:
        return int(self.per_path.size)

    @property
    def final_mean(self) -> float:
        return float(self.cumulative[-1])


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation of two equal-length vectors.

    Returns None when either vector is constant: the coefficient divides by
    both standard deviations, so there is no defined value to report and
    pretending 0 would smuggle an answer into downstream averages.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise ValueError(f"need equal-length vectors, got shapes {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValueError("correlation needs at least 2 points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    dx = x - math.fsum(x) / x.size
    dy = y - math.fsum(y) / y.size
    sx = math.fsum(dx * dx)
    sy = math.fsum(dy * dy)
    if sx == 0.0 or sy == 0.0:
        return None
    r = math.fsum(dx * dy) / math.sqrt(sx * sy)
    # Rounding may push |r| a hair over 1 for collinear inputs.
    return max(-1.0, min(1.0, r))


def trace_from_levels(price_rows: np.ndarray, historical: np.ndarray,
                      on: str = "levels") -> CorrelationTrace:
    """Fold per-row correlations with ``historical`` into a running mean.

    Rows are price paths sampled on the same grid as the historical levels,
    so the two must have equal length.  ``on="log"`` correlates log-prices
    instead of the raw levels.  Rows with undefined correlation (constant
    prices, or a constant historical series making every row undefined)
    cannot contribute; the former are skipped with a warning, the latter is
    an error.
    """
    if on not in ("levels", "log"):
        raise ValueError(f"on must be 'levels' or 'log', got {on!r}")
    price_rows = np.asarray(price_rows, dtype=float)
    historical = np.asarray(historical, dtype=float)
    if price_rows.ndim != 2:
        raise ValueError(f"need a matrix of price rows, got shape {price_rows.shape}")
    if historical.ndim != 1 or historical.size != price_rows.shape[1]:
        raise ValueError(
            f"historical length {historical.size} does not match "
            f"path length {price_rows.shape[1]}"
        )
    if on == "log":
        if np.any(price_rows <= 0.0) or np.any(historical <= 0.0):
            raise ValueError("log correlation needs strictly positive prices")
        price_rows = np.log(price_rows)
        historical = np.log(historical)
    per_path: list[float] = []
    n_excluded = 0
    for i, row in enumerate(price_rows):
        r = pearson(row, historical)
        if r is None:
            n_excluded += 1
            warnings.warn(
                f"ensemble member {i} has no defined correlation; excluding it",
                stacklevel=2,
            )
            continue
        per_path.append(r)
    if not per_path:
        raise ValueError("no ensemble member has a defined correlation")
    values = np.array(per_path)
    # Exact prefix sums: the running mean must not depend on fold order.
    cumulative = np.array([
        math.fsum(values[: n + 1]) / (n + 1) for n in range(values.size)
    ])
    return CorrelationTrace(per_path=values, cumulative=cumulative,
                            n_excluded=n_excluded)


def correlation_trace(ensemble: ProjectionEnsemble, historical: np.ndarray,
                      on: str = "levels") -> CorrelationTrace:
    """Correlate every ensemble member with the historical levels."""
    return trace_from_levels(ensemble.price_matrix(), historical, on=on)
