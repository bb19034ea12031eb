"""Partitions of a time interval.

Times are in trading days unless a caller chooses otherwise; the daily step
is 1.0 and calendar gaps are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing partition t_0 < t_1 < ... < t_n.

    A grid normally has at least two points.  Single-point grids arise only
    as degenerate history prefixes (restriction of a path to its origin) and
    support no mesh.
    """

    times: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("grid needs a one-dimensional, non-empty time array")
        if not np.all(np.isfinite(times)):
            raise ValueError("grid times must be finite")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("grid times must be strictly increasing")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return int(self.times.size)

    def __repr__(self) -> str:
        t = self.times
        return f"TimeGrid({t[0]:g}..{t[-1]:g}, {t.size} points)"

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    @property
    def n_steps(self) -> int:
        return int(self.times.size - 1)

    @property
    def dt(self) -> np.ndarray:
        """Interval lengths t_k - t_{k-1}, all positive."""
        return np.diff(self.times)

    @property
    def mesh(self) -> float:
        """Largest interval length."""
        if self.times.size < 2:
            raise ValueError("mesh undefined for a single-point grid")
        return float(np.max(self.dt))

    def index_of(self, t: float) -> int:
        """Position of t among the grid times; ValueError if absent."""
        idx = int(np.searchsorted(self.times, t))
        if idx >= self.times.size or self.times[idx] != t:
            raise ValueError(f"{t!r} is not a grid point")
        return idx


def uniform_grid(start: float, end: float, steps: int) -> TimeGrid:
    """Equispaced grid with the given number of steps (so steps+1 points)."""
    if not steps >= 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if not end > start:
        raise ValueError(f"need end > start, got [{start}, {end}]")
    return TimeGrid(np.linspace(start, end, steps + 1))


def refine(grid: TimeGrid) -> TimeGrid:
    """Insert the midpoint of every interval, keeping all original points."""
    times = grid.times
    if times.size < 2:
        raise ValueError("cannot refine a single-point grid")
    mids = times[:-1] + 0.5 * np.diff(times)
    out = np.empty(2 * times.size - 1)
    out[0::2] = times
    out[1::2] = mids
    return TimeGrid(out)
