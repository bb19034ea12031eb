"""Discrete Brownian motion on a time grid.

A path starts at exactly 0.0 and accumulates independent Gaussian increments
with variance equal to the interval length.  Each path is tied to one random
stream, so ensembles are reproducible path-by-path no matter how the work is
split across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import TimeGrid
from .rng import SeedSpec, stream


@dataclass(frozen=True)
class BrownianPath:
    """Sampled values of one Brownian path on a grid.

    values[k] is the path at grid.times[k]; lengths must agree.  A path
    sampled from the origin has values[0] == 0.0 exactly.
    """

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size != len(self.grid):
            raise ValueError(
                f"values length {values.size} does not match grid length {len(self.grid)}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __repr__(self) -> str:
        return f"BrownianPath({self.grid!r})"


def sample_path(grid: TimeGrid, seed: SeedSpec) -> BrownianPath:
    """Draw one path on the grid from the stream named by ``seed``.

    Increment k is sqrt(t_k - t_{k-1}) times a fresh standard normal, so its
    variance is the interval length; increments over disjoint intervals come
    from disjoint draws and are independent.
    """
    gen = stream(seed)
    z = gen.standard_normal(grid.n_steps)
    values = np.empty(len(grid))
    values[0] = 0.0
    np.cumsum(np.sqrt(grid.dt) * z, out=values[1:])
    return BrownianPath(grid, values)


def increments(path: BrownianPath) -> np.ndarray:
    """Successive differences values[k] - values[k-1]."""
    return np.diff(path.values)


def restrict(path: BrownianPath, up_to: float) -> BrownianPath:
    """History of the path up to and including a grid time.

    The result exposes no value beyond ``up_to``; adapted integrands receive
    their information through this and nothing else.  Restricting to t_0
    gives the single-point origin history.
    """
    idx = path.grid.index_of(up_to)
    return BrownianPath(TimeGrid(path.grid.times[: idx + 1]), path.values[: idx + 1])


def sample_paths(
    grid: TimeGrid,
    master_seed: int,
    n_paths: int,
    first_stream: int = 0,
    threads: int = 1,
) -> np.ndarray:
    """Matrix of paths, one row per stream.

    Row i reproduces sample_path(grid, SeedSpec(master_seed, first_stream+i))
    bit for bit.  ``threads`` only caps the worker pool; the output is
    identical for every thread count because streams are pre-assigned.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    sqrt_dt = np.sqrt(grid.dt)
    n_steps = grid.n_steps
    out = np.empty((n_paths, len(grid)))

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            gen = stream(SeedSpec(master_seed, first_stream + i))
            z = gen.standard_normal(n_steps)
            out[i, 0] = 0.0
            np.cumsum(sqrt_dt * z, out=out[i, 1:])

    _run_chunked(fill, n_paths, threads)
    return out


def _run_chunked(fill, n_rows: int, threads: int) -> None:
    """Apply fill(lo, hi) over [0, n_rows) in disjoint chunks.

    Rows are partitioned up front, so scheduling order cannot change the
    result; threads > 1 merely overlaps the work.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or n_rows < 2:
        fill(0, n_rows)
        return
    n_chunks = min(threads * 4, n_rows)
    bounds = np.linspace(0, n_rows, n_chunks + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(fill, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for fut in futures:
            fut.result()
