"""Stochastic integrals against discrete Brownian paths.

Integrands are evaluated at the left endpoint of each interval, using only
the path history available there.  The evaluation point is never the
midpoint or the right endpoint: moving it changes the limit object, which is
exactly the failure mode the left-endpoint rule exists to rule out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .brownian import BrownianPath, restrict, sample_paths
from .grid import TimeGrid, refine
from .rng import SeedSpec

_REL_ERR_FLOOR = 1e-12
_CHUNK_ROWS = 16384


class AdaptedIntegrand:
    """An integrand f(t, history) that sees the path only up to t.

    Subclasses implement eval; the integral routines hand it a restricted
    path, so peeking past t is structurally impossible.
    """

    def eval(self, t: float, history: BrownianPath) -> float:
        raise NotImplementedError


class InstantaneousIntegrand(AdaptedIntegrand):
    """Integrand of the form f(t, history) = g(t, history(t)).

    Depends on the path only through its current value, which admits a
    vectorized evaluation used by the Monte Carlo routines.  of_values must
    be a pure elementwise map.
    """

    def of_values(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, t: float, history: BrownianPath) -> float:
        out = self.of_values(np.asarray([t]), history.values[-1:])
        return float(out[0])


@dataclass(frozen=True)
class ConstantIntegrand(InstantaneousIntegrand):
    """f(t, history) = c."""

    value: float = 1.0

    def of_values(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(values, dtype=float), self.value)


@dataclass(frozen=True)
class CurrentValueIntegrand(InstantaneousIntegrand):
    """f(t, history) = history(t), the path's own value."""

    def of_values(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class SinCurrentValueIntegrand(InstantaneousIntegrand):
    """f(t, history) = sin(history(t)); bounded, for stress tests."""

    def of_values(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.sin(np.asarray(values, dtype=float))


@dataclass(frozen=True)
class StepProcess:
    """Piecewise-constant process on breakpoints t_0 < ... < t_{K-1}.

    values[j] governs the half-open interval starting at breakpoints[j], so
    a step process integrates by pairing values[j] with the path increment
    over [t_j, t_{j+1}].  K >= 2 breakpoints carry K-1 values.
    """

    breakpoints: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least 2 breakpoints")
        if not np.all(np.diff(bp) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if vals.ndim != 1 or vals.size != bp.size - 1:
            raise ValueError(
                f"expected {bp.size - 1} interval values, got {vals.size}"
            )
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals))):
            raise ValueError("breakpoints and values must be finite")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def value_at(self, t: float) -> float:
        """Value governing the interval that starts at or covers t.

        Right-continuous lookup; 0.0 outside [t_0, t_{K-1}), matching a
        process that vanishes off its support.
        """
        bp = self.breakpoints
        if t < bp[0] or t >= bp[-1]:
            return 0.0
        j = int(np.searchsorted(bp, t, side="right")) - 1
        return float(self.values[j])

    def as_integrand(self) -> "AdaptedIntegrand":
        return _StepIntegrand(self)


@dataclass(frozen=True)
class _StepIntegrand(InstantaneousIntegrand):
    """Left-endpoint view of a StepProcess; deterministic in t."""

    process: StepProcess

    def of_values(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.array([self.process.value_at(t) for t in np.asarray(times, dtype=float)])


@dataclass(frozen=True)
class IsometryReport:
    """Both sides of the second-moment identity for one integrand.

    lhs is the Monte Carlo mean of the squared integral, rhs the mean of the
    left-endpoint quadrature of f**2 over the same realizations.
    """

    lhs: float
    rhs: float
    rel_err: float
    n_paths: int


def _grid_indices_in(eval_grid: TimeGrid, path_grid: TimeGrid) -> np.ndarray:
    """Positions of eval_grid's times inside path_grid's; ValueError if absent."""
    idx = np.searchsorted(path_grid.times, eval_grid.times)
    ok = (idx < len(path_grid)) & (path_grid.times[np.minimum(idx, len(path_grid) - 1)] == eval_grid.times)
    if not np.all(ok):
        missing = eval_grid.times[~ok]
        raise ValueError(f"evaluation times not on the path grid: {missing[:3]}")
    return idx


def _left_values(f: AdaptedIntegrand, eval_grid: TimeGrid, path: BrownianPath,
                 idx: np.ndarray) -> np.ndarray:
    """f at each left endpoint of eval_grid, fed only the history there."""
    if isinstance(f, InstantaneousIntegrand):
        return np.asarray(
            f.of_values(eval_grid.times[:-1], path.values[idx[:-1]]), dtype=float
        )
    return np.array([
        f.eval(float(t), restrict(path, float(t))) for t in eval_grid.times[:-1]
    ])


def approximate_ito(f: AdaptedIntegrand, eval_grid: TimeGrid, path: BrownianPath) -> float:
    """Left-endpoint integral of f against the path over eval_grid.

    eval_grid must be a subset of the path's grid; a coarser evaluation grid
    against a finer path is how refinement comparisons share one driving
    path.
    """
    idx = _grid_indices_in(eval_grid, path.grid)
    dw = np.diff(path.values[idx])
    fvals = _left_values(f, eval_grid, path, idx)
    return float(np.sum(fvals * dw))


def integrate_step(phi: StepProcess, path: BrownianPath) -> float:
    """Integral of a step process: sum of values[j] * path increment over [t_j, t_{j+1}].

    Every breakpoint must be a path grid point.
    """
    bp_grid = TimeGrid(phi.breakpoints)
    idx = _grid_indices_in(bp_grid, path.grid)
    dw = np.diff(path.values[idx])
    return float(np.sum(phi.values * dw))


def left_step_approximant(f: AdaptedIntegrand, eval_grid: TimeGrid,
                          path: BrownianPath) -> StepProcess:
    """Step process freezing f at each left endpoint of eval_grid."""
    idx = _grid_indices_in(eval_grid, path.grid)
    return StepProcess(eval_grid.times, _left_values(f, eval_grid, path, idx))


def trailing_average_approximant(f: AdaptedIntegrand, eval_grid: TimeGrid,
                                 path: BrownianPath) -> StepProcess:
    """Step process averaging f over the path grid's points one coarse interval back.

    The value on [t_j, t_{j+1}) averages f at the path-grid times inside
    (t_{j-1}, t_j], all of which are observable at t_j, so the result is
    still adapted.  The first interval has no past to average and keeps the
    left-endpoint value.  A second family of approximants for the same f;
    its integrals must approach the left-endpoint family's under refinement.
    """
    idx = _grid_indices_in(eval_grid, path.grid)
    full_times = path.grid.times
    out = np.empty(len(eval_grid) - 1)
    for j in range(out.size):
        if j == 0:
            window = slice(idx[0], idx[0] + 1)
        else:
            window = slice(idx[j - 1] + 1, idx[j] + 1)
        ts = full_times[window]
        if isinstance(f, InstantaneousIntegrand):
            vals = np.asarray(f.of_values(ts, path.values[window]), dtype=float)
        else:
            vals = np.array([f.eval(float(t), restrict(path, float(t))) for t in ts])
        out[j] = np.mean(vals)
    return StepProcess(eval_grid.times, out)


def _integrals_matrix(f: AdaptedIntegrand, eval_grid: TimeGrid, path_grid: TimeGrid,
                      values: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """approximate_ito per row of a path matrix sampled on path_grid."""
    sub = values[:, idx]
    dw = np.diff(sub, axis=1)
    if isinstance(f, InstantaneousIntegrand):
        fvals = f.of_values(eval_grid.times[:-1], sub[:, :-1])
        return np.sum(fvals * dw, axis=1)
    out = np.empty(values.shape[0])
    for i in range(values.shape[0]):
        path = BrownianPath(path_grid, values[i])
        out[i] = approximate_ito(f, eval_grid, path)
    return out


def isometry_check(f: AdaptedIntegrand, grid: TimeGrid, n_paths: int,
                   seed: SeedSpec, threads: int = 1) -> IsometryReport:
    """Compare E[(integral)^2] with E[quadrature of f^2] over shared paths.

    Streams seed.stream_id + i drive path i, so the two sides use common
    random numbers and the report is reproducible for any thread count.
    """
    if n_paths < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    dt = grid.dt
    all_idx = np.arange(len(grid))
    lhs_terms: list[float] = []
    rhs_terms: list[float] = []
    for lo in range(0, n_paths, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n_paths)
        values = sample_paths(grid, seed.master_seed, hi - lo,
                              first_stream=seed.stream_id + lo, threads=threads)
        integrals = _integrals_matrix(f, grid, grid, values, all_idx)
        if isinstance(f, InstantaneousIntegrand):
            fvals = f.of_values(grid.times[:-1], values[:, :-1])
        else:
            fvals = np.array([
                _left_values(f, grid, BrownianPath(grid, row), all_idx) for row in values
            ])
        lhs_terms.append(float(np.sum(integrals * integrals)))
        sq = np.broadcast_to(fvals * fvals * dt, (values.shape[0], dt.size))
        rhs_terms.append(float(np.sum(np.sum(sq, axis=1))))
    lhs = math.fsum(lhs_terms) / n_paths
    rhs = math.fsum(rhs_terms) / n_paths
    rel_err = abs(lhs - rhs) / max(rhs, _REL_ERR_FLOOR)
    return IsometryReport(lhs=lhs, rhs=rhs, rel_err=rel_err, n_paths=n_paths)


def convergence_diagnostic(f: AdaptedIntegrand, base_grid: TimeGrid, levels: int,
                           n_paths: int, seed: SeedSpec,
                           threads: int = 1) -> list[tuple[float, float]]:
    """Mean-square gap between integrals on successive dyadic refinements.

    One driving path per realization lives on the finest grid (base refined
    ``levels`` times); every coarser integral reads its increments off that
    same path.  Entry l holds (mesh of level-l grid, Monte Carlo estimate of
    E[(I_l - I_{l+1})^2]) for l = 0..levels-1.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    grids = [base_grid]
    for _ in range(levels):
        grids.append(refine(grids[-1]))
    fine = grids[-1]
    # Level l keeps every 2**(levels-l)-th point of the finest grid.
    idx = [np.arange(len(fine))[:: 2 ** (levels - l)] for l in range(levels)]
    idx.append(np.arange(len(fine)))
    gap_terms: list[list[float]] = [[] for _ in range(levels)]
    for lo in range(0, n_paths, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n_paths)
        values = sample_paths(fine, seed.master_seed, hi - lo,
                              first_stream=seed.stream_id + lo, threads=threads)
        integrals = [
            _integrals_matrix(f, grids[l], fine, values, idx[l])
            for l in range(levels + 1)
        ]
        for l in range(levels):
            gap = integrals[l] - integrals[l + 1]
            gap_terms[l].append(float(np.sum(gap * gap)))
    return [
        (grids[l].mesh, math.fsum(gap_terms[l]) / n_paths)
        for l in range(levels)
    ]
