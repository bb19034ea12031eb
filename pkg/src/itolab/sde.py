"""Log-price dynamics driven by Brownian motion.

With constant drift and volatility the log-price increments telescope, so a
path evaluates in closed form from its driving Brownian values: there is no
discretization error to manage, only the statistical error of the driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .brownian import BrownianPath, sample_path, sample_paths
from .grid import TimeGrid
from .rng import SeedSpec


@dataclass(frozen=True)
class GbmParams:
    """Constant coefficients of the log-price dynamics.

    gamma is the drift per unit time, sigma the diffusion coefficient per
    square-root unit time; sigma must be positive for a stochastic model
    (zero is allowed and degenerates to a deterministic exponential).
    """

    gamma: float
    sigma: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.gamma) and np.isfinite(self.sigma)):
            raise ValueError("gamma and sigma must be finite")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class PricePath:
    """Positive price trajectory on a grid."""

    grid: TimeGrid
    prices: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or prices.size != len(self.grid):
            raise ValueError(
                f"prices length {prices.size} does not match grid length {len(self.grid)}"
            )
        if not np.all(np.isfinite(prices)):
            raise ValueError("prices must be finite")
        if not np.all(prices > 0.0):
            raise ValueError("prices must be strictly positive")
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)


@dataclass(frozen=True)
class ProjectionEnsemble:
    """Independent copies of the projected price process.

    Member i was driven by stream first_stream + i under master_seed, which
    is what makes the ensemble reproducible path-by-path.
    """

    paths: list[PricePath]
    params: GbmParams
    initial_price: float
    master_seed: int
    first_stream: int = 0

    def __post_init__(self) -> None:
        if not self.paths:
            raise ValueError("ensemble needs at least one path")
        if not self.initial_price > 0.0:
            raise ValueError(f"initial price must be > 0, got {self.initial_price}")

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def grid(self) -> TimeGrid:
        return self.paths[0].grid

    def price_matrix(self) -> np.ndarray:
        """Rows are paths, columns grid times."""
        return np.vstack([p.prices for p in self.paths])


def gbm_from_driver(params: GbmParams, initial_price: float,
                    driver: BrownianPath) -> PricePath:
    """Price path determined by an already-sampled Brownian driver.

    prices[k] = initial * exp(gamma * (t_k - t_0) + sigma * W_k); the
    log-increment sum collapses, so this is the scheme's exact solution.
    """
    if not initial_price > 0.0:
        raise ValueError(f"initial price must be > 0, got {initial_price}")
    t = driver.grid.times
    log_prices = np.log(initial_price) + params.gamma * (t - t[0]) + params.sigma * driver.values
    return PricePath(driver.grid, np.exp(log_prices))


def simulate_gbm(params: GbmParams, grid: TimeGrid, initial_price: float,
                 seed: SeedSpec) -> PricePath:
    """Sample one price path; the driver is the Brownian path of ``seed``."""
    return gbm_from_driver(params, initial_price, sample_path(grid, seed))


def simulate_ensemble(params: GbmParams, grid: TimeGrid, initial_price: float,
                      n_paths: int, master_seed: int, first_stream: int = 0,
                      threads: int = 1) -> ProjectionEnsemble:
    """Sample n_paths independent price paths, one stream per path."""
    if not initial_price > 0.0:
        raise ValueError(f"initial price must be > 0, got {initial_price}")
    w = sample_paths(grid, master_seed, n_paths, first_stream=first_stream,
                     threads=threads)
    t = grid.times
    log_prices = np.log(initial_price) + params.gamma * (t - t[0]) + params.sigma * w
    prices = np.exp(log_prices)
    paths = [PricePath(grid, row) for row in prices]
    return ProjectionEnsemble(paths=paths, params=params, initial_price=initial_price,
                              master_seed=master_seed, first_stream=first_stream)


def simulate_log_sde(gamma: Callable[[float], float],
                     sigma: Callable[[float, float], float],
                     grid: TimeGrid, initial_price: float,
                     seed: SeedSpec) -> PricePath:
    """Euler scheme for state-dependent coefficients, left endpoint throughout.

    log Y_k = log Y_{k-1} + gamma(t_{k-1}) dt + sigma(t_{k-1}, Y_{k-1}) dW.
    Coefficients are read where the interval starts, never ahead of it.
    With constant coefficients this reduces to the exact scheme up to
    rounding in the running sum.
    """
    if not initial_price > 0.0:
        raise ValueError(f"initial price must be > 0, got {initial_price}")
    driver = sample_path(grid, seed)
    dw = np.diff(driver.values)
    dt = grid.dt
    t = grid.times
    log_prices = np.empty(len(grid))
    log_prices[0] = np.log(initial_price)
    for k in range(1, len(grid)):
        y_prev = float(np.exp(log_prices[k - 1]))
        log_prices[k] = (
            log_prices[k - 1]
            + gamma(float(t[k - 1])) * dt[k - 1]
            + sigma(float(t[k - 1]), y_prev) * dw[k - 1]
        )
    return PricePath(grid, np.exp(log_prices))
