"""Discrete Brownian motion, left-endpoint stochastic integrals and
log-price projections, with a reproducibility-first random stream model."""

__version__ = "0.1.0"

from .brownian import BrownianPath, increments, restrict, sample_path, sample_paths
from .calibrate import (
    CalibrationResult,
    LogReturns,
    PriceSeries,
    calibrate,
    log_returns,
    read_price_csv,
)
from .grid import TimeGrid, refine, uniform_grid
from .ito import (
    AdaptedIntegrand,
    ConstantIntegrand,
    CurrentValueIntegrand,
    InstantaneousIntegrand,
    IsometryReport,
    SinCurrentValueIntegrand,
    StepProcess,
    approximate_ito,
    convergence_diagnostic,
    integrate_step,
    isometry_check,
    left_step_approximant,
    trailing_average_approximant,
)
from .montecarlo import (
    CorrelationTrace,
    correlation_trace,
    pearson,
    trace_from_levels,
)
from .rng import SeedSpec, standard_normal, stream
from .sde import (
    GbmParams,
    PricePath,
    ProjectionEnsemble,
    gbm_from_driver,
    simulate_ensemble,
    simulate_gbm,
    simulate_log_sde,
)
from .stats import KsResult, ks_normal, normal_cdf, sample_moments

__all__ = [name for name in dir() if not name.startswith("_")]
