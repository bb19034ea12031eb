"""Shared fixtures for the expensive seeded ensembles.

The 10^5-path computations are session-scoped so the axioms tests and the
acceptance suite reuse one realization instead of resampling it.
"""

import pathlib
import time

import pytest

from itolab import (
    ConstantIntegrand,
    CurrentValueIntegrand,
    SeedSpec,
    isometry_check,
    sample_paths,
    uniform_grid,
)

N_ACCEPTANCE_PATHS = 100_000


@pytest.fixture(scope="session")
def grid_256():
    return uniform_grid(0.0, 1.0, 256)


@pytest.fixture(scope="session")
def bm_matrix_seed0(grid_256):
    """10^5 Brownian paths on the 256-step unit grid, master seed 0.

    Returns (matrix, wall_seconds); the timing feeds the generation budget
    check.
    """
    t0 = time.perf_counter()
    matrix = sample_paths(grid_256, 0, N_ACCEPTANCE_PATHS, threads=4)
    return matrix, time.perf_counter() - t0


@pytest.fixture(scope="session")
def iso_bm_100k(grid_256):
    """Isometry report for f = current path value at 10^5 paths."""
    t0 = time.perf_counter()
    report = isometry_check(CurrentValueIntegrand(), grid_256,
                            N_ACCEPTANCE_PATHS, SeedSpec(0, 0), threads=4)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def iso_one_100k(grid_256):
    """Isometry report for f identically 1 at 10^5 paths."""
    report = isometry_check(ConstantIntegrand(1.0), grid_256,
                            N_ACCEPTANCE_PATHS, SeedSpec(0, 0), threads=4)
    return report


@pytest.fixture(scope="session")
def data_dir():
    return pathlib.Path(__file__).resolve().parent.parent / "data"
