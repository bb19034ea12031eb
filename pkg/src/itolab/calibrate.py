"""Drift and volatility estimation from historical closes.

Two conventions ship.  In "standard" mode gamma is the mean daily log
return and sigma its unbiased standard deviation, the usual reading for a
geometric model.  "paper" mode reproduces a published display verbatim:
gamma = mean - Var**2 / 2 and sigma = Var, with Var the unbiased variance
itself.  The modes agree on nothing but their inputs; callers pick one
explicitly and downstream code treats sigma as the diffusion coefficient
either way.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .stats import sample_moments

MODES = ("standard", "paper")


@dataclass(frozen=True)
class PriceSeries:
    """Dated positive closes, strictly ascending in date."""

    dates: tuple[dt.date, ...]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        closes = np.asarray(self.closes, dtype=float)
        if closes.ndim != 1 or closes.size != len(self.dates):
            raise ValueError("dates and closes must have equal length")
        if closes.size < 2:
            raise ValueError("need at least 2 observations")
        if not np.all(np.isfinite(closes)):
            raise ValueError("closes must be finite")
        if not np.all(closes > 0.0):
            raise ValueError("closes must be strictly positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise ValueError(f"dates must be strictly ascending; {a} !< {b}")
        closes.setflags(write=False)
        object.__setattr__(self, "closes", closes)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class LogReturns:
    """Daily log returns ln(close[i] / close[i-1]) of a price series."""

    values: np.ndarray = field(repr=False)
    start_date: dt.date
    end_date: dt.date

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("need at least one return")
        if not np.all(np.isfinite(values)):
            raise ValueError("returns must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class CalibrationResult:
    gamma: float
    sigma: float
    mode: str
    n_returns: int
    start_date: dt.date
    end_date: dt.date


def log_returns(series: PriceSeries) -> LogReturns:
    """Log returns between consecutive closes; length len(series) - 1."""
    values = np.diff(np.log(series.closes))
    return LogReturns(values=values, start_date=series.dates[0], end_date=series.dates[-1])


def calibrate(returns: LogReturns, mode: str = "standard") -> CalibrationResult:
    """Estimate drift and diffusion from daily log returns.

    standard: gamma = mean, sigma = StdDev (unbiased).
    paper:    gamma = mean - Var**2 / 2, sigma = Var (unbiased variance,
              squared in the drift correction), kept verbatim from the
              display it mirrors.
    Needs at least 2 returns for a variance.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if len(returns) < 2:
        raise ValueError("calibration needs at least 2 returns")
    mean, var = sample_moments(returns.values)
    if mode == "standard":
        gamma, sigma = mean, float(np.sqrt(var))
    else:
        gamma, sigma = mean - var * var / 2.0, var
    return CalibrationResult(gamma=gamma, sigma=sigma, mode=mode,
                             n_returns=len(returns),
                             start_date=returns.start_date, end_date=returns.end_date)


def read_price_csv(path: str) -> PriceSeries:
    """Parse a date,close CSV with ISO-8601 dates, rejecting unordered rows."""
    dates: list[dt.date] = []
    closes: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["date", "close"]:
            raise ValueError(f"{path}: expected header 'date,close', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'date,close', got {row!r}")
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad date {row[0]!r}: {exc}") from None
            try:
                close = float(row[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad close {row[1]!r}") from None
            dates.append(date)
            closes.append(close)
    if len(dates) < 2:
        raise ValueError(f"{path}: need at least 2 rows of prices")
    return PriceSeries(dates=tuple(dates), closes=np.array(closes))
