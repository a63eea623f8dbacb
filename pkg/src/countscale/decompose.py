"""Classical additive decomposition: trend + seasonal + residual.

Trend is a centered moving average (the usual half-weight endpoints for
even periods), the seasonal component is the re-centered per-position mean
of the detrended series tiled to full length, and the residual is whatever
is left.  Trend and residual are undefined (NaN) in the half-window edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError

__all__ = ["DecompositionResult", "decompose_additive"]


@dataclass(frozen=True)
class DecompositionResult:
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    def reconstruction(self) -> np.ndarray:
        return self.trend + self.seasonal + self.residual


def _trend_filter(period: int) -> np.ndarray:
    if period % 2 == 0:
        taps = np.ones(period + 1)
        taps[0] = taps[-1] = 0.5
        return taps / period
    return np.ones(period) / period


def decompose_additive(series, period: int) -> DecompositionResult:
    """Split a series into trend, period-repeating seasonal, and residual.

    Requires at least two full periods.  The seasonal component repeats
    exactly (seasonal[i] == seasonal[i + period]) and sums to zero over one
    period up to floating error.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    if period < 1:
        raise ValidationError(f"period must be >= 1, got {period}")
    if y.size < 2 * period:
        raise ValidationError(
            f"series length {y.size} is shorter than two periods ({2 * period})"
        )

    taps = _trend_filter(period)
    half = taps.size // 2
    trend = np.full(y.size, np.nan)
    trend[half : y.size - half] = np.convolve(y, taps, mode="valid")

    detrended = y - trend
    profile = np.empty(period)
    for j in range(period):
        vals = detrended[j::period]
        vals = vals[~np.isnan(vals)]
        profile[j] = vals.mean() if vals.size else 0.0
    profile -= profile.mean()

    reps = -(-y.size // period)  # ceil division
    seasonal = np.tile(profile, reps)[: y.size]
    residual = y - trend - seasonal
    return DecompositionResult(trend=trend, seasonal=seasonal, residual=residual, period=int(period))
