"""Error measures for synthesized series and forecasts: RMSE, MAE, MASE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError

__all__ = ["rmse", "mae", "mase", "ErrorReport", "error_report", "summary_stats"]


def _pair(actual, predicted):
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.ndim != 1 or p.ndim != 1:
        raise ValidationError("metric inputs must be one-dimensional")
    if a.size != p.size:
        raise ValidationError(f"length mismatch: {a.size} vs {p.size}")
    if a.size == 0:
        raise ValidationError("metric inputs must be non-empty")
    return a, p


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    a, p = _pair(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    a, p = _pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def mase(actual, predicted, m: int = 1, train=None):
    """Mean absolute scaled error with seasonal naive lag m.

    The denominator is the mean absolute lag-m change of `train` when
    given, otherwise of `actual` itself.  Returns None when the denominator
    is zero (the scale is undefined on a constant reference).
    """
    a, p = _pair(actual, predicted)
    ref = np.asarray(train, dtype=float) if train is not None else a
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if m >= ref.size:
        raise ValidationError(f"m={m} needs a reference longer than {ref.size} points")
    denom = np.mean(np.abs(ref[m:] - ref[:-m]))
    if denom == 0:
        return None
    return float(np.mean(np.abs(a - p)) / denom)


@dataclass(frozen=True)
class ErrorReport:
    """The three error measures plus the context needed to read them."""

    rmse: float
    mae: float
    mase: float  # None when the naive denominator is zero
    n: int
    m: int
    mase_reference: str  # "actual" or "train"

    def as_dict(self):
        return {
            "rmse": self.rmse,
            "mae": self.mae,
            "mase": self.mase,
            "n": self.n,
            "m": self.m,
            "mase_reference": self.mase_reference,
        }


def error_report(actual, predicted, m: int = 1, train=None) -> ErrorReport:
    a, p = _pair(actual, predicted)
    return ErrorReport(
        rmse=rmse(a, p),
        mae=mae(a, p),
        mase=mase(a, p, m=m, train=train),
        n=int(a.size),
        m=int(m),
        mase_reference="train" if train is not None else "actual",
    )


def summary_stats(values) -> dict:
    """count/mean/std/min/quartiles/max, in pandas describe() conventions."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValidationError("cannot summarise an empty series")
    return {
        "count": int(v.size),
        "mean": float(np.mean(v)),
        "std": float(np.std(v, ddof=1)) if v.size > 1 else 0.0,
        "min": float(np.min(v)),
        "25%": float(np.percentile(v, 25)),
        "50%": float(np.percentile(v, 50)),
        "75%": float(np.percentile(v, 75)),
        "max": float(np.max(v)),
    }
