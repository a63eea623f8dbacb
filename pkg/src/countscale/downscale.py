"""Aggregate-to-daily downscaling with exact sum conservation.

Three stages: an initial per-unit draw, an iterative pass that smooths
boundary spikes by redistributing small windows (conserving each window's
sum, so the global total never moves), and a final per-unit correction that
restores the exact aggregate sums the smoothing may have shifted between
units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distgen import FAMILIES, balance_to_sum, generate_unit
from .exceptions import ConfigError, ValidationError
from .series import AggregatedSeries, DailySeries, build_prior, sigma0_from_prior

__all__ = [
    "DownscaleConfig",
    "DownscaleResult",
    "resolve_threshold",
    "detect_spikes",
    "initial_distribution",
    "smooth_spikes",
    "restore_unit_sums",
    "downscale",
    "sigma0_for",
]

THRESHOLD_MODES = ("fraction", "absolute")


@dataclass(frozen=True)
class DownscaleConfig:
    """Knobs for one downscaling run.

    sigma0 is the daily-scale standard deviation used by every draw.  The
    spike threshold is either an absolute jump size or a fraction of the
    initial distribution's range.  `sweeps` bounds the smoothing iterations,
    `radius` sizes the redistribution window, and `refresh_threshold` makes
    a fractional threshold re-resolve against the current series each sweep
    instead of once up front.
    """

    sigma0: float
    threshold: float = 0.6
    threshold_mode: str = "fraction"
    sweeps: int = 100
    radius: int = 3
    family: str = "normal"
    seed: int = None
    sigma_divisor: float = 30.0
    refresh_threshold: bool = False

    def __post_init__(self):
        if self.sigma0 < 0:
            raise ConfigError(f"sigma0 must be >= 0, got {self.sigma0}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(
                f"threshold_mode must be one of {THRESHOLD_MODES}, got {self.threshold_mode!r}"
            )
        if self.threshold_mode == "fraction" and not 0 < self.threshold <= 1:
            raise ConfigError(f"fractional threshold must be in (0, 1], got {self.threshold}")
        if self.threshold_mode == "absolute" and self.threshold < 0:
            raise ConfigError(f"absolute threshold must be >= 0, got {self.threshold}")
        if self.sweeps < 1:
            raise ConfigError(f"sweeps must be >= 1, got {self.sweeps}")
        if self.radius < 1:
            raise ConfigError(f"radius must be >= 1, got {self.radius}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown distribution family {self.family!r}")
        if self.sigma_divisor <= 0:
            raise ConfigError(f"sigma_divisor must be positive, got {self.sigma_divisor}")


@dataclass(frozen=True)
class DownscaleResult:
    """Snapshots of all three stages plus run metadata."""

    initial: DailySeries
    smoothed: DailySeries
    final: DailySeries
    spike_counts: tuple
    threshold_used: float
    config: DownscaleConfig
    sweeps_run: int = 0
    stopped_early: bool = False


def resolve_threshold(values, config: DownscaleConfig) -> float:
    """Turn the configured threshold into an absolute jump size."""
    if config.threshold_mode == "absolute":
        return float(config.threshold)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValidationError("cannot resolve a fractional threshold on an empty series")
    return float(config.threshold * (values.max() - values.min()))


def detect_spikes(values, delta) -> np.ndarray:
    """Indices whose value exceeds either neighbour by more than delta.

    Boundary points are judged against their single existing neighbour.
    """
    y = np.asarray(values, dtype=float)
    if y.size < 2:
        return np.array([], dtype=np.int64)
    over_left = np.zeros(y.size, dtype=bool)
    over_right = np.zeros(y.size, dtype=bool)
    over_left[1:] = (y[1:] - y[:-1]) > delta
    over_right[:-1] = (y[:-1] - y[1:]) > delta
    return np.flatnonzero(over_left | over_right).astype(np.int64)


def initial_distribution(agg: AggregatedSeries, config: DownscaleConfig, rng) -> np.ndarray:
    """Concatenate one exact-sum draw per unit, in order."""
    parts = [
        generate_unit(u.value, u.length, config.sigma0, rng, family=config.family).values
        for u in agg.units
    ]
    return np.concatenate(parts) if parts else np.array([], dtype=np.int64)


def smooth_spikes(values, config: DownscaleConfig, rng, delta=None):
    """Iteratively redistribute windows around spikes, conserving the total.

    Returns (smoothed values, per-sweep spike counts).  Each sweep detects
    spikes once, then regenerates the open window (i-radius, i+radius)
    around each spike left to right on the mutating series; every window is
    redrawn with its own sum as the target, so the global sum is invariant.
    Sweeps stop early once a detection pass comes back empty.
    """
    x = np.asarray(values, dtype=np.int64).copy()
    if delta is None:
        delta = resolve_threshold(x, config)
    r = config.radius
    counts = []
    for _ in range(config.sweeps):
        if config.refresh_threshold and config.threshold_mode == "fraction":
            delta = resolve_threshold(x, config)
        spikes = detect_spikes(x, delta)
        counts.append(int(spikes.size))
        if spikes.size == 0:
            break
        for i in spikes:
            lo = max(0, int(i) - r + 1)
            hi = min(x.size, int(i) + r)
            if hi - lo < 2:
                continue
            window_sum = int(x[lo:hi].sum())
            draw = generate_unit(window_sum, hi - lo, config.sigma0, rng, family=config.family)
            x[lo:hi] = draw.values
    return x, counts


def restore_unit_sums(values, agg: AggregatedSeries, rng) -> np.ndarray:
    """Per-unit random +-1 walk back to the exact aggregate values."""
    x = np.asarray(values, dtype=np.int64).copy()
    if x.size != agg.n_days:
        raise ValidationError(
            f"series has {x.size} days but the aggregate layout expects {agg.n_days}"
        )
    start = 0
    for u in agg.units:
        seg = x[start : start + u.length]
        if int(seg.sum()) != u.value:
            x[start : start + u.length] = balance_to_sum(seg, u.value, rng)
        start += u.length
    return x


def downscale(agg: AggregatedSeries, config: DownscaleConfig) -> DownscaleResult:
    """Run the full pipeline and keep all three stage snapshots."""
    rng = np.random.default_rng(config.seed)
    lengths = tuple(int(n) for n in agg.lengths)
    labels = agg.labels

    initial = initial_distribution(agg, config, rng)
    delta = resolve_threshold(initial, config)
    smoothed, counts = smooth_spikes(initial, config, rng, delta=delta)
    final = restore_unit_sums(smoothed, agg, rng)

    stopped_early = len(counts) < config.sweeps and counts and counts[-1] == 0
    return DownscaleResult(
        initial=DailySeries(initial, lengths, labels),
        smoothed=DailySeries(smoothed, lengths, labels),
        final=DailySeries(final, lengths, labels),
        spike_counts=tuple(counts),
        threshold_used=float(delta),
        config=config,
        sweeps_run=len(counts),
        stopped_early=bool(stopped_early),
    )


def sigma0_for(agg: AggregatedSeries, divisor: float = 30.0) -> float:
    """Convenience: the default daily sigma for an aggregated series."""
    return sigma0_from_prior(build_prior(agg), divisor=divisor)
