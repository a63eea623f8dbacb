"""Series containers and the prior construction used by the downscaler.

An aggregated series is an ordered list of units (label, count, length in
days).  Counts stay integers end to end; the per-day prior is kept in exact
rational arithmetic so unit sums reconstruct without rounding error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "AggregateUnit",
    "AggregatedSeries",
    "DailySeries",
    "PriorSeries",
    "build_prior",
    "sigma0_from_prior",
    "aggregate",
]


@dataclass(frozen=True)
class AggregateUnit:
    """One aggregation period: a label, its total count and its day count."""

    label: str
    value: int
    length: int

    def __post_init__(self):
        if not isinstance(self.value, (int, np.integer)) or isinstance(self.value, bool):
            raise ValidationError(f"unit {self.label!r}: value must be an integer, got {self.value!r}")
        if self.value < 0:
            raise ValidationError(f"unit {self.label!r}: value must be >= 0, got {self.value}")
        if not isinstance(self.length, (int, np.integer)) or isinstance(self.length, bool):
            raise ValidationError(f"unit {self.label!r}: length must be an integer, got {self.length!r}")
        if self.length < 1:
            raise ValidationError(f"unit {self.label!r}: length must be >= 1, got {self.length}")


@dataclass(frozen=True)
class AggregatedSeries:
    """Ordered aggregate units with strictly increasing labels."""

    units: tuple

    def __post_init__(self):
        units = tuple(self.units)
        object.__setattr__(self, "units", units)
        if not units:
            raise ValidationError("aggregated series must contain at least one unit")
        for prev, cur in zip(units, units[1:]):
            if not cur.label > prev.label:
                raise ValidationError(
                    f"unit labels must be strictly increasing: {prev.label!r} !< {cur.label!r}"
                )

    @classmethod
    def from_values(cls, values, lengths, labels=None) -> "AggregatedSeries":
        values = list(values)
        lengths = list(lengths)
        if len(values) != len(lengths):
            raise ValidationError("values and lengths differ in length")
        if labels is None:
            labels = [f"unit{i + 1:03d}" for i in range(len(values))]
        units = tuple(
            AggregateUnit(str(lab), int(v), int(n)) for lab, v, n in zip(labels, values, lengths)
        )
        return cls(units)

    @property
    def values(self) -> np.ndarray:
        return np.array([u.value for u in self.units], dtype=np.int64)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([u.length for u in self.units], dtype=np.int64)

    @property
    def labels(self) -> tuple:
        return tuple(u.label for u in self.units)

    @property
    def total(self) -> int:
        return int(sum(u.value for u in self.units))

    @property
    def n_days(self) -> int:
        return int(sum(u.length for u in self.units))

    def __len__(self):
        return len(self.units)


@dataclass(frozen=True)
class DailySeries:
    """Daily non-negative integer counts plus the unit layout they roll up to."""

    values: np.ndarray
    unit_lengths: tuple
    unit_labels: tuple = None

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise ValidationError("daily values must be one-dimensional")
        if values.size and not np.issubdtype(values.dtype, np.integer):
            if not np.all(values == np.floor(values)):
                raise ValidationError("daily values must be integers")
        values = values.astype(np.int64)
        if np.any(values < 0):
            bad = int(np.argmax(values < 0))
            raise ValidationError(f"daily value at index {bad} is negative")
        object.__setattr__(self, "values", values)
        lengths = tuple(int(n) for n in self.unit_lengths)
        object.__setattr__(self, "unit_lengths", lengths)
        if any(n < 1 for n in lengths):
            raise ValidationError("unit lengths must be >= 1")
        if sum(lengths) != values.size:
            raise ValidationError(
                f"unit lengths sum to {sum(lengths)} but series has {values.size} days"
            )
        if self.unit_labels is not None:
            labels = tuple(str(s) for s in self.unit_labels)
            if len(labels) != len(lengths):
                raise ValidationError("unit_labels and unit_lengths differ in length")
            object.__setattr__(self, "unit_labels", labels)

    def unit_slices(self):
        """Yield (unit index, slice) pairs covering the series in order."""
        start = 0
        for i, n in enumerate(self.unit_lengths):
            yield i, slice(start, start + n)
            start += n

    def unit_sums(self) -> np.ndarray:
        bounds = np.cumsum((0,) + self.unit_lengths)
        return np.add.reduceat(self.values, bounds[:-1]) if self.values.size else np.array([], dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.values.sum())

    def __len__(self):
        return int(self.values.size)


@dataclass(frozen=True)
class PriorSeries:
    """Per-day rational rates, constant inside each unit.

    ``divisor_policy`` records how the rate was formed: "unit-length" for
    value/length, or the fixed divisor as a string (e.g. "30").
    """

    values: tuple
    unit_lengths: tuple
    divisor_policy: str

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if any(v < 0 for v in values):
            raise ValidationError("prior rates must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "unit_lengths", tuple(int(n) for n in self.unit_lengths))
        if sum(self.unit_lengths) != len(values):
            raise ValidationError("prior length does not match unit lengths")

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=float)

    def __len__(self):
        return len(self.values)


def build_prior(agg: AggregatedSeries, divisor=None) -> PriorSeries:
    """Spread each unit's count into a constant per-day rate.

    Parameters
    ----------
    agg : AggregatedSeries
    divisor : optional positive number
        When None (default) each unit is divided by its own length, which
        makes the per-unit sums reconstruct exactly.  A fixed divisor (e.g.
        30) is available for compatibility with tooling that treats every
        unit as 30 days long.

    Returns
    -------
    PriorSeries
    """
    values = []
    if divisor is None:
        policy = "unit-length"
        for u in agg.units:
            values.extend([Fraction(u.value, u.length)] * u.length)
    else:
        div = Fraction(str(divisor)) if not isinstance(divisor, (int, Fraction)) else Fraction(divisor)
        if div <= 0:
            raise ValidationError(f"divisor must be positive, got {divisor}")
        policy = str(divisor)
        for u in agg.units:
            values.extend([Fraction(u.value, 1) / div] * u.length)
    return PriorSeries(tuple(values), tuple(int(n) for n in agg.lengths), policy)


def sigma0_from_prior(prior: PriorSeries, divisor: float = 30.0) -> float:
    """Daily-scale standard deviation: population std of the prior / divisor.

    A single-point prior has no spread; 0 is returned with a warning.
    """
    if divisor <= 0:
        raise ValidationError(f"divisor must be positive, got {divisor}")
    if len(prior) == 0:
        raise ValidationError("prior is empty")
    if len(prior) == 1:
        warnings.warn("single-point prior has zero spread; sigma0 set to 0", stacklevel=2)
        return 0.0
    vals = prior.as_floats()
    return float(np.std(vals) / divisor)


def aggregate(daily: DailySeries) -> AggregatedSeries:
    """Roll a daily series back up to its unit totals, in exact integer math."""
    sums = [int(daily.values[sl].sum()) for _, sl in daily.unit_slices()]
    labels = daily.unit_labels
    return AggregatedSeries.from_values(sums, daily.unit_lengths, labels)
