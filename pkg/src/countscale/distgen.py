"""Per-unit synthetic day generation with an exact sum constraint.

The pipeline for one unit is: draw `length` values around the unit's daily
mean, shift them non-negative if needed, round half-away-from-zero, then
walk the rounded vector to the exact target with random +-1 steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, ValidationError

__all__ = [
    "UnitDraw",
    "sample_raw",
    "nonneg_shift",
    "integerize_and_balance",
    "generate_unit",
    "balance_to_sum",
]

FAMILIES = ("normal",)


@dataclass(frozen=True)
class UnitDraw:
    """A finished unit: non-negative integers with the exact target sum."""

    values: np.ndarray
    target_sum: int
    length: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", values)
        if values.size != self.length:
            raise ValidationError("draw length mismatch")
        if np.any(values < 0):
            raise ValidationError("draw contains a negative value")
        if int(values.sum()) != self.target_sum:
            raise ValidationError(
                f"draw sums to {int(values.sum())}, expected {self.target_sum}"
            )


def sample_raw(target_sum, length, sigma, rng, family="normal"):
    """Draw `length` iid values with mean target_sum/length and std sigma."""
    if length < 1:
        raise ValidationError(f"length must be >= 1, got {length}")
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if family not in FAMILIES:
        raise ConfigError(f"unknown distribution family {family!r}; known: {FAMILIES}")
    mean = target_sum / length
    return rng.normal(mean, sigma, size=length)


def nonneg_shift(values):
    """Shift the whole vector up by |min| when the minimum is negative."""
    values = np.asarray(values, dtype=float)
    lo = values.min() if values.size else 0.0
    if lo < 0:
        return values + abs(lo)
    return values


def _round_half_away(values):
    # np.rint rounds half to even; the fixed rule here is half away from
    # zero, which for non-negative input is floor(x + 0.5).
    return np.floor(np.asarray(values, dtype=float) + 0.5).astype(np.int64)


def balance_to_sum(values, target_sum, rng):
    """Random +-1 steps until the vector sums to target_sum exactly.

    Additions pick a uniformly random index; subtractions pick uniformly
    among strictly positive entries so no value crosses zero.  Large
    surpluses are processed in chunks no bigger than the smallest eligible
    value: within such a chunk no entry can be driven below zero, so the
    chunked walk visits exactly the states the one-step walk would.
    """
    if target_sum < 0:
        raise ValidationError(f"target_sum must be >= 0, got {target_sum}")
    x = np.asarray(values, dtype=np.int64).copy()
    n = x.size
    diff = int(target_sum) - int(x.sum())
    if diff > 0:
        idx = rng.integers(0, n, size=diff)
        x += np.bincount(idx, minlength=n).astype(np.int64)
        return x
    need = -diff
    while need > 0:
        eligible = np.flatnonzero(x > 0)
        m = eligible.size
        if m == 0:
            raise ValidationError("cannot reduce an all-zero vector")
        vmin = int(x[eligible].min())
        if vmin >= 4:
            c = min(need, vmin)
            pos = (rng.random(c) * m).astype(np.int64)
            x[eligible] -= np.bincount(pos, minlength=m).astype(np.int64)
            need -= c
        else:
            # small-value endgame: exact one-step walk on python lists
            xs = x.tolist()
            elig = eligible.tolist()
            draws = rng.random(need).tolist()
            m = len(elig)
            done = 0
            for u in draws:
                j = int(u * m)
                i = elig[j]
                xs[i] -= 1
                done += 1
                if xs[i] == 0:
                    m -= 1
                    elig[j] = elig[m]
                    if m == 0:
                        break
            x = np.asarray(xs, dtype=np.int64)
            need -= done
    return x


def integerize_and_balance(values, target_sum, rng) -> UnitDraw:
    """Round half-away-from-zero, then balance to the exact target sum."""
    if target_sum < 0:
        raise ValidationError(f"target_sum must be >= 0, got {target_sum}")
    rounded = _round_half_away(values)
    balanced = balance_to_sum(rounded, int(target_sum), rng)
    return UnitDraw(balanced, int(target_sum), balanced.size)


def generate_unit(target_sum, length, sigma, rng, family="normal") -> UnitDraw:
    """sample_raw -> nonneg_shift -> integerize_and_balance for one unit."""
    raw = sample_raw(target_sum, length, sigma, rng, family=family)
    return integerize_and_balance(nonneg_shift(raw), target_sum, rng)
