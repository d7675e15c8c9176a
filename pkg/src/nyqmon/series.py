"""Raw and uniformly sampled time series, plus the plumbing that moves between them.

A :class:`TimeSeries` is what a poller hands us: (timestamp, value) pairs that
are usually, but not always, evenly spaced.  A :class:`UniformSeries` has an
explicit sampling rate and is the only thing the spectral code accepts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import EmptyTrace, GapTooLarge, InvalidRate, ShapeMismatch

DEFAULT_MAX_GAP = 10.0

# Slack used when counting grid points inside a float span.
_GRID_EPS = 1e-6


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


class TimePoint(NamedTuple):
    timestamp: float
    value: float


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Possibly irregular samples of one metric on one device."""

    timestamps: np.ndarray
    values: np.ndarray
    metric_name: str = ""
    unit: str = ""

    def __post_init__(self):
        t = _frozen_array(self.timestamps)
        v = _frozen_array(self.values)
        if t.shape != v.shape:
            raise ShapeMismatch(f"{t.size} timestamps but {v.size} values")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("timestamps and values must be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], metric_name="", unit=""):
        pts = list(points)
        t = [p[0] for p in pts]
        v = [p[1] for p in pts]
        return cls(np.asarray(t, float), np.asarray(v, float), metric_name, unit)

    @property
    def points(self) -> list[TimePoint]:
        return [TimePoint(float(t), float(v)) for t, v in zip(self.timestamps, self.values)]

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.metric_name == other.metric_name
            and self.unit == other.unit
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class UniformSeries:
    """Samples taken every ``1 / rate`` seconds starting at ``start_time``."""

    values: np.ndarray
    rate: float
    start_time: float = 0.0
    metric_name: str = ""
    unit: str = ""

    def __post_init__(self):
        v = _frozen_array(self.values)
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise InvalidRate(f"rate must be positive and finite, got {self.rate}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "start_time", float(self.start_time))

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        """Length of the observation window, ``N / rate``."""
        return self.values.size / self.rate

    @property
    def timestamps(self) -> np.ndarray:
        return self.start_time + np.arange(self.values.size) / self.rate

    def with_values(self, values, rate=None) -> "UniformSeries":
        return UniformSeries(
            values,
            self.rate if rate is None else rate,
            self.start_time,
            self.metric_name,
            self.unit,
        )

    def to_timeseries(self) -> TimeSeries:
        return TimeSeries(self.timestamps, self.values, self.metric_name, self.unit)

    def __eq__(self, other):
        if not isinstance(other, UniformSeries):
            return NotImplemented
        return (
            self.rate == other.rate
            and self.start_time == other.start_time
            and self.metric_name == other.metric_name
            and self.unit == other.unit
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class QuantizationSpec:
    quantum: float
    origin: float = 0.0

    def __post_init__(self):
        if not self.quantum > 0:
            raise ValueError(f"quantum must be positive, got {self.quantum}")


def regularize(ts: TimeSeries, rate: float, max_gap: float = DEFAULT_MAX_GAP) -> UniformSeries:
    """Nearest-neighbour resample ``ts`` onto a grid at ``rate`` Hz.

    The grid starts at the first timestamp and stops at the last one.  When two
    input points are equally close to a grid instant the earlier one is used.

    Raises GapTooLarge if any gap in the input exceeds ``max_gap`` grid
    intervals, since filling it would invent a long flat stretch.
    """
    if len(ts) < 2:
        raise EmptyTrace(f"need at least 2 points to regularize, got {len(ts)}")
    if not rate > 0:
        raise InvalidRate(f"rate must be positive, got {rate}")
    t = ts.timestamps
    largest_gap = float(np.max(np.diff(t)))
    if largest_gap > max_gap / rate:
        raise GapTooLarge(
            f"gap of {largest_gap:g} s exceeds {max_gap:g} x the {1 / rate:g} s output interval"
        )
    span = t[-1] - t[0]
    n = int(math.floor(span * rate + _GRID_EPS)) + 1
    grid = t[0] + np.arange(n) / rate
    right = np.clip(np.searchsorted(t, grid, side="left"), 1, t.size - 1)
    left = right - 1
    # strict comparison: ties go to the earlier point
    use_right = (t[right] - grid) < (grid - t[left])
    idx = np.where(use_right, right, left)
    return UniformSeries(ts.values[idx], rate, t[0], ts.metric_name, ts.unit)


def decimate(us: UniformSeries, target_rate: float) -> UniformSeries:
    """Keep the input sample nearest each instant of a slower grid.

    No anti-alias filter is applied: the result is what a poller running at
    ``target_rate`` would have recorded.  A grid instant exactly halfway
    between two input samples takes the later one.
    """
    if not (target_rate > 0 and target_rate <= us.rate * (1 + 1e-12)):
        raise InvalidRate(f"target rate {target_rate} must lie in (0, {us.rate}]")
    if len(us) == 0:
        return us.with_values([], rate=target_rate)
    if target_rate == us.rate:
        return us
    ratio = us.rate / target_rate
    n = int(math.floor((len(us) - 1) / ratio + _GRID_EPS)) + 1
    idx = np.floor(np.arange(n) * ratio + 0.5).astype(int)
    idx = np.minimum(idx, len(us) - 1)
    return us.with_values(us.values[idx], rate=target_rate)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(us: UniformSeries, q: QuantizationSpec) -> UniformSeries:
    """Snap every value to ``origin + k * quantum``, rounding halves away from zero."""
    k = _round_half_away((us.values - q.origin) / q.quantum)
    return us.with_values(q.origin + q.quantum * k)


def l2_distance(a: UniformSeries, b: UniformSeries) -> float:
    if len(a) != len(b):
        raise ShapeMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    if not math.isclose(a.rate, b.rate, rel_tol=1e-9):
        raise ShapeMismatch(f"rates differ: {a.rate} vs {b.rate}")
    return float(np.linalg.norm(a.values - b.values))
