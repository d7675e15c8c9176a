"""Synthetic signals with known spectra, used as ground truth everywhere else.

Spec files are flat ``key = value`` text::

    # two tones, 400 and 440 Hz
    seed = 1
    offset = 0
    trend = 0
    noise_amplitude = 0
    component = 400, 1.0, 0.0          # frequency Hz, amplitude, phase rad
    component = 440, 1.0, 0.0
    event = 3600 | 50, 1, 0 ; 10, 2, 0  # at t=3600 s the component set becomes ...

``event`` lines replace the whole component set from their time onwards.  An
event with nothing after ``|`` leaves only offset, trend and noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError
from .series import UniformSeries


@dataclass(frozen=True)
class Component:
    frequency: float
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.frequency < 0 or self.amplitude < 0:
            raise ValueError("component frequency and amplitude must be non-negative")


@dataclass(frozen=True)
class ChangeEvent:
    time: float
    components: tuple[Component, ...]


@dataclass(frozen=True)
class SignalSpec:
    components: tuple[Component, ...] = ()
    offset: float = 0.0
    trend: float = 0.0
    noise_amplitude: float = 0.0
    change_events: tuple[ChangeEvent, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(_as_component(c) for c in self.components))
        events = tuple(
            e if isinstance(e, ChangeEvent) else ChangeEvent(float(e[0]), tuple(_as_component(c) for c in e[1]))
            for e in self.change_events
        )
        if any(a.time > b.time for a, b in zip(events, events[1:])):
            raise ValueError("change events must be sorted by time")
        object.__setattr__(self, "change_events", events)
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be non-negative")

    def segments(self) -> list[tuple[float, tuple[Component, ...]]]:
        """``(start_time, components)`` for every constant stretch of the spec."""
        segs = [(-math.inf, self.components)]
        segs.extend((e.time, e.components) for e in self.change_events)
        return segs


def _as_component(c) -> Component:
    return c if isinstance(c, Component) else Component(*map(float, c))


_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 arithmetic wraps
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _noise(t: np.ndarray, seed: int) -> np.ndarray:
    """Uniform noise in [-1, 1) that depends only on (seed, t)."""
    bits = np.ascontiguousarray(t, dtype=np.float64).view(np.uint64)
    key = np.uint64((seed * 0x9E3779B97F4A7C15) & _MASK64)
    with np.errstate(over="ignore"):
        h = _mix64(_mix64(bits ^ key) + np.uint64(0x9E3779B97F4A7C15))
    return (h >> np.uint64(11)).astype(np.float64) / float(1 << 53) * 2.0 - 1.0


def query(spec: SignalSpec, t):
    """Value of the signal at time(s) ``t``; scalar in, scalar out."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = spec.offset + spec.trend * t
    segs = spec.segments()
    for i, (start, comps) in enumerate(segs):
        end = segs[i + 1][0] if i + 1 < len(segs) else math.inf
        mask = (t >= start) & (t < end)
        if not mask.any():
            continue
        tm = t[mask]
        acc = np.zeros_like(tm)
        for c in comps:
            acc += c.amplitude * np.sin(2 * np.pi * c.frequency * tm + c.phase)
        out[mask] += acc
    if spec.noise_amplitude > 0:
        out = out + spec.noise_amplitude * _noise(t, spec.seed)
    return float(out[0]) if scalar else out


def generate(spec: SignalSpec, rate: float, duration: float, start_time: float = 0.0,
             metric_name: str = "synthetic", unit: str = "") -> UniformSeries:
    """Sample ``spec`` on a uniform grid; ``max(1, round(duration * rate))`` samples."""
    if not rate > 0 or not duration > 0:
        raise ValueError("rate and duration must be positive")
    n = max(1, int(round(duration * rate)))
    t = start_time + np.arange(n) / rate
    return UniformSeries(query(spec, t), rate, start_time, metric_name, unit)


def true_nyquist(spec: SignalSpec, start: float = -math.inf, end: float = math.inf) -> float:
    """Twice the highest frequency active anywhere in ``[start, end)``; 0 when there is none."""
    segs = spec.segments()
    fmax = 0.0
    for i, (s, comps) in enumerate(segs):
        e = segs[i + 1][0] if i + 1 < len(segs) else math.inf
        if e <= start or s >= end:
            continue
        for c in comps:
            if c.amplitude > 0:
                fmax = max(fmax, c.frequency)
    return 2.0 * fmax


class SpecSource:
    """Adapter exposing a :class:`SignalSpec` as a queryable signal source."""

    def __init__(self, spec: SignalSpec):
        self.spec = spec

    def query(self, t):
        return query(self.spec, t)


def temperature_like(
    offset: float = 300.0,
    period: float = 86400.0,
    amplitudes: Sequence[float] = (3.0, 1.2, 0.5),
    noise_amplitude: float = 0.0,
    seed: int = 0,
) -> SignalSpec:
    """Slow diurnal-style signal: a DC level plus harmonics of ``1 / period`` Hz.

    With the default day-long period all components sit below 1e-3 Hz.
    """
    comps = [Component((k + 1) / period, a, 0.7 * k) for k, a in enumerate(amplitudes)]
    return SignalSpec(tuple(comps), offset=offset, noise_amplitude=noise_amplitude, seed=seed)


def two_tone_spec() -> SignalSpec:
    """Two equal tones at 400 and 440 Hz."""
    return SignalSpec((Component(400.0, 1.0, 0.0), Component(440.0, 1.0, 0.0)))


# --- text format ---------------------------------------------------------------

_SCALAR_KEYS = {"offset", "trend", "noise_amplitude", "seed"}


def _parse_component(text: str, lineno: int, path) -> Component:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise ParseError(f"component needs 'frequency, amplitude[, phase]', got {text!r}", lineno, path)
    try:
        return Component(*(float(p) for p in parts))
    except ValueError as exc:
        raise ParseError(f"bad component {text!r}: {exc}", lineno, path) from None


def parse_spec(text: str, path=None) -> SignalSpec:
    fields: dict = {}
    comps: list[Component] = []
    events: list[ChangeEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _SCALAR_KEYS:
            try:
                fields[key] = int(value) if key == "seed" else float(value)
            except ValueError:
                raise ParseError(f"{key} must be a number, got {value!r}", lineno, path) from None
        elif key == "component":
            comps.append(_parse_component(value, lineno, path))
        elif key == "event":
            if "|" not in value:
                raise ParseError("event needs 'time | components'", lineno, path)
            when, rest = value.split("|", 1)
            try:
                time = float(when)
            except ValueError:
                raise ParseError(f"bad event time {when.strip()!r}", lineno, path) from None
            new = tuple(_parse_component(c, lineno, path) for c in rest.split(";") if c.strip())
            if events and time < events[-1].time:
                raise ParseError("events must be listed in time order", lineno, path)
            events.append(ChangeEvent(time, new))
        else:
            raise ParseError(f"unknown key {key!r}", lineno, path)
    try:
        return SignalSpec(tuple(comps), change_events=tuple(events), **fields)
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from None


def load_spec(path) -> SignalSpec:
    p = Path(path)
    return parse_spec(p.read_text(encoding="utf-8"), path=str(p))


def format_spec(spec: SignalSpec) -> str:
    def comp(c: Component) -> str:
        return f"{c.frequency!r}, {c.amplitude!r}, {c.phase!r}"

    lines = [
        f"seed = {spec.seed}",
        f"offset = {spec.offset!r}",
        f"trend = {spec.trend!r}",
        f"noise_amplitude = {spec.noise_amplitude!r}",
    ]
    lines += [f"component = {comp(c)}" for c in spec.components]
    lines += [f"event = {e.time!r} | " + " ; ".join(comp(c) for c in e.components) for e in spec.change_events]
    return "\n".join(lines) + "\n"
