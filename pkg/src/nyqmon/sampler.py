"""Closed-loop rate controller: probe upwards while aliased, settle, then creep down.

The controller collects two streams, at ``f2 = rate`` and ``f1 ~ dual_ratio * rate``,
and looks at the trailing ``window`` seconds every ``step`` seconds.  A rate
change starts a fresh collection epoch, so the next decision waits until a full
window has been gathered at the new rate.

Rates are kept on a grid of whole samples per window (multiples of ``1/window``)
so every analysis window holds an exact number of samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Protocol, Sequence

import numpy as np

from .alias import DualRatePlan, AliasVerdict, detect_aliasing
from .errors import ConfigViolation, DegenerateSignal, HorizonTooShort
from .series import UniformSeries
from .spectral import Aliased, NyquistEstimate, Rate, estimate_nyquist

MIN_WINDOW_SAMPLES = 8


class SignalSource(Protocol):
    def query(self, t): ...


class Mode(str, Enum):
    PROBE = "probe"
    STEADY = "steady"


@dataclass(frozen=True)
class SamplerConfig:
    initial_rate: float
    min_rate: float
    max_rate: float
    window: float = 21600.0
    step: float = 300.0
    probe_factor: float = 2.0
    headroom: float = 1.2
    decrease_patience: int = 3
    memory_depth: int = 8
    dual_ratio: float = 1.5
    alias_threshold: float = 0.1
    energy_fraction: float = 0.99
    noise_amplitude: float = 0.0

    def __post_init__(self):
        problems = []
        if not 0 < self.step <= self.window:
            problems.append("need 0 < step <= window")
        if not 0 < self.min_rate <= self.initial_rate <= self.max_rate:
            problems.append("need 0 < min_rate <= initial_rate <= max_rate")
        if not self.probe_factor > 1:
            problems.append("probe_factor must exceed 1")
        if not self.headroom >= 1:
            problems.append("headroom must be at least 1")
        if self.decrease_patience < 1:
            problems.append("decrease_patience must be positive")
        if self.memory_depth < 0:
            problems.append("memory_depth must be non-negative")
        if not self.dual_ratio > 1 or abs(self.dual_ratio - round(self.dual_ratio)) < 1e-9:
            problems.append("dual_ratio must be a non-integer above 1")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class SamplerState:
    mode: Mode
    current_rate: float
    remembered_max: tuple[float, ...] = ()
    windows_below: int = 0
    # largest headroom-scaled target seen during the current run of below-rate windows
    pending_target: float = 0.0
    # highest Nyquist estimate since the last decrease
    episode_peak: float = 0.0

    @classmethod
    def initial(cls, config: SamplerConfig) -> "SamplerState":
        return cls(Mode.PROBE, _snap(config.initial_rate, config))


@dataclass(frozen=True)
class WindowRecord:
    """One decision; ``window_start`` is the decision time minus the window length."""

    window_start: float
    mode: Mode
    rate_used: float
    next_rate: float
    nyquist_estimate: Optional[NyquistEstimate]
    verdict: Optional[AliasVerdict]

    @property
    def aliased(self) -> bool:
        return self.verdict is not None and (
            self.verdict.aliased or isinstance(self.nyquist_estimate, Aliased)
        )



@dataclass(frozen=True)
class Epoch:
    """Stretch of time collected at one fixed pair of rates."""

    start: float
    end: float
    f1: Optional[float]
    f2: float


@dataclass
class SamplingLog:
    records: list[WindowRecord] = field(default_factory=list)
    epochs: list[Epoch] = field(default_factory=list)
    timestamps: np.ndarray = field(default_factory=lambda: np.empty(0))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))
    config: Optional[SamplerConfig] = None
    horizon: float = 0.0

    @property
    def sample_count(self) -> int:
        return int(self.timestamps.size)


# --- rate grid -------------------------------------------------------------------


def _clamp(rate: float, config: SamplerConfig) -> float:
    return min(max(rate, config.min_rate), config.max_rate)


def _snap(rate: float, config: SamplerConfig) -> float:
    """Round ``rate`` up to whole samples per window, then clamp to the bounds."""
    if rate <= config.min_rate:
        return config.min_rate
    snapped = max(1, math.ceil(rate * config.window - 1e-9)) / config.window
    return _clamp(snapped, config)


def dual_rates(rate: float, config: SamplerConfig) -> DualRatePlan:
    """Fast/slow pair for base ``rate``; on the grid the fast rate is rounded up to whole samples."""
    k2 = rate * config.window
    # with one sample per window every whole-sample fast rate is an integer multiple
    if abs(k2 - round(k2)) < 1e-9 and round(k2) > 1:
        k2 = int(round(k2))
        k1 = math.ceil(config.dual_ratio * k2 - 1e-9)
        if k1 % k2 == 0:
            k1 += 1
        return DualRatePlan(k1 / config.window, rate)
    return DualRatePlan(config.dual_ratio * rate, rate)


# --- one decision ----------------------------------------------------------------


def _probe_rate(state: SamplerState, config: SamplerConfig) -> float:
    rate = state.current_rate * config.probe_factor
    above = [config.headroom * m for m in state.remembered_max if config.headroom * m > state.current_rate * (1 + 1e-9)]
    if above:
        rate = max(rate, min(above))
    return _snap(rate, config)


def _remember(memory: tuple[float, ...], peak: float, depth: int) -> tuple[float, ...]:
    if depth == 0 or peak <= 0:
        return memory
    # a level within 10% of an existing one refreshes it instead of taking a new slot
    similar = [m for m in memory if abs(m - peak) <= 0.1 * max(m, peak)]
    kept = [m for m in memory if m not in similar]
    kept.append(max([peak, *similar]))
    return tuple(kept[-depth:])


def _decide(state: SamplerState, window_samples, config: SamplerConfig):
    s1, s2 = window_samples
    plan = dual_rates(state.current_rate, config)
    if not (math.isclose(s2.rate, plan.f2, rel_tol=1e-9) and math.isclose(s1.rate, plan.f1, rel_tol=1e-9)):
        raise ConfigViolation(
            f"window sampled at ({s1.rate}, {s2.rate}) Hz but state expects ({plan.f1}, {plan.f2}) Hz"
        )
    if len(s2) < MIN_WINDOW_SAMPLES:
        # too sparse to judge, so the rate cannot be shown adequate: probe up
        new = replace(state, mode=Mode.PROBE, current_rate=_probe_rate(state, config), windows_below=0, pending_target=0.0)
        return new, None, None

    verdict = detect_aliasing(s1, s2, plan, config.alias_threshold, config.noise_amplitude)
    estimate: Optional[NyquistEstimate] = None
    if not verdict.aliased:
        try:
            estimate = estimate_nyquist(s1, config.energy_fraction)
        except DegenerateSignal:
            estimate = Rate(0.0)

    if verdict.aliased or isinstance(estimate, Aliased):
        new = replace(
            state,
            mode=Mode.PROBE,
            current_rate=_probe_rate(state, config),
            windows_below=0,
            pending_target=0.0,
        )
        return new, estimate, verdict

    nu = estimate.hz
    target = config.headroom * nu
    peak = max(state.episode_peak, nu)
    if _snap(target, config) < state.current_rate:
        below = state.windows_below + 1
        pending = max(state.pending_target, target)
        if below >= config.decrease_patience:
            new_rate = _snap(pending, config)
            memory = state.remembered_max
            if config.headroom * peak > new_rate:
                memory = _remember(memory, peak, config.memory_depth)
            new = SamplerState(Mode.STEADY, new_rate, memory, 0, 0.0, nu)
        else:
            new = replace(state, mode=Mode.STEADY, windows_below=below, pending_target=pending, episode_peak=peak)
    else:
        new = replace(state, mode=Mode.STEADY, windows_below=0, pending_target=0.0, episode_peak=peak)
    return new, estimate, verdict


def step_window(state: SamplerState, window_samples: Sequence[UniformSeries], config: SamplerConfig):
    """Advance the controller by one analysis window.

    ``window_samples`` is ``(fast, slow)``: the same window sampled at the plan's
    ``f1`` and ``f2``.  Returns ``(new_state, rate_to_use_next)``.

    Aliasing, from either the dual-rate comparison or an :class:`Aliased`
    estimate, puts the controller in probe mode and multiplies the rate (or
    jumps to a remembered level if that is higher).  Otherwise the rate is
    lowered to ``headroom x estimate`` once that target has stayed below the
    current rate for ``decrease_patience`` consecutive windows.
    """
    new, _, _ = _decide(state, window_samples, config)
    return new, new.current_rate


# --- simulation --------------------------------------------------------------------


def _grid(anchor: float, rate: float, start: float, end: float) -> np.ndarray:
    """Instants ``anchor + j / rate`` inside ``[start, end)``."""
    j0 = math.ceil((start - anchor) * rate - 1e-9)
    j1 = math.ceil((end - anchor) * rate - 1e-9)
    return anchor + np.arange(j0, j1) / rate


def _merge(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    t = np.sort(np.concatenate([a, b]))
    if t.size < 2:
        return t
    keep = np.concatenate([[True], np.diff(t) > tol])
    return t[keep]


def _epoch_times(ep: Epoch) -> np.ndarray:
    t2 = _grid(ep.start, ep.f2, ep.start, ep.end)
    if ep.f1 is None:
        return t2
    t1 = _grid(ep.start, ep.f1, ep.start, ep.end)
    return _merge(t1, t2, 1e-9 / ep.f1)


def run(source: SignalSource, config: SamplerConfig, horizon: float) -> SamplingLog:
    """Drive the controller against ``source`` from t=0 to ``horizon`` seconds."""
    if horizon < config.window:
        raise HorizonTooShort(f"horizon {horizon} s is shorter than one window ({config.window} s)")
    state = SamplerState.initial(config)
    log = SamplingLog(config=config, horizon=horizon)
    anchor = 0.0
    decision = config.window
    eps = 1e-9 * config.window
    while decision <= horizon + eps:
        plan = dual_rates(state.current_rate, config)
        w0 = decision - config.window
        t1 = _grid(anchor, plan.f1, w0, decision)
        t2 = _grid(anchor, plan.f2, w0, decision)
        s1 = UniformSeries(source.query(t1), plan.f1, t1[0] if t1.size else w0)
        s2 = UniformSeries(source.query(t2), plan.f2, t2[0] if t2.size else w0)
        new, estimate, verdict = _decide(state, (s1, s2), config)
        log.records.append(WindowRecord(w0, new.mode, state.current_rate, new.current_rate, estimate, verdict))
        if new.current_rate != state.current_rate:
            log.epochs.append(Epoch(anchor, decision, plan.f1, plan.f2))
            anchor = decision
            decision += config.window
        else:
            decision += config.step
        state = new
    plan = dual_rates(state.current_rate, config)
    log.epochs.append(Epoch(anchor, horizon, plan.f1, plan.f2))
    times = np.concatenate([_epoch_times(ep) for ep in log.epochs])
    log.timestamps = times
    log.values = np.asarray(source.query(times), dtype=float) if times.size else np.empty(0)
    return log


def fixed_rate_log(source: SignalSource, rate: float, horizon: float, dual_ratio: Optional[float] = None) -> SamplingLog:
    """What a plain poller at ``rate`` collects; pass ``dual_ratio`` to add the fast stream."""
    ep = Epoch(0.0, horizon, None if dual_ratio is None else dual_ratio * rate, rate)
    times = _epoch_times(ep)
    return SamplingLog([], [ep], times, np.asarray(source.query(times), dtype=float), None, horizon)


def total_cost(log: SamplingLog) -> int:
    """Samples taken, both streams counted, coincident instants once."""
    return log.sample_count


# --- export --------------------------------------------------------------------------


def _atomic_csv(path, header_comments, header, rows):
    from .io import atomic_write

    def emit(fh):
        for line in header_comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    atomic_write(path, emit)


def config_comments(config: Optional[SamplerConfig], horizon: float) -> list[str]:
    if config is None:
        return [f"horizon={horizon!r}"]
    fields = ", ".join(f"{k}={getattr(config, k)!r}" for k in config.__dataclass_fields__)
    return [f"window={config.window!r} step={config.step!r}", fields, f"horizon={horizon!r}"]


def write_log_csv(log: SamplingLog, path) -> None:
    rows = []
    for r in log.records:
        est = "" if r.nyquist_estimate is None else repr(r.nyquist_estimate.sentinel())
        if r.nyquist_estimate is None and r.aliased:
            est = "-1.0"
        rows.append([repr(r.window_start), r.mode.value, repr(r.rate_used), est, "true" if r.aliased else "false"])
    _atomic_csv(
        path,
        config_comments(log.config, log.horizon),
        ["window_start", "mode", "rate_hz", "nyquist_estimate_hz", "aliased"],
        rows,
    )


def write_samples_csv(log: SamplingLog, path) -> None:
    rows = ([repr(float(t)), repr(float(v))] for t, v in zip(log.timestamps, log.values))
    _atomic_csv(path, [], ["timestamp", "value"], rows)
