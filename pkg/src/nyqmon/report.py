"""Batch analysis of metric traces: per-trace Nyquist estimates and oversampling ratios.

Each trace is regularised at its own median sampling rate and run through
:func:`~nyqmon.spectral.estimate_nyquist`.  The batch result keeps one record
per trace, the traces that could not be analysed (with the reason), and two
summaries: quartiles of Nyquist rates per metric and the empirical CDF of
oversampling ratios.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as trace_io
from .errors import AllTracesFailed, TooShort
from .series import DEFAULT_MAX_GAP, TimeSeries, UniformSeries, regularize
from .spectral import (
    DEFAULT_ENERGY_FRACTION,
    MIN_ESTIMATE_SAMPLES,
    Aliased,
    NyquistEstimate,
    Rate,
    estimate_nyquist,
)

ALIASED_SENTINEL = -1.0
DEFAULT_WINDOW = 21600.0
DEFAULT_STEP = 300.0


@dataclass(frozen=True)
class ReportConfig:
    """``window=None`` analyses each trace as a whole."""

    window: Optional[float] = None
    step: float = DEFAULT_STEP
    energy_fraction: float = DEFAULT_ENERGY_FRACTION
    max_gap: float = DEFAULT_MAX_GAP
    workers: int = 1

    def __post_init__(self):
        if self.window is not None and not 0 < self.step <= self.window:
            raise ValueError("need 0 < step <= window")
        if not 0 < self.energy_fraction < 1:
            raise ValueError("energy_fraction must be in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class WindowEstimate:
    start_time: float
    nyquist: NyquistEstimate


@dataclass(frozen=True)
class TraceReport:
    metric_name: str
    device_id: str
    actual_rate: float
    nyquist: NyquistEstimate
    samples_analyzed: int
    windows: tuple[WindowEstimate, ...] = ()
    path: str = ""

    @property
    def oversampling_ratio(self) -> Optional[float]:
        """``actual_rate / nyquist``; ``None`` for an aliased trace."""
        if isinstance(self.nyquist, Aliased):
            return None
        return self.actual_rate / self.nyquist.hz

    @property
    def ratio_sentinel(self) -> float:
        r = self.oversampling_ratio
        return ALIASED_SENTINEL if r is None else r

    def as_dict(self) -> dict:
        d = {
            "path": self.path,
            "metric": self.metric_name,
            "device": self.device_id,
            "actual_rate_hz": self.actual_rate,
            "nyquist_hz": self.nyquist.sentinel(),
            "aliased": isinstance(self.nyquist, Aliased),
            "oversampling_ratio": self.ratio_sentinel,
            "samples_analyzed": self.samples_analyzed,
        }
        if self.windows:
            d["windows"] = [
                {"start_time": w.start_time, "nyquist_hz": w.nyquist.sentinel()} for w in self.windows
            ]
        return d


@dataclass(frozen=True)
class MetricSummary:
    metric: str
    min: float
    q1: float
    median: float
    q3: float
    max: float
    traces: int
    aliased: int


def _headline(estimates: Sequence[NyquistEstimate]) -> NyquistEstimate:
    if any(isinstance(e, Aliased) for e in estimates):
        return Aliased()
    return max(estimates, key=lambda e: e.hz)


def analyze_trace(
    ts: TimeSeries,
    window: Optional[float] = None,
    step: float = DEFAULT_STEP,
    energy_fraction: float = DEFAULT_ENERGY_FRACTION,
    max_gap: float = DEFAULT_MAX_GAP,
    device_id: str = "",
    path: str = "",
) -> TraceReport:
    """Estimate the Nyquist rate of one trace.

    The trace is regularised at ``1 / median gap``.  With a ``window`` (seconds)
    the estimate is repeated over windows advanced by ``step`` and the
    headline is the largest of them, or Aliased if any window is.
    """
    if len(ts) < MIN_ESTIMATE_SAMPLES:
        raise TooShort(f"need at least {MIN_ESTIMATE_SAMPLES} points, got {len(ts)}")
    actual_rate = 1.0 / float(np.median(np.diff(ts.timestamps)))
    us = regularize(ts, actual_rate, max_gap)
    windows: tuple[WindowEstimate, ...] = ()
    if window is None or window * actual_rate >= len(us):
        nyquist = estimate_nyquist(us, energy_fraction)
    else:
        n_win = max(MIN_ESTIMATE_SAMPLES, int(round(window * actual_rate)))
        n_step = max(1, int(round(step * actual_rate)))
        found = []
        for i in range(0, len(us) - n_win + 1, n_step):
            part = UniformSeries(us.values[i : i + n_win], us.rate, us.start_time + i / us.rate, us.metric_name, us.unit)
            found.append(WindowEstimate(part.start_time, estimate_nyquist(part, energy_fraction)))
        windows = tuple(found)
        nyquist = _headline([w.nyquist for w in windows])
    return TraceReport(ts.metric_name, device_id, actual_rate, nyquist, len(us), windows, path)


@dataclass
class ReportSet:
    reports: list[TraceReport] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def cdf_points(self) -> list[tuple[float, float]]:
        """``(ratio, fraction)`` over every analysed trace, aliased ones first at ``-1``."""
        ratios = sorted(r.ratio_sentinel for r in self.reports)
        n = len(ratios)
        return [(x, (i + 1) / n) for i, x in enumerate(ratios)]

    def metric_summaries(self) -> list[MetricSummary]:
        by_metric: dict[str, list[TraceReport]] = {}
        for r in self.reports:
            by_metric.setdefault(r.metric_name, []).append(r)
        out = []
        for metric in sorted(by_metric):
            group = by_metric[metric]
            rates = np.array([r.nyquist.hz for r in group if isinstance(r.nyquist, Rate)])
            aliased = len(group) - rates.size
            if rates.size:
                q = np.percentile(rates, [0, 25, 50, 75, 100])
            else:
                q = [math.nan] * 5
            out.append(MetricSummary(metric, *map(float, q), len(group), aliased))
        return out

    def as_dict(self) -> dict:
        return {
            "traces": [r.as_dict() for r in self.reports],
            "skipped": [{"path": p, "reason": why} for p, why in self.skipped],
            "distributions": {
                "oversampling_cdf": [{"ratio": x, "cdf_fraction": f} for x, f in self.cdf_points()],
                "nyquist_by_metric": [
                    {
                        "metric": m.metric,
                        "min": _json_num(m.min),
                        "q1": _json_num(m.q1),
                        "median": _json_num(m.median),
                        "q3": _json_num(m.q3),
                        "max": _json_num(m.max),
                        "traces": m.traces,
                        "aliased": m.aliased,
                    }
                    for m in self.metric_summaries()
                ],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def cdf_csv(self) -> str:
        return _csv(["ratio", "cdf_fraction"], ([repr(x), repr(f)] for x, f in self.cdf_points()))

    def summary_csv(self) -> str:
        rows = (
            [m.metric, *(repr(v) for v in (m.min, m.q1, m.median, m.q3, m.max))]
            for m in self.metric_summaries()
        )
        return _csv(["metric", "min", "q1", "median", "q3", "max"], rows)

    def traces_csv(self) -> str:
        rows = (
            [r.path, r.metric_name, r.device_id, repr(r.actual_rate), repr(r.nyquist.sentinel()),
             repr(r.ratio_sentinel), str(r.samples_analyzed)]
            for r in self.reports
        )
        return _csv(
            ["path", "metric", "device", "actual_rate_hz", "nyquist_hz", "oversampling_ratio", "samples"],
            rows,
        )


def _json_num(x: float):
    return None if math.isnan(x) else x


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _analyze_path(path: str, config: ReportConfig):
    try:
        ts, meta = trace_io.load_trace(path)
        device = meta.get("device") or Path(path).stem
        return analyze_trace(
            ts, config.window, config.step, config.energy_fraction, config.max_gap, device, path
        ), None
    except (ValueError, OSError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def batch_report(paths: Sequence, config: ReportConfig = ReportConfig()) -> ReportSet:
    """Analyse every trace independently; failures are recorded, not raised.

    Raises AllTracesFailed only when no trace could be analysed.
    """
    if not paths:
        raise ValueError("no trace paths given")
    ordered = sorted(str(p) for p in paths)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(lambda p: _analyze_path(p, config), ordered))
    else:
        results = [_analyze_path(p, config) for p in ordered]
    rs = ReportSet()
    for p, (rep, why) in zip(ordered, results):
        if rep is None:
            rs.skipped.append((p, why))
        else:
            rs.reports.append(rep)
    if not rs.reports:
        detail = "; ".join(f"{p}: {why}" for p, why in rs.skipped)
        raise AllTracesFailed(f"all {len(ordered)} traces failed: {detail}")
    return rs


def write_report(rs: ReportSet, json_path) -> dict[str, Path]:
    """Write the JSON report plus ``*_cdf.csv``, ``*_nyquist.csv`` and ``*_traces.csv`` beside it."""
    base = Path(json_path)
    stem = base.with_suffix("")
    out = {
        "json": base,
        "cdf": Path(f"{stem}_cdf.csv"),
        "nyquist": Path(f"{stem}_nyquist.csv"),
        "traces": Path(f"{stem}_traces.csv"),
    }
    trace_io.atomic_write_text(out["json"], rs.to_json())
    trace_io.atomic_write_text(out["cdf"], rs.cdf_csv())
    trace_io.atomic_write_text(out["nyquist"], rs.summary_csv())
    trace_io.atomic_write_text(out["traces"], rs.traces_csv())
    return out
