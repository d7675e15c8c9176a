"""Trace corpora with a known answer, for checking the batch report end to end.

A trace of ``n`` samples at ``rate`` holding a single tone on bin ``j`` has
Nyquist rate ``2 j rate / n`` under the 99% rule, so its oversampling ratio
is ``n / (2 j)``.  Aliased traces put most of their energy on the Nyquist bin
itself, which is the case the rule reports as -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as trace_io
from .series import UniformSeries
from .synth import Component, SignalSpec, generate

PLANT_LENGTH = 2000
# ratio -> tone bin for PLANT_LENGTH samples; 1000/999 is the closest a tone can get to ratio 1
PLANTED_BINS = {
    1000 / 999: 999,
    2.0: 500,
    4.0: 250,
    5.0: 200,
    10.0: 100,
    20.0: 50,
    100.0: 10,
    250.0: 4,
    500.0: 2,
    1000.0: 1,
}


@dataclass(frozen=True)
class PlantedTrace:
    name: str
    series: UniformSeries
    ratio: Optional[float]  # None for an aliased trace
    device: str


def ratio_trace(ratio_bin: int, rate: float = 1.0, n: int = PLANT_LENGTH, metric: str = "planted",
                offset: float = 50.0, phase: float = 0.4) -> UniformSeries:
    spec = SignalSpec((Component(ratio_bin * rate / n, 1.0, phase),), offset=offset)
    return generate(spec, rate, n / rate, metric_name=metric)


def nyquist_bin_trace(rate: float = 1.0, n: int = PLANT_LENGTH, metric: str = "planted",
                      seed: int = 0) -> UniformSeries:
    """Alternating-sign samples plus a little broadband content: what a folded fast signal looks like."""
    rng = np.random.default_rng(seed)
    k = np.arange(n)
    x = 50.0 + np.cos(np.pi * k) + 0.05 * rng.standard_normal(n)
    return UniformSeries(x, rate, 0.0, metric)


def planted_corpus(rate: float = 1.0, aliased: int = 2) -> list[PlantedTrace]:
    """Ten traces with ratios from 1000/999 up to 1000, plus ``aliased`` aliased ones."""
    out = []
    for ratio, j in PLANTED_BINS.items():
        name = f"ratio_{ratio:09.3f}"
        out.append(PlantedTrace(name, ratio_trace(j, rate), ratio, f"dev-{j}"))
    for i in range(aliased):
        out.append(PlantedTrace(f"aliased_{i}", nyquist_bin_trace(rate, seed=i), None, f"dev-aliased-{i}"))
    return out


def write_corpus(traces: list[PlantedTrace], directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for tr in traces:
        p = d / f"{tr.name}.csv"
        trace_io.write_uniform(tr.series, p, {"device": tr.device})
        paths.append(p)
    return paths
