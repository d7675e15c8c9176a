"""Nyquist-rate estimation, alias detection and adaptive sampling for monitoring metrics."""

from .alias import AliasVerdict, DualRatePlan, detect_aliasing, plan_dual_rates
from .errors import NyqmonError
from .report import ReportConfig, ReportSet, TraceReport, analyze_trace, batch_report
from .sampler import SamplerConfig, SamplerState, SamplingLog, run, step_window, total_cost
from .series import (
    QuantizationSpec,
    TimeSeries,
    UniformSeries,
    decimate,
    l2_distance,
    quantize,
    regularize,
)
from .spectral import (
    Aliased,
    Rate,
    Spectrum,
    dft,
    estimate_nyquist,
    inverse_dft,
    low_pass_reconstruct,
    reconstruct_with_quantization,
)
from .synth import Component, SignalSpec, generate, query, true_nyquist

__all__ = [
    "AliasVerdict", "DualRatePlan", "detect_aliasing", "plan_dual_rates",
    "NyqmonError",
    "ReportConfig", "ReportSet", "TraceReport", "analyze_trace", "batch_report",
    "SamplerConfig", "SamplerState", "SamplingLog", "run", "step_window", "total_cost",
    "QuantizationSpec", "TimeSeries", "UniformSeries", "decimate", "l2_distance", "quantize", "regularize",
    "Aliased", "Rate", "Spectrum", "dft", "estimate_nyquist", "inverse_dft", "low_pass_reconstruct",
    "reconstruct_with_quantization",
    "Component", "SignalSpec", "generate", "query", "true_nyquist",
]

__version__ = "0.1.0"
