"""``nyqmon`` command line: analyze, roundtrip, simulate, detect-alias, generate."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io as trace_io
from .alias import DEFAULT_RATIO, DEFAULT_THRESHOLD, DualRatePlan, detect_aliasing
from .errors import NyqmonError
from .report import DEFAULT_STEP, ReportConfig, batch_report, write_report
from .sampler import SamplerConfig, fixed_rate_log, run, total_cost, write_log_csv, write_samples_csv
from .series import DEFAULT_MAX_GAP, QuantizationSpec, decimate, l2_distance, quantize, regularize
from .spectral import (
    DEFAULT_ENERGY_FRACTION,
    Aliased,
    estimate_nyquist,
    low_pass_reconstruct,
    nearest_divisor_rate,
)
from .synth import SpecSource, generate, load_spec, true_nyquist


class CommandError(Exception):
    """A user-facing failure that should end the command with a message."""


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _load_uniform(path: str, max_gap: float):
    ts, meta = trace_io.load_trace(path)
    if len(ts) < 2:
        raise CommandError(f"{path}: need at least 2 samples")
    rate = 1.0 / float(np.median(np.diff(ts.timestamps)))
    return regularize(ts, rate, max_gap), meta


# --- analyze ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    config = ReportConfig(args.window, args.step, args.energy_fraction, args.max_gap, args.workers)
    rs = batch_report(args.inputs, config)
    for r in rs.reports:
        nyq = "ALIASED" if isinstance(r.nyquist, Aliased) else f"{r.nyquist.hz:.6g} Hz"
        ratio = "-" if r.oversampling_ratio is None else f"{r.oversampling_ratio:.4g}x"
        print(f"{r.path}\t{r.metric_name or '-'}\trate {r.actual_rate:.6g} Hz\tnyquist {nyq}\tratio {ratio}")
    for p, why in rs.skipped:
        print(f"skipped {p}: {why}", file=sys.stderr)
    written = write_report(rs, args.out)
    for kind, path in written.items():
        print(f"wrote {kind}: {path}")
    return 0


# --- roundtrip -------------------------------------------------------------------


def cmd_roundtrip(args) -> int:
    us, meta = _load_uniform(args.input, args.max_gap)
    q = None if args.quantum is None else QuantizationSpec(args.quantum, args.origin)
    est = estimate_nyquist(us, args.energy_fraction)
    if isinstance(est, Aliased):
        raise CommandError(f"ALIASED: {args.input} needs every frequency bin; no cutoff can be chosen")
    low_rate = nearest_divisor_rate(us, max(est.hz, 1e-300), strict=args.strict)
    cutoff = est.hz / 2 if args.cutoff is None else args.cutoff
    if cutoff > low_rate / 2 * (1 + 1e-12):
        raise CommandError(
            f"cutoff {cutoff:g} Hz is above the decimated Nyquist frequency {low_rate / 2:g} Hz"
        )
    low = decimate(us, low_rate)
    rebuilt = low_pass_reconstruct(low, cutoff, us.rate)
    if q is not None:
        rebuilt = quantize(rebuilt, q)
    dist = l2_distance(us, rebuilt)
    norm = float(np.linalg.norm(us.values))
    trace_io.write_uniform(rebuilt, args.out, {"device": meta.get("device", "")})
    print(f"nyquist {est.hz:.6g} Hz, kept {low_rate:.6g} Hz ({len(low)} of {len(us)} samples), cutoff {cutoff:.6g} Hz")
    print(f"l2_distance {dist!r}")
    print(f"relative {dist / norm if norm else 0.0!r}")
    print(f"wrote {args.out}")
    return 0


# --- simulate --------------------------------------------------------------------


def _sampler_config(args) -> SamplerConfig:
    max_rate = args.max_rate if args.max_rate is not None else 1000 * args.initial_rate
    return SamplerConfig(
        initial_rate=args.initial_rate,
        min_rate=args.min_rate,
        max_rate=max_rate,
        window=args.window,
        step=args.step,
        probe_factor=args.probe_factor,
        headroom=args.headroom,
        decrease_patience=args.patience,
        memory_depth=args.memory_depth,
        dual_ratio=args.dual_ratio,
        alias_threshold=args.alias_threshold,
        energy_fraction=args.energy_fraction,
        noise_amplitude=args.noise_amplitude,
    )


def cmd_simulate(args) -> int:
    config = _sampler_config(args)
    horizon = args.horizon if args.horizon is not None else 10 * config.window
    spec = load_spec(args.spec)
    source = SpecSource(spec)
    log = run(source, config, horizon)
    write_log_csv(log, args.log)
    if args.samples:
        write_samples_csv(log, args.samples)
    cost = total_cost(log)
    single = total_cost(fixed_rate_log(source, config.initial_rate, horizon))
    dual = total_cost(fixed_rate_log(source, config.initial_rate, horizon, config.dual_ratio))
    last = log.records[-1]
    truth = true_nyquist(spec, horizon - config.window, horizon)
    print(f"windows {len(log.records)}, final mode {last.mode.value}, final rate {last.next_rate:.6g} Hz")
    print(f"true nyquist over last window {truth:.6g} Hz (headroom x nyquist = {config.headroom * truth:.6g} Hz)")
    print(f"total_cost {cost}")
    print(f"fixed baseline at {config.initial_rate:g} Hz: {single} (single stream), {dual} (dual stream)")
    print(f"cost ratio {cost / single:.4f} (single), {cost / dual:.4f} (dual)")
    print(f"wrote {args.log}" + (f", {args.samples}" if args.samples else ""))
    return 0


# --- detect-alias ----------------------------------------------------------------


def cmd_detect_alias(args) -> int:
    if args.spec:
        if args.f2 is None:
            raise CommandError("--spec needs --f2")
        f1 = args.f1 if args.f1 is not None else args.ratio * args.f2
        plan = DualRatePlan(f1, args.f2)
        spec = load_spec(args.spec)
        s1 = generate(spec, plan.f1, args.duration, args.start)
        s2 = generate(spec, plan.f2, args.duration, args.start)
    else:
        if not (args.fast and args.slow):
            raise CommandError("give either --spec or both --fast and --slow trace files")
        s1, _ = _load_uniform(args.fast, args.max_gap)
        s2, _ = _load_uniform(args.slow, args.max_gap)
        plan = DualRatePlan(args.f1 or s1.rate, args.f2 or s2.rate)
        s1 = s1.with_values(s1.values, rate=plan.f1)
        s2 = s2.with_values(s2.values, rate=plan.f2)
    verdict = detect_aliasing(s1, s2, plan, args.threshold, args.noise_amplitude)
    print("ALIASED" if verdict.aliased else "NOT ALIASED")
    print(f"discrepancy {verdict.discrepancy!r} (threshold {args.threshold:g})")
    lo, hi = verdict.compared_band
    print(f"compared band {lo:g} .. {hi:g} Hz at f1={plan.f1:g} Hz, f2={plan.f2:g} Hz")
    return 0


# --- generate --------------------------------------------------------------------


def cmd_generate(args) -> int:
    spec = load_spec(args.spec)
    us = generate(spec, args.rate, args.duration, args.start, args.metric, args.unit)
    meta = {"device": args.device} if args.device else {}
    trace_io.write_uniform(us, args.out, meta)
    print(f"wrote {len(us)} samples at {args.rate:g} Hz to {args.out}")
    return 0


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nyqmon", description="Nyquist-rate analysis and adaptive sampling for metric traces.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="estimate Nyquist rates and oversampling ratios for traces")
    a.add_argument("inputs", nargs="+", help="trace CSV files (timestamp,value)")
    a.add_argument("--out", required=True, help="report JSON path; CSVs are written beside it")
    a.add_argument("--window", type=_positive, default=None, help="per-window analysis length in seconds (default: whole trace)")
    a.add_argument("--step", type=_positive, default=DEFAULT_STEP, help="window advance in seconds (default 300)")
    a.add_argument("--energy-fraction", type=_fraction, default=DEFAULT_ENERGY_FRACTION)
    a.add_argument("--max-gap", type=_positive, default=DEFAULT_MAX_GAP, help="largest gap, in sample intervals, to fill")
    a.add_argument("--workers", type=int, default=1)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("roundtrip", help="decimate to the Nyquist rate, reconstruct, report the L2 distance")
    r.add_argument("input")
    r.add_argument("--out", required=True, help="reconstructed trace CSV")
    r.add_argument("--quantum", type=_positive, default=None, help="sensor quantum to re-apply after reconstruction")
    r.add_argument("--origin", type=float, default=0.0, help="quantization grid origin")
    r.add_argument("--cutoff", type=float, default=None, help="low-pass cutoff in Hz (default: estimate / 2)")
    r.add_argument("--strict", action="store_true", help="keep a rate strictly above the estimate")
    r.add_argument("--energy-fraction", type=_fraction, default=DEFAULT_ENERGY_FRACTION)
    r.add_argument("--max-gap", type=_positive, default=DEFAULT_MAX_GAP)
    r.set_defaults(func=cmd_roundtrip)

    s = sub.add_parser("simulate", help="run the adaptive sampler against a signal spec")
    s.add_argument("spec", help="signal spec file")
    s.add_argument("--log", required=True, help="per-window log CSV")
    s.add_argument("--samples", default=None, help="optional CSV of every sample taken")
    s.add_argument("--initial-rate", type=_positive, required=True)
    s.add_argument("--min-rate", type=_positive, default=1e-6)
    s.add_argument("--max-rate", type=_positive, default=None, help="default 1000 x initial rate")
    s.add_argument("--horizon", type=_positive, default=None, help="seconds (default 10 windows)")
    s.add_argument("--window", type=_positive, default=21600.0)
    s.add_argument("--step", type=_positive, default=300.0)
    s.add_argument("--probe-factor", type=float, default=2.0)
    s.add_argument("--headroom", type=float, default=1.2)
    s.add_argument("--patience", type=int, default=3, help="windows below target before decreasing")
    s.add_argument("--memory-depth", type=int, default=8)
    s.add_argument("--dual-ratio", type=float, default=DEFAULT_RATIO)
    s.add_argument("--alias-threshold", type=float, default=DEFAULT_THRESHOLD)
    s.add_argument("--energy-fraction", type=_fraction, default=DEFAULT_ENERGY_FRACTION)
    s.add_argument("--noise-amplitude", type=float, default=0.0)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("detect-alias", help="compare a signal sampled at two rates")
    d.add_argument("--fast", help="trace sampled at f1")
    d.add_argument("--slow", help="trace sampled at f2")
    d.add_argument("--spec", help="signal spec to sample instead of trace files")
    d.add_argument("--f1", type=_positive, default=None, help="fast rate in Hz (default: ratio x f2, or inferred)")
    d.add_argument("--f2", type=_positive, default=None, help="slow rate in Hz")
    d.add_argument("--ratio", type=_positive, default=DEFAULT_RATIO)
    d.add_argument("--duration", type=_positive, default=21600.0, help="seconds sampled from --spec")
    d.add_argument("--start", type=float, default=0.0)
    d.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    d.add_argument("--noise-amplitude", type=float, default=0.0)
    d.add_argument("--max-gap", type=_positive, default=DEFAULT_MAX_GAP)
    d.set_defaults(func=cmd_detect_alias)

    g = sub.add_parser("generate", help="sample a signal spec into a trace CSV")
    g.add_argument("spec")
    g.add_argument("--rate", type=_positive, required=True)
    g.add_argument("--duration", type=_positive, required=True)
    g.add_argument("--start", type=float, default=0.0)
    g.add_argument("--out", required=True)
    g.add_argument("--metric", default="synthetic")
    g.add_argument("--unit", default="")
    g.add_argument("--device", default="")
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, NyqmonError, ValueError, OSError) as exc:
        name = type(exc).__name__
        prefix = "" if isinstance(exc, CommandError) else f"{name}: "
        print(f"nyqmon {args.command}: error: {prefix}{exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
