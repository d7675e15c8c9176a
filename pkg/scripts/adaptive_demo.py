"""Adaptive sampler on a slow two-tone signal, with optional 5x frequency jumps.

Scenarios (window W = 6 h):

* ``up``: start 16x below headroom x Nyquist and probe up.
* ``down``: start 100x oversampled and descend.
* ``events``: the top frequency jumps 5x at 10 W, drops back at 20 W, and
  jumps again at 30 W; the second jump should be answered from rate memory.

Writes a per-window log CSV per scenario into ``--out`` and prints the cost
against fixed-rate baselines.
"""

import argparse
from pathlib import Path

from nyqmon.sampler import SamplerConfig, fixed_rate_log, run, total_cost, write_log_csv
from nyqmon.synth import ChangeEvent, Component, SignalSpec, SpecSource, true_nyquist

W = 21600.0
F = 200 / W
LOW = (Component(F, 1.0, 0.3), Component(F / 4, 2.0, 0.1))
HIGH = LOW + (Component(5 * F, 1.0, 0.2),)


def scenarios():
    slow = SignalSpec(LOW, offset=5.0)
    nu = true_nyquist(slow)
    events = SignalSpec(LOW, offset=5.0, change_events=(ChangeEvent(10 * W, HIGH), ChangeEvent(20 * W, LOW), ChangeEvent(30 * W, HIGH)))
    return {
        "up": (slow, 1.2 * nu / 16, 10 * W),
        "down": (slow, 100 * nu, 50 * W),
        "events": (events, 1.2 * nu, 40 * W),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("adaptive_out"))
    ap.add_argument("--memory-depth", type=int, default=8)
    ap.add_argument("--verbose", action="store_true", help="print every window, not just rate changes and alias flags")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for name, (spec, r0, horizon) in scenarios().items():
        config = SamplerConfig(initial_rate=r0, min_rate=1e-5, max_rate=10.0, memory_depth=args.memory_depth)
        src = SpecSource(spec)
        log = run(src, config, horizon)
        write_log_csv(log, args.out / f"{name}_log.csv")
        print(f"== {name}: initial {r0 * W:.1f}/W, horizon {horizon / W:.0f} W")
        for r in log.records:
            if not (args.verbose or r.aliased or r.next_rate != r.rate_used):
                continue
            est = "-" if r.nyquist_estimate is None else f"{r.nyquist_estimate.sentinel() * W:8.1f}/W"
            flag = "ALIASED" if r.aliased else ""
            print(f"  t={r.window_start / W:6.2f} W  {r.mode.value:6s}  {r.rate_used * W:8.1f}/W -> {r.next_rate * W:8.1f}/W  est {est} {flag}")
        cost = total_cost(log)
        single = total_cost(fixed_rate_log(src, r0, horizon))
        dual = total_cost(fixed_rate_log(src, r0, horizon, dual_ratio=config.dual_ratio))
        print(f"  cost {cost}  vs fixed single {single} ({cost / single:.4f})  vs fixed dual {dual} ({cost / dual:.4f})")


if __name__ == "__main__":
    main()
