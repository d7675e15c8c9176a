"""False-positive / false-negative sweep of the dual-rate alias detector.

Each seed draws 50 band-limited specs (1-4 tones below f2/2) and 50 specs that
add one tone in (f2/2, f1/2) holding 10-50% of the energy, with f2 = 1 Hz,
f1 = 1.5 Hz and a 400 s window.

* ``aligned``: every tone sits on a bin of the 400 s window and the aliased
  tone's fold does not coincide with an in-band tone.
* ``off-bin``: tone frequencies are continuous, so spectral leakage blurs the
  comparison; tones near 10% energy can fall just under the threshold.
"""

import argparse
import math

import numpy as np

from nyqmon.alias import DEFAULT_THRESHOLD, DualRatePlan, detect_aliasing
from nyqmon.synth import Component, SignalSpec, generate

T = 400.0
PLAN = DualRatePlan(1.5, 1.0)


def draw(rng, aliased, aligned):
    k = int(rng.integers(1, 5))
    if aligned:
        bins = rng.choice(np.arange(1, 180), size=k, replace=False)
        freqs = bins / T
    else:
        freqs = rng.uniform(1 / T, 0.45, size=k)
    amps = rng.uniform(1.0, 10.0, size=k)
    comps = [Component(f, a, p) for f, a, p in zip(freqs, amps, rng.uniform(0, 2 * math.pi, k))]
    if aliased:
        eps = rng.uniform(0.1, 0.5)
        if aligned:
            f = int(rng.choice([b for b in range(201, 300) if int(T) - b not in set(bins)])) / T
        else:
            f = rng.uniform(0.5 + 1 / T, 0.75 - 1 / T)
        comps.append(Component(f, math.sqrt(eps / (1 - eps) * float(np.sum(amps**2))), rng.uniform(0, 2 * math.pi)))
    return SignalSpec(tuple(comps), offset=float(rng.uniform(0, 20)))


def sweep(seed, aligned, threshold):
    rng = np.random.default_rng(seed)
    good, bad = [], []
    for aliased in [False] * 50 + [True] * 50:
        spec = draw(rng, aliased, aligned)
        v = detect_aliasing(generate(spec, PLAN.f1, T), generate(spec, PLAN.f2, T), PLAN, threshold)
        (bad if aliased else good).append(v.discrepancy)
    return np.array(good), np.array(bad)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    args = ap.parse_args()

    for aligned in (True, False):
        print("aligned" if aligned else "off-bin")
        for seed in range(args.seeds):
            good, bad = sweep(seed, aligned, args.threshold)
            fp = int(np.sum(good > args.threshold))
            fn = int(np.sum(bad <= args.threshold))
            print(f"  seed {seed}: FP {fp:2d}  FN {fn:2d}  band-limited max {good.max():.2e}  aliased min {bad.min():.3f}")


if __name__ == "__main__":
    main()
