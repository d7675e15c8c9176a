"""Two tones at 400 and 440 Hz sampled at 890, 600 and 800 Hz.

Prints the spectral peaks, the Nyquist estimate and the error of an ideal
low-pass reconstruction at 8 kHz for each rate.  With ``--out`` the one-sided
spectra are also written as CSV.
"""

import argparse
from pathlib import Path

import numpy as np

from nyqmon.alias import plan_dual_rates, detect_aliasing
from nyqmon.io import atomic_write_text
from nyqmon.spectral import dft, estimate_nyquist, low_pass_reconstruct, spectrum_csv
from nyqmon.synth import two_tone_spec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rates", type=float, nargs="+", default=[890.0, 600.0, 800.0])
    ap.add_argument("--out", type=Path, help="directory for spectrum CSVs")
    args = ap.parse_args()

    spec = two_tone_spec()
    reference = generate(spec, 8000.0, 1.0)
    for rate in args.rates:
        us = generate(spec, rate, 1.0)
        s = dft(us)
        freqs, psd = s.one_sided()
        peaks = [float(f) for f in freqs[psd > 1e-6 * psd.max()]]
        est = estimate_nyquist(us)
        recon = low_pass_reconstruct(us, rate / 2, 8000.0)
        err = np.linalg.norm(recon.values - reference.values) / np.linalg.norm(reference.values)
        plan = plan_dual_rates(rate)
        verdict = detect_aliasing(generate(spec, plan.f1, 1.0), us, plan)
        print(
            f"{rate:6.0f} Hz  peaks {peaks}  estimate {est}  recon rel err {err:.2e}  "
            f"dual-rate {'ALIASED' if verdict.aliased else 'ok'} ({verdict.discrepancy:.3g})"
        )
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            atomic_write_text(args.out / f"spectrum_{rate:g}Hz.csv", spectrum_csv(s))


if __name__ == "__main__":
    main()
