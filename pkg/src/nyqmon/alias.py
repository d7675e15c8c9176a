"""Aliasing detection by sampling the same signal at two rates.

If nothing in the signal lies above ``f2 / 2`` the two spectra agree below
that frequency.  Energy between ``f2 / 2`` and ``f1 / 2`` shows up at its true
place in the fast stream but folds back into the band in the slow one, so the
spectra disagree.  The ratio ``f1 / f2`` must not be an integer, otherwise the
folds of the two streams can coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegerRatio, RateMismatch, WindowMismatch
from .series import UniformSeries
from .spectral import Spectrum, dft, one_sided_psd

DEFAULT_RATIO = 1.5
DEFAULT_THRESHOLD = 0.1
_RATIO_TOL = 1e-9


def _near_integer(x: float) -> bool:
    return abs(x - round(x)) <= _RATIO_TOL * max(1.0, abs(x))


@dataclass(frozen=True)
class DualRatePlan:
    f1: float
    f2: float

    def __post_init__(self):
        if not self.f1 > self.f2 > 0:
            raise ValueError(f"need f1 > f2 > 0, got f1={self.f1}, f2={self.f2}")
        if _near_integer(self.f1 / self.f2):
            raise IntegerRatio(f"f1/f2 = {self.f1 / self.f2:g} is an integer")

    @property
    def ratio(self) -> float:
        return self.f1 / self.f2


@dataclass(frozen=True)
class AliasVerdict:
    aliased: bool
    discrepancy: float
    compared_band: tuple[float, float]


def plan_dual_rates(base_rate: float, ratio: float = DEFAULT_RATIO) -> DualRatePlan:
    if not base_rate > 0:
        raise ValueError(f"base_rate must be positive, got {base_rate}")
    if _near_integer(ratio):
        raise IntegerRatio(f"ratio {ratio:g} is an integer")
    if not ratio > 1:
        raise ValueError(f"ratio must exceed 1, got {ratio}")
    return DualRatePlan(ratio * base_rate, base_rate)


def denoise_spectrum(s: Spectrum, amplitude_threshold: float) -> Spectrum:
    """Zero every bin whose PSD is below ``amplitude_threshold ** 2``.

    The result keeps no coefficients, so it cannot be inverted.
    """
    if amplitude_threshold < 0:
        raise ValueError("amplitude_threshold must be non-negative")
    if amplitude_threshold == 0:
        return s
    psd = np.where(s.psd < amplitude_threshold**2, 0.0, s.psd)
    return Spectrum(s.sampling_rate, psd, None, s.start_time, s.metric_name, s.unit)


def _normalised_band(us: UniformSeries, noise_amplitude: float):
    """One-sided PSD of the mean-removed series, as a fraction of its total energy."""
    n = len(us)
    spec = dft(us.with_values(us.values - us.values.mean()))
    # bin amplitude 2|X|/N maps a tone of amplitude A to A
    spec = denoise_spectrum(spec, noise_amplitude * n / 2)
    psd = one_sided_psd(spec.psd)
    psd[0] = 0.0
    total = psd.sum()
    freqs = np.arange(psd.size) * (us.rate / n)
    if total > 0:
        psd = psd / total
    return freqs, psd


def detect_aliasing(
    s1: UniformSeries,
    s2: UniformSeries,
    plan: DualRatePlan,
    threshold: float = DEFAULT_THRESHOLD,
    noise_amplitude: float = 0.0,
) -> AliasVerdict:
    """Compare the spectra of the fast (``s1``) and slow (``s2``) streams below ``f2/2``.

    ``noise_amplitude`` is in signal units: bins whose equivalent tone
    amplitude falls below it are dropped before the comparison.  The
    discrepancy is ``||p2 - p1|| / ||p1||`` over the band, where ``p1`` and
    ``p2`` are the energy-normalised PSDs and ``p1`` is linearly interpolated
    onto the bins of ``s2``.
    """
    if not math.isclose(s1.rate, plan.f1, rel_tol=1e-9) or not math.isclose(s2.rate, plan.f2, rel_tol=1e-9):
        raise RateMismatch(
            f"series rates ({s1.rate}, {s2.rate}) do not match plan ({plan.f1}, {plan.f2})"
        )
    if abs(s1.start_time - s2.start_time) > 1.0 / plan.f2 * (1 + 1e-9):
        raise WindowMismatch(
            f"start times differ by {abs(s1.start_time - s2.start_time):g} s, more than one sample"
        )
    # the slow stream can end up to one of its own sample periods short of the fast one
    gap = abs(s1.duration - s2.duration)
    if not math.isclose(s1.duration, s2.duration, rel_tol=0.01) and gap > 1.0 / plan.f2 * (1 + 1e-9):
        raise WindowMismatch(f"durations differ: {s1.duration:g} s vs {s2.duration:g} s")

    f1_grid, p1 = _normalised_band(s1, noise_amplitude)
    f2_grid, p2 = _normalised_band(s2, noise_amplitude)
    band_top = plan.f2 / 2
    in_band = f2_grid <= band_top * (1 + 1e-12)
    ref = np.interp(f2_grid[in_band], f1_grid, p1)
    probe = p2[in_band]
    ref_norm = float(np.linalg.norm(ref))
    diff = float(np.linalg.norm(probe - ref))
    if ref_norm > 0:
        discrepancy = diff / ref_norm
    else:
        # nothing survived in the reference band: any energy in the slow stream is folded
        discrepancy = math.inf if diff > 0 else 0.0
    return AliasVerdict(discrepancy > threshold, discrepancy, (0.0, band_top))
