"""Fourier analysis of uniform series and Nyquist-rate estimation.

PSD values are ``|X_j|**2`` of the unnormalised DFT ``X_j = sum_n x_n e^{-2 pi i j n / N}``,
so Parseval reads ``sum |x|^2 == sum(psd) / N``.  Bin ``j`` sits at ``j * fs / N``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    DegenerateSignal,
    EmptySeries,
    InvalidCutoff,
    InvalidTargetRate,
    MissingCoefficients,
    TooShort,
)
from .series import QuantizationSpec, UniformSeries, quantize

DEFAULT_ENERGY_FRACTION = 0.99
MIN_ESTIMATE_SAMPLES = 8
# DC-removed energy below this fraction of N * max|x|^2 counts as "no signal".
NOISE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Per-bin DFT output of a series sampled at ``sampling_rate``.

    ``coefficients`` may be ``None`` for a PSD-only spectrum (for example one
    that has been denoised or loaded from an export); such spectra cannot be
    inverted.
    """

    sampling_rate: float
    psd: np.ndarray
    coefficients: Optional[np.ndarray] = None
    start_time: float = 0.0
    metric_name: str = ""
    unit: str = ""

    def __post_init__(self):
        psd = np.array(self.psd, dtype=float).reshape(-1)
        if np.any(psd < 0) or not np.all(np.isfinite(psd)):
            raise ValueError("psd must be non-negative and finite")
        psd.setflags(write=False)
        object.__setattr__(self, "psd", psd)
        if self.coefficients is not None:
            c = np.array(self.coefficients, dtype=complex).reshape(-1)
            if c.shape != psd.shape:
                raise ValueError("coefficients and psd differ in length")
            c.setflags(write=False)
            object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_coefficients(cls, coefficients, sampling_rate, **meta) -> "Spectrum":
        c = np.asarray(coefficients, dtype=complex)
        return cls(sampling_rate, np.abs(c) ** 2, c, **meta)

    @property
    def bin_count(self) -> int:
        return self.psd.size

    @property
    def bin_width(self) -> float:
        return self.sampling_rate / self.bin_count

    @property
    def frequencies(self) -> np.ndarray:
        """Frequency of every bin, ``j * fs / N`` for ``j = 0 .. N-1``."""
        return np.arange(self.bin_count) * self.bin_width

    def one_sided(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies and PSD for bins ``0 .. N//2`` with mirror energy folded in."""
        return one_sided_frequencies(self), one_sided_psd(self.psd)


def one_sided_psd(psd: np.ndarray) -> np.ndarray:
    n = psd.size
    half = n // 2
    out = psd[: half + 1].copy()
    # bins 1 .. ceil(N/2)-1 have a distinct mirror at N-j; the even-N Nyquist bin does not
    mirrored = np.arange(1, (n + 1) // 2)
    out[mirrored] += psd[n - mirrored]
    return out


def one_sided_frequencies(s: Spectrum) -> np.ndarray:
    return np.arange(s.bin_count // 2 + 1) * s.bin_width


def dft(us: UniformSeries, window: str = "rect") -> Spectrum:
    """Discrete Fourier transform of ``us.values`` (any length, no padding).

    ``window="hann"`` tapers the data first; the resulting coefficients then
    invert to the tapered series, not the original.
    """
    if len(us) == 0:
        raise EmptySeries("cannot transform an empty series")
    x = us.values
    if window == "hann":
        x = x * np.hanning(x.size)
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}")
    coeffs = np.fft.fft(x)
    return Spectrum.from_coefficients(
        coeffs, us.rate, start_time=us.start_time, metric_name=us.metric_name, unit=us.unit
    )


def inverse_dft(s: Spectrum) -> UniformSeries:
    if s.coefficients is None:
        raise MissingCoefficients("spectrum carries only PSD values")
    x = np.fft.ifft(s.coefficients)
    return UniformSeries(x.real, s.sampling_rate, s.start_time, s.metric_name, s.unit)


def total_energy(s: Spectrum, exclude_dc: bool = False) -> float:
    psd = s.psd[1:] if exclude_dc else s.psd
    return float(np.sum(psd))


@dataclass(frozen=True)
class Rate:
    """A Nyquist rate in Hz."""

    hz: float

    @property
    def aliased(self) -> bool:
        return False

    def sentinel(self) -> float:
        return self.hz


@dataclass(frozen=True)
class Aliased:
    """Marker for a series whose energy only fits in every bin up to fs/2."""

    @property
    def aliased(self) -> bool:
        return True

    def sentinel(self) -> float:
        return -1.0


NyquistEstimate = Union[Rate, Aliased]


def estimate_from_sentinel(value: float) -> NyquistEstimate:
    return Aliased() if value < 0 else Rate(value)


def estimate_nyquist(
    us: UniformSeries,
    energy_fraction: float = DEFAULT_ENERGY_FRACTION,
    window: str = "rect",
) -> NyquistEstimate:
    """Twice the frequency by which ``energy_fraction`` of the energy is reached.

    The mean is removed first and the DC bin is left out of the budget, so a
    large constant offset does not swallow the total.  Energy is accumulated
    over the one-sided spectrum (bins ``1 .. N//2``, mirrors folded in).  If the
    threshold is only crossed at the last bin the series is reported as
    :class:`Aliased`.
    """
    n = len(us)
    if n < MIN_ESTIMATE_SAMPLES:
        raise TooShort(f"need at least {MIN_ESTIMATE_SAMPLES} samples, got {n}")
    if not 0 < energy_fraction < 1:
        raise ValueError(f"energy_fraction must be in (0, 1), got {energy_fraction}")
    x = us.values
    centred = x - np.mean(x)
    scale = float(np.max(np.abs(x))) ** 2
    if float(np.sum(centred**2)) < NOISE_FLOOR * n * scale or scale == 0:
        raise DegenerateSignal("no energy above the noise floor once the mean is removed")

    spec = dft(us.with_values(centred), window=window)
    energy = one_sided_psd(spec.psd)[1:]
    cumulative = np.cumsum(energy)
    j_star = int(np.searchsorted(cumulative, energy_fraction * cumulative[-1], side="left")) + 1
    if j_star >= n // 2:
        return Aliased()
    return Rate(2.0 * (j_star * spec.bin_width))


def low_pass_reconstruct(us: UniformSeries, cutoff: float, target_rate: float) -> UniformSeries:
    """Ideal low-pass filter at ``cutoff`` Hz, resampled up to ``target_rate``.

    Bins strictly above ``cutoff`` are zeroed, the spectrum is zero-padded to
    the new length ``round(N * target_rate / rate)`` and inverted with the
    amplitude rescaled.  An even-length input's Nyquist bin, if kept, is split
    evenly between the two new mirror positions so a cosine there survives.
    """
    fs = us.rate
    n = len(us)
    if n == 0:
        raise EmptySeries("cannot reconstruct an empty series")
    if not (0 <= cutoff <= fs / 2 * (1 + 1e-12)):
        raise InvalidCutoff(f"cutoff {cutoff} Hz must lie in [0, {fs / 2}] Hz")
    if not target_rate >= fs * (1 - 1e-12):
        raise InvalidTargetRate(
            f"target rate {target_rate} Hz is below the input rate {fs} Hz; use decimate"
        )
    m = int(round(n * target_rate / fs))

    coeffs = np.fft.fft(us.values)
    signed = np.fft.fftfreq(n) * n
    freq = np.abs(signed) * (fs / n)
    coeffs[freq > cutoff + 1e-9 * fs / n] = 0.0

    padded = np.zeros(m, dtype=complex)
    pos = (n + 1) // 2  # bins 0 .. pos-1 are DC and positive frequencies
    padded[:pos] = coeffs[:pos]
    neg = n - pos
    if n % 2 == 0:
        neg -= 1
        nyq = coeffs[n // 2]
        if m > n:
            padded[n // 2] += nyq / 2
            padded[m - n // 2] += nyq / 2
        else:
            padded[n // 2] = nyq
    if neg:
        padded[m - neg :] = coeffs[n - neg :]
    out = np.fft.ifft(padded).real * (m / n)
    return UniformSeries(out, target_rate, us.start_time, us.metric_name, us.unit)


def reconstruct_with_quantization(
    us: UniformSeries, cutoff: float, target_rate: float, q: QuantizationSpec
) -> UniformSeries:
    """:func:`low_pass_reconstruct` followed by re-applying the sensor's quantization."""
    return quantize(low_pass_reconstruct(us, cutoff, target_rate), q)


def spectrum_csv(s: Spectrum) -> str:
    """One-sided ``frequency_hz,psd`` rows for bins ``0 .. N//2``."""
    freqs, psd = s.one_sided()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frequency_hz", "psd"])
    for f, p in zip(freqs, psd):
        w.writerow([repr(float(f)), repr(float(p))])
    return buf.getvalue()


def nearest_divisor_rate(us: UniformSeries, min_rate: float, strict: bool = False) -> float:
    """Slowest rate ``fs / D`` (``D`` dividing ``N``) at or above ``min_rate``.

    With ``strict=True`` the rate must lie strictly above ``min_rate``, which
    also keeps a sine sitting exactly at the estimated band edge.  Decimating
    by a divisor of the length keeps the shortened series on the same periodic
    grid, which the DFT-based reconstruction relies on.
    """
    n = len(us)
    for d in range(n, 0, -1):
        r = us.rate / d
        ok = r > min_rate * (1 + 1e-12) if strict else r >= min_rate * (1 - 1e-12)
        if n % d == 0 and ok:
            return r
    return us.rate


def fold_frequency(f: float, fs: float) -> float:
    """Apparent frequency of a tone at ``f`` Hz when sampled at ``fs`` Hz."""
    k = round(f / fs)
    return abs(f - k * fs)


def is_aliased(est: NyquistEstimate) -> bool:
    return isinstance(est, Aliased)


def nyquist_hz(est: NyquistEstimate) -> float:
    """Rate in Hz, or ``-1`` for :class:`Aliased`."""
    return est.sentinel()


__all__ = [
    "Aliased",
    "NyquistEstimate",
    "Rate",
    "Spectrum",
    "dft",
    "estimate_nyquist",
    "fold_frequency",
    "is_aliased",
    "inverse_dft",
    "low_pass_reconstruct",
    "nearest_divisor_rate",
    "nyquist_hz",
    "reconstruct_with_quantization",
    "spectrum_csv",
    "total_energy",
]
