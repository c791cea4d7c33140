"""Gammatone filters matched to an ERB model, plus FFT-based bandwidth measurement.

The impulse response is ``t**(n-1) * exp(-2*pi*b*t) * cos(2*pi*fc*t)``.
For order ``n`` its ERB is ``b * erb_factor(n)`` and its 3-dB bandwidth is
``2*b*sqrt(2**(1/n) - 1)``, so the ratio of the two, :func:`k_of_n`, only
depends on the order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.signal import fftconvolve

from .design import FilterbankDesign
from .errors import DomainError, ResolutionError
from .scales import ErbModel, erb
from .signals import SampledSignal

__all__ = [
    "MAX_ORDER",
    "erb_factor",
    "k_of_n",
    "gammatone_q_factor",
    "GammatoneFilter",
    "make_filter",
    "Bandwidth",
    "magnitude_response",
    "measure_bandwidth",
    "filters_for_design",
    "apply_filterbank",
    "ENVELOPE_FLOOR",
]

MAX_ORDER = 12
ENVELOPE_FLOOR = 1e-6
MIN_BINS_3DB = 32


def _check_order(n):
    if int(n) != n or not 1 <= n <= MAX_ORDER:
        raise DomainError(f"gammatone order must be an integer in [1, {MAX_ORDER}], got {n}")
    return int(n)


def erb_factor(n: int) -> float:
    """``pi * (2n-2)! * 2**-(2n-2) / ((n-1)!)**2``: ERB of an order-n gammatone per unit decay."""
    n = _check_order(n)
    return math.pi * math.factorial(2 * n - 2) * 2.0 ** (-(2 * n - 2)) / math.factorial(n - 1) ** 2


def k_of_n(n: int) -> float:
    """Ratio of 3-dB bandwidth to ERB for an order-n gammatone."""
    n = _check_order(n)
    return 2.0 * math.sqrt(2.0 ** (1.0 / n) - 1.0) / erb_factor(n)


def gammatone_q_factor(n: int, A: float) -> float:
    """Q-factor ``A / k(n)`` of a gammatone whose ERB is ``f / A``."""
    if not A > 0:
        raise DomainError(f"A must be > 0, got {A}")
    return A / k_of_n(n)


def _envelope_extent(n: int, floor: float = ENVELOPE_FLOOR) -> float:
    # x = 2*pi*b*t; envelope x**(n-1) * exp(-x) peaks at x = n-1
    peak_x = float(n - 1)
    log_peak = peak_x * math.log(peak_x) - peak_x if n > 1 else 0.0
    target = log_peak + math.log(floor)

    def excess(x):
        return (n - 1) * math.log(x) - x - target

    hi = peak_x + 1.0
    while excess(hi) > 0:
        hi *= 2.0
    return brentq(excess, max(peak_x, 1e-12), hi, xtol=1e-12)


@dataclass(frozen=True, eq=False)
class GammatoneFilter:
    """Sampled gammatone normalized to unit magnitude response at ``center_hz``."""

    order: int
    center_hz: float
    erb_hz: float
    sample_rate_hz: float

    def __post_init__(self):
        _check_order(self.order)
        if not self.sample_rate_hz > 0:
            raise DomainError(f"sample rate must be > 0, got {self.sample_rate_hz}")
        if not 0 < self.center_hz < self.sample_rate_hz / 2:
            raise DomainError(
                f"center {self.center_hz:g} Hz outside (0, Nyquist={self.sample_rate_hz / 2:g}) Hz"
            )
        if not self.erb_hz > 0:
            raise DomainError(f"ERB must be > 0, got {self.erb_hz}")

    @property
    def decay_hz(self) -> float:
        return self.erb_hz / erb_factor(self.order)

    @property
    def bw3db_hz(self) -> float:
        """Analytic 3-dB bandwidth, ``k(n) * erb_hz``."""
        return k_of_n(self.order) * self.erb_hz

    @property
    def duration_s(self) -> float:
        """Time after which the envelope stays below ``ENVELOPE_FLOOR`` of its peak."""
        return _envelope_extent(self.order) / (2 * math.pi * self.decay_hz)

    @cached_property
    def impulse_response(self) -> np.ndarray:
        fs = self.sample_rate_hz
        t = np.arange(int(math.ceil(self.duration_s * fs)) + 1) / fs
        g = t ** (self.order - 1) * np.exp(-2 * np.pi * self.decay_hz * t) * np.cos(2 * np.pi * self.center_hz * t)
        response_at_center = np.abs(np.dot(g, np.exp(-2j * np.pi * self.center_hz * t)))
        g = g / response_at_center
        g.flags.writeable = False
        return g

    def response_at(self, freq_hz) -> np.ndarray:
        """Complex DTFT of the impulse response at arbitrary frequencies."""
        f = np.atleast_1d(np.asarray(freq_hz, dtype=float))
        k = np.arange(self.impulse_response.size)
        phase = np.exp(-2j * np.pi * np.outer(f, k) / self.sample_rate_hz)
        return phase @ self.impulse_response

    def apply(self, signal: SampledSignal) -> SampledSignal:
        if signal.sample_rate_hz != self.sample_rate_hz:
            raise DomainError("signal and filter sample rates differ")
        y = fftconvolve(signal.samples, self.impulse_response)[: len(signal)]
        return SampledSignal(y, self.sample_rate_hz)


def make_filter(n: int, center_hz: float, erb_model: ErbModel, sample_rate_hz: float) -> GammatoneFilter:
    """Gammatone of order ``n`` whose ERB equals ``erb_model`` at ``center_hz``."""
    if not 0 < center_hz < sample_rate_hz / 2:
        raise DomainError(f"center {center_hz:g} Hz outside (0, Nyquist={sample_rate_hz / 2:g}) Hz")
    target = erb(erb_model, center_hz)
    if center_hz / target < 2:
        warnings.warn(
            f"center/ERB = {center_hz / target:.3g} < 2; continuous-time bandwidth relations will be inaccurate",
            stacklevel=2,
        )
    return GammatoneFilter(n, float(center_hz), float(target), float(sample_rate_hz))


class Bandwidth(NamedTuple):
    erb_hz: float
    bw3db_hz: float


def _default_nfft(filt: GammatoneFilter) -> int:
    need = max(8 * filt.impulse_response.size, 2 * MIN_BINS_3DB * filt.sample_rate_hz / filt.bw3db_hz)
    return 1 << int(math.ceil(math.log2(need)))


def magnitude_response(filt: GammatoneFilter, nfft: int | None = None):
    """``(freqs_hz, |H|)`` on the zero-padded FFT grid from 0 to Nyquist."""
    nfft = _default_nfft(filt) if nfft is None else int(nfft)
    if nfft < filt.impulse_response.size:
        raise ResolutionError(f"nfft={nfft} shorter than impulse response ({filt.impulse_response.size})")
    mag = np.abs(np.fft.rfft(filt.impulse_response, nfft))
    freqs = np.fft.rfftfreq(nfft, d=1.0 / filt.sample_rate_hz)
    return freqs, mag


def _crossing(freqs, power, i, j, level):
    # linear interpolation of the level crossing between bins i and j
    return freqs[i] + (level - power[i]) * (freqs[j] - freqs[i]) / (power[j] - power[i])


def measure_bandwidth(filt: GammatoneFilter, nfft: int | None = None) -> Bandwidth:
    """Measure ERB and 3-dB bandwidth from the zero-padded FFT of the impulse response.

    ERB is the integrated power over positive frequencies divided by the
    peak power. The 3-dB width is that of the contiguous region around the
    peak where power is at least half the peak.

    Raises
    ------
    ResolutionError
        If fewer than 32 FFT bins fall across the 3-dB width.
    """
    freqs, mag = magnitude_response(filt, nfft)
    power = mag**2
    df = freqs[1] - freqs[0]
    peak = int(np.argmax(power))
    pmax = power[peak]
    half = 0.5 * pmax

    lo = peak
    while lo > 0 and power[lo - 1] >= half:
        lo -= 1
    hi = peak
    while hi < power.size - 1 and power[hi + 1] >= half:
        hi += 1
    f_lo = _crossing(freqs, power, lo - 1, lo, half) if lo > 0 else freqs[0]
    f_hi = _crossing(freqs, power, hi, hi + 1, half) if hi < power.size - 1 else freqs[-1]
    bw3db = f_hi - f_lo
    if bw3db / df < MIN_BINS_3DB:
        raise ResolutionError(
            f"only {bw3db / df:.1f} bins across the 3-dB width (need {MIN_BINS_3DB}); increase nfft",
            achieved=df,
        )
    # trapezoid over [0, Nyquist] on the uniform grid
    energy = df * (power.sum() - 0.5 * (power[0] + power[-1]))
    return Bandwidth(float(energy / pmax), float(bw3db))


def filters_for_design(design: FilterbankDesign, n: int, sample_rate_hz: float) -> list[GammatoneFilter]:
    """One gammatone per band whose 3-dB bandwidth equals the design bandwidth."""
    nyquist = sample_rate_hz / 2
    bad = [b for b, fc in enumerate(design.centers, start=1) if fc >= nyquist]
    if bad:
        raise DomainError(f"bands {bad} have centers at or above Nyquist ({nyquist:g} Hz)")
    k = k_of_n(n)
    return [
        GammatoneFilter(n, float(fc), float(bw) / k, float(sample_rate_hz))
        for fc, bw in zip(design.centers, design.bandwidths)
    ]


def apply_filterbank(design: FilterbankDesign, n: int, signal: SampledSignal) -> list[SampledSignal]:
    """Filter ``signal`` through each band; outputs are truncated to the input length."""
    return [f.apply(signal) for f in filters_for_design(design, n, signal.sample_rate_hz)]
