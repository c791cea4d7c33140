"""Harmonic speaker synthesis.

Each speaker is a sum of cosines at integer multiples of a fundamental,
``sum_h A_h(t) * cos(2*pi*h*f0*t + phi_h)``, with constant phases and
envelopes that are either constant or piecewise linear.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "SampledSignal",
    "Harmonic",
    "HarmonicSpeaker",
    "synthesize",
    "mix",
    "load_speaker",
    "speaker_from_dict",
]


@dataclass(frozen=True, eq=False)
class SampledSignal:
    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise DomainError("signal must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise DomainError("signal samples must be finite")
        if not self.sample_rate_hz > 0:
            raise DomainError(f"sample rate must be > 0, got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.samples**2)))


@dataclass(frozen=True)
class Harmonic:
    """One harmonic: order ``h``, envelope and constant phase (radians).

    ``breakpoints``, if given, is a sequence of ``(time_s, amplitude)``
    pairs interpolated linearly and held constant outside their span; it
    overrides ``amplitude``.
    """

    order: int
    amplitude: float = 1.0
    phase: float = 0.0
    breakpoints: tuple = ()

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise DomainError(f"harmonic order must be an integer >= 1, got {self.order}")
        bp = tuple((float(t), float(a)) for t, a in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        if bp:
            times = [t for t, _ in bp]
            if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
                raise DomainError("breakpoint times must be strictly increasing")
            if any(a < 0 for _, a in bp):
                raise DomainError("envelope amplitudes must be >= 0")
        elif self.amplitude < 0:
            raise DomainError("envelope amplitudes must be >= 0")

    def envelope(self, t: np.ndarray) -> np.ndarray:
        if not self.breakpoints:
            return np.full_like(t, self.amplitude)
        times, amps = zip(*self.breakpoints)
        return np.interp(t, times, amps)


@dataclass(frozen=True)
class HarmonicSpeaker:
    f0_hz: float
    harmonics: tuple = field(default=())

    def __post_init__(self):
        if not (self.f0_hz > 0 and math.isfinite(self.f0_hz)):
            raise DomainError(f"f0 must be > 0, got {self.f0_hz}")
        object.__setattr__(self, "harmonics", tuple(self.harmonics))
        if not self.harmonics:
            raise DomainError("speaker needs at least one harmonic")

    @classmethod
    def uniform(cls, f0_hz: float, num_harmonics: int, amplitude: float = 1.0, phase: float = 0.0):
        """Harmonics ``1..num_harmonics``, all with the same constant amplitude and phase."""
        return cls(f0_hz, tuple(Harmonic(h, amplitude, phase) for h in range(1, num_harmonics + 1)))

    @property
    def num_harmonics(self) -> int:
        return max(h.order for h in self.harmonics)


def synthesize(speaker: HarmonicSpeaker, duration_s: float, sample_rate_hz: float) -> SampledSignal:
    nyquist = sample_rate_hz / 2
    for h in sorted(speaker.harmonics, key=lambda h: h.order):
        if h.order * speaker.f0_hz >= nyquist:
            raise DomainError(
                f"harmonic {h.order} at {h.order * speaker.f0_hz:g} Hz aliases (Nyquist {nyquist:g} Hz)"
            )
    n = int(round(duration_s * sample_rate_hz))
    if n < 1:
        raise DomainError("duration too short for one sample")
    t = np.arange(n) / sample_rate_hz
    out = np.zeros(n)
    for h in speaker.harmonics:
        out += h.envelope(t) * np.cos(2 * np.pi * h.order * speaker.f0_hz * t + h.phase)
    return SampledSignal(out, sample_rate_hz)


def mix(speakers: Sequence[HarmonicSpeaker], duration_s: float, sample_rate_hz: float) -> SampledSignal:
    if not speakers:
        raise DomainError("need at least one speaker")
    parts = [synthesize(s, duration_s, sample_rate_hz).samples for s in speakers]
    return SampledSignal(np.sum(parts, axis=0), sample_rate_hz)


def speaker_from_dict(spec: dict) -> HarmonicSpeaker:
    """Build a speaker from ``{f0_hz, harmonics: [{order, amplitude | breakpoints, phase}]}``."""
    try:
        harmonics = []
        for entry in spec["harmonics"]:
            harmonics.append(
                Harmonic(
                    order=entry["order"],
                    amplitude=float(entry.get("amplitude", 1.0)),
                    phase=float(entry.get("phase", 0.0)),
                    breakpoints=tuple(tuple(p) for p in entry.get("breakpoints", ())),
                )
            )
        return HarmonicSpeaker(float(spec["f0_hz"]), tuple(harmonics))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"invalid speaker spec: {exc}") from None


def load_speaker(path) -> HarmonicSpeaker:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: invalid JSON: {exc}") from None
    return speaker_from_dict(spec)
