"""16-bit PCM mono WAV reading and writing."""

from __future__ import annotations

import wave

import numpy as np

from .errors import DomainError
from .signals import SampledSignal

__all__ = ["read_wav", "write_wav"]

_FULL_SCALE = 32768.0


def read_wav(path) -> SampledSignal:
    try:
        with wave.open(str(path), "rb") as w:
            channels, width, rate = w.getnchannels(), w.getsampwidth(), w.getframerate()
            frames = w.readframes(w.getnframes())
    except (wave.Error, EOFError, OSError) as exc:
        raise DomainError(f"{path}: unreadable WAV: {exc}") from None
    if channels != 1 or width != 2:
        raise DomainError(f"{path}: need 16-bit mono PCM, got {channels} channel(s), {8 * width}-bit")
    samples = np.frombuffer(frames, dtype="<i2").astype(float) / _FULL_SCALE
    return SampledSignal(samples, float(rate))


def write_wav(path, signal: SampledSignal) -> int:
    """Write ``signal`` clipped to [-1, 1). Returns the number of clipped samples."""
    rate = signal.sample_rate_hz
    if rate != int(rate):
        raise DomainError(f"WAV needs an integer sample rate, got {rate}")
    scaled = np.round(signal.samples * _FULL_SCALE)
    clipped = int(np.count_nonzero((scaled > 32767) | (scaled < -32768)))
    pcm = np.clip(scaled, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(rate))
        w.writeframes(pcm.tobytes())
    return clipped
