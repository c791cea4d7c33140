"""ERB functions and their integrated ERB-rate (frequency warping) scales.

Three bandwidth models are supported:

* :class:`PolynomialErb` -- ``a*f**2 + b*f + c``
* :class:`LinearErb` -- ``D + E*f`` (Glasberg & Moore when D=24.7, E=0.108)
* :class:`LogErb` -- ``f / A``, whose ERB-rate scale is ``A*ln(f) + C``

Closed-form scales exist for the linear and logarithmic families
(:class:`LinearErbScale`, :class:`LogScale`). :func:`erbs_numeric`
integrates ``1/ERB`` directly and is used as an oracle for both.
"""

from __future__ import annotations

import abc
import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "ErbModel",
    "PolynomialErb",
    "LinearErb",
    "LogErb",
    "ScaleFunction",
    "LinearErbScale",
    "LogScale",
    "GLASBERG_MOORE",
    "MOORE_GLASBERG_1983",
    "DEFAULT_LOG_A",
    "DEFAULT_FM",
    "erb",
    "erbs",
    "erbs_inverse",
    "erbs_numeric",
    "adaptive_simpson",
    "fit_log_erb_slope",
    "read_erb_csv",
]

DEFAULT_LOG_A = 7.7
DEFAULT_FM = 20.0


def _as_freq(f, allow_zero=True):
    arr = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("frequency must be finite")
    if allow_zero:
        if np.any(arr < 0):
            raise DomainError(f"frequency must be >= 0 Hz, got {f!r}")
    elif np.any(arr <= 0):
        raise DomainError(f"frequency must be > 0 Hz, got {f!r}")
    return arr


def _unwrap(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


class ErbModel(abc.ABC):
    """Bandwidth (ERB, in Hz) as a function of center frequency."""

    #: whether f = 0 is inside the model's domain
    allows_zero = True

    @abc.abstractmethod
    def _evaluate(self, f):
        pass

    def __call__(self, f):
        return erb(self, f)


@dataclass(frozen=True)
class PolynomialErb(ErbModel):
    """``ERB(f) = a*f**2 + b*f + c``, positive on ``[f_lo, f_hi]``."""

    a: float
    b: float
    c: float
    f_lo: float = 0.0
    f_hi: float = 20000.0

    def __post_init__(self):
        if not (0 <= self.f_lo < self.f_hi):
            raise DomainError("need 0 <= f_lo < f_hi")
        candidates = [self.f_lo, self.f_hi]
        if self.a != 0:
            vertex = -self.b / (2 * self.a)
            if self.f_lo < vertex < self.f_hi:
                candidates.append(vertex)
        if min(self._evaluate(x) for x in candidates) <= 0:
            raise DomainError("polynomial ERB must be positive over its domain")

    def _evaluate(self, f):
        return (self.a * f + self.b) * f + self.c


@dataclass(frozen=True)
class LinearErb(ErbModel):
    """``ERB(f) = D + E*f`` with ``D >= 0`` and ``E > 0``."""

    D: float = 24.7
    E: float = 0.108

    def __post_init__(self):
        if not (self.D >= 0 and self.E > 0):
            raise DomainError(f"linear ERB needs D >= 0 and E > 0, got D={self.D}, E={self.E}")

    def _evaluate(self, f):
        return self.D + self.E * f

    @property
    def allows_zero(self):
        return self.D > 0


@dataclass(frozen=True)
class LogErb(ErbModel):
    """``ERB(f) = f / A``: the bandwidth implied by a logarithmic scale."""

    A: float = DEFAULT_LOG_A
    allows_zero = False

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"A must be > 0, got {self.A}")

    def _evaluate(self, f):
        return f / self.A


GLASBERG_MOORE = LinearErb(24.7, 0.108)
# Moore & Glasberg (1983), f in Hz
MOORE_GLASBERG_1983 = PolynomialErb(6.23e-6, 93.39e-3, 28.52)


def erb(model: ErbModel, f):
    """Bandwidth of ``model`` at frequency ``f`` (scalar or array, Hz)."""
    arr = _as_freq(f, allow_zero=model.allows_zero)
    if isinstance(model, PolynomialErb) and (np.any(arr < model.f_lo) or np.any(arr > model.f_hi)):
        raise DomainError(f"frequency outside polynomial domain [{model.f_lo}, {model.f_hi}]")
    return _unwrap(model._evaluate(arr))


class ScaleFunction(abc.ABC):
    """A monotone frequency warping with an exact inverse.

    ``floor`` is the lowest frequency at which the scale is strictly
    increasing; the scale value there is 0.
    """

    model: ErbModel

    @property
    @abc.abstractmethod
    def floor(self) -> float:
        pass

    @abc.abstractmethod
    def forward(self, f):
        pass

    @abc.abstractmethod
    def inverse(self, u):
        pass

    @property
    def max_value(self) -> float:
        """Largest scale value whose inverse is a finite frequency."""
        return float(self.forward(np.finfo(float).max / 4))


@dataclass(frozen=True)
class LinearErbScale(ScaleFunction):
    """ERB-rate scale of a linear ERB, ``E' * lg(1 + D'*f)``, zero at 0 Hz."""

    model: LinearErb = GLASBERG_MOORE

    def __post_init__(self):
        if not self.model.D > 0:
            # with D = 0 the integral of 1/ERB diverges at 0 Hz
            raise DomainError("linear ERB scale anchored at 0 Hz needs D > 0")

    @property
    def d_prime(self) -> float:
        return self.model.E / self.model.D

    @property
    def e_prime(self) -> float:
        return 1.0 / (self.model.E * math.log10(math.e))

    @property
    def floor(self) -> float:
        return 0.0

    def forward(self, f):
        arr = _as_freq(f)
        # E' * lg(1 + D'f) == ln(1 + D'f) / E
        return _unwrap(np.log1p(self.d_prime * arr) / self.model.E)

    def inverse(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError(f"scale value must be finite and >= 0, got {u!r}")
        with np.errstate(over="ignore"):
            f = np.expm1(arr * self.model.E) / self.d_prime
        if not np.all(np.isfinite(f)):
            raise DomainError("scale value beyond representable frequency range")
        return _unwrap(f)


@dataclass(frozen=True)
class LogScale(ScaleFunction):
    """``A*ln(f) + C`` above ``f_m`` and 0 on ``[0, f_m]``, with ``C = -A*ln(f_m)``."""

    A: float = DEFAULT_LOG_A
    f_m: float = DEFAULT_FM

    def __post_init__(self):
        if not (self.A > 0 and self.f_m > 0 and math.isfinite(self.f_m)):
            raise DomainError(f"log scale needs A > 0 and f_m > 0, got A={self.A}, f_m={self.f_m}")

    @property
    def model(self) -> LogErb:
        return LogErb(self.A)

    @property
    def C(self) -> float:
        return -self.A * math.log(self.f_m)

    @property
    def floor(self) -> float:
        return self.f_m

    def forward(self, f):
        arr = _as_freq(f)
        with np.errstate(divide="ignore"):
            u = self.A * np.log(np.maximum(arr, self.f_m) / self.f_m)
        return _unwrap(u)

    def inverse(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError(f"scale value must be finite and >= 0, got {u!r}")
        with np.errstate(over="ignore"):
            f = self.f_m * np.exp(arr / self.A)
        if not np.all(np.isfinite(f)):
            raise DomainError("scale value beyond representable frequency range")
        return _unwrap(f)


def erbs(scale: ScaleFunction, f):
    """Scale value of frequency ``f``."""
    return scale.forward(f)


def erbs_inverse(scale: ScaleFunction, u):
    """Frequency whose scale value is ``u``; ``erbs_inverse(scale, 0) == scale.floor``."""
    return scale.inverse(u)


def adaptive_simpson(func, a, b, tol=1e-8, max_depth=60):
    """Integrate ``func`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    Raises
    ------
    NumericalError
        If some subinterval hits ``max_depth`` before meeting its share of
        ``tol``. The error carries the accumulated error estimate.
    """
    if a == b:
        return 0.0
    fa, fm, fb = func(a), func(0.5 * (a + b)), func(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    err_budget_miss = 0.0
    failed = False
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = func(lm), func(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            total += left + right + delta / 15.0
            err_budget_miss += abs(delta) / 15.0
            failed = True
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if failed:
        raise NumericalError(
            f"adaptive Simpson did not converge to {tol:g} (estimated error {err_budget_miss:g})",
            achieved=err_budget_miss,
        )
    return total


def erbs_numeric(model: ErbModel, f: float, f_ref: float, tol: float = 1e-8) -> float:
    """Integral of ``1/ERB`` from ``f_ref`` to ``f`` by adaptive quadrature."""
    f, f_ref = float(f), float(f_ref)
    erb(model, np.array([f_ref, f]))  # domain check
    if f < f_ref:
        raise DomainError(f"need f >= f_ref, got f={f}, f_ref={f_ref}")
    evaluate = model._evaluate
    return adaptive_simpson(lambda x: 1.0 / evaluate(x), f_ref, f, tol=tol)


def fit_log_erb_slope(points: Iterable[Sequence[float]]) -> float:
    """Least-squares ``A`` for ``erb = f / A`` through the origin.

    Minimizes ``sum((erb_i - f_i/A)**2)``, which gives
    ``A = sum(f_i**2) / sum(f_i * erb_i)``.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise DomainError("need at least 2 (freq_hz, erb_hz) points")
    f, bw = pts[:, 0], pts[:, 1]
    if not np.all(np.isfinite(pts)) or np.any(f <= 0) or np.any(bw <= 0):
        raise DomainError("all frequencies and ERBs must be finite and > 0")
    return float(np.dot(f, f) / np.dot(f, bw))


def read_erb_csv(path) -> list[tuple[float, float]]:
    """Read ``freq_hz,erb_hz`` measurement rows.

    Raises :class:`DomainError` naming the offending line on malformed input.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DomainError(f"{path}: line 1: empty file")
        if [h.strip() for h in header] != ["freq_hz", "erb_hz"]:
            raise DomainError(f"{path}: line 1: expected header 'freq_hz,erb_hz', got {','.join(header)!r}")
        points = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DomainError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            try:
                f, bw = float(row[0]), float(row[1])
            except ValueError:
                raise DomainError(f"{path}: line {lineno}: non-numeric value in {row!r}") from None
            if not (math.isfinite(f) and math.isfinite(bw) and f > 0 and bw > 0):
                raise DomainError(f"{path}: line {lineno}: values must be finite and > 0")
            points.append((f, bw))
    if len(points) < 2:
        raise DomainError(f"{path}: need at least 2 data rows, got {len(points)}")
    return points
