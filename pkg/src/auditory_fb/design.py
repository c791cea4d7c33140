"""Center-frequency selection, Q-factors and frequency coverage.

Bands are placed equidistantly on a warping scale between ``f_min`` and
``f_max``. Coverage of consecutive bands ``b`` and ``b+1`` is half the sum
of their bandwidths over the distance between their centers; a value of 1
means gap-free coverage for ideal rectangular filters.

Band indices in docstrings are 1-based (``b = 1..n_bands``); arrays are
0-based as usual.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, UnreachableTargetError
from .scales import (
    ErbModel,
    LinearErb,
    LinearErbScale,
    LogErb,
    LogScale,
    ScaleFunction,
    erb,
)

__all__ = [
    "ConstantQ",
    "ErbScaled",
    "BandwidthRule",
    "DesignRequest",
    "FilterbankDesign",
    "MAX_BANDS",
    "center_frequencies",
    "centers_closed_form",
    "bandwidths",
    "q_factors",
    "coverage_per_band",
    "coverage_closed_form_log",
    "coverage_closed_form_linear_erb",
    "coverage_closed_form",
    "solve_n_bands",
    "design_filterbank",
]

MAX_BANDS = 4096


@dataclass(frozen=True)
class ConstantQ:
    """Bandwidth = center / eta_B."""

    eta_B: float

    def __post_init__(self):
        if not self.eta_B > 0:
            raise DomainError(f"eta_B must be > 0, got {self.eta_B}")


@dataclass(frozen=True)
class ErbScaled:
    """Bandwidth = K * ERB(center)."""

    K: float
    erb: ErbModel

    def __post_init__(self):
        if not self.K > 0:
            raise DomainError(f"K must be > 0, got {self.K}")


BandwidthRule = Union[ConstantQ, ErbScaled]


@dataclass(frozen=True)
class DesignRequest:
    f_min: float
    f_max: float
    n_bands: int
    scale: ScaleFunction
    bandwidth_rule: BandwidthRule

    def __post_init__(self):
        if not (math.isfinite(self.f_min) and math.isfinite(self.f_max)):
            raise DomainError("f_min and f_max must be finite")
        if not self.f_max > self.f_min > 0:
            raise DomainError(f"need f_max > f_min > 0, got [{self.f_min}, {self.f_max}]")
        if int(self.n_bands) != self.n_bands or self.n_bands < 2:
            raise DomainError(f"n_bands must be an integer >= 2, got {self.n_bands}")
        if self.f_min <= self.scale.floor and isinstance(self.scale, LogScale):
            raise DomainError(f"f_min must exceed the log scale floor f_m={self.scale.f_m}")

    def to_dict(self) -> dict:
        return {
            "f_min": self.f_min,
            "f_max": self.f_max,
            "n_bands": int(self.n_bands),
            "scale": _describe(self.scale),
            "bandwidth_rule": _describe(self.bandwidth_rule),
        }


def _describe(obj) -> dict:
    if isinstance(obj, LogScale):
        return {"type": "log", "A": obj.A, "f_m": obj.f_m}
    if isinstance(obj, LinearErbScale):
        return {"type": "linear-erb", "D": obj.model.D, "E": obj.model.E}
    if isinstance(obj, ConstantQ):
        return {"type": "constant-q", "eta_B": obj.eta_B}
    if isinstance(obj, ErbScaled):
        return {"type": "erb-scaled", "K": obj.K, "erb": _describe(obj.erb)}
    if isinstance(obj, LogErb):
        return {"type": "log", "A": obj.A}
    if isinstance(obj, LinearErb):
        return {"type": "linear", "D": obj.D, "E": obj.E}
    return {"type": type(obj).__name__, **{k: v for k, v in vars(obj).items()}}


def _fmt(x) -> str:
    return format(float(x), ".9g")


@dataclass(frozen=True, eq=False)
class FilterbankDesign:
    """Centers, bandwidths, Q-factors (length ``n_bands``) and coverages (``n_bands - 1``)."""

    request: DesignRequest
    centers: np.ndarray
    bandwidths: np.ndarray
    q_factors: np.ndarray
    coverages: np.ndarray = field(repr=False)

    @property
    def n_bands(self) -> int:
        return len(self.centers)

    def to_dict(self) -> dict:
        def rounded(a):
            return [float(_fmt(x)) for x in a]

        return {
            "request": self.request.to_dict(),
            "centers_hz": rounded(self.centers),
            "bandwidths_hz": rounded(self.bandwidths),
            "q_factors": rounded(self.q_factors),
            "coverages": rounded(self.coverages),
        }

    def to_json(self, **extra) -> str:
        payload = self.to_dict()
        payload.update(extra)
        return json.dumps(payload, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["band,center_hz,bandwidth_hz,q_factor"]
        for b, (fc, fb, q) in enumerate(zip(self.centers, self.bandwidths, self.q_factors), start=1):
            lines.append(f"{b},{_fmt(fc)},{_fmt(fb)},{_fmt(q)}")
        return "\n".join(lines) + "\n"


def _interp_weights(n_bands):
    b = np.arange(1, n_bands + 1, dtype=float)
    return (n_bands - b) / (n_bands - 1), (b - 1) / (n_bands - 1)


def center_frequencies(req: DesignRequest) -> np.ndarray:
    """Centers equidistant on ``req.scale`` with exact endpoints ``f_min``, ``f_max``."""
    lo_w, hi_w = _interp_weights(req.n_bands)
    u = lo_w * req.scale.forward(req.f_min) + hi_w * req.scale.forward(req.f_max)
    centers = np.asarray(req.scale.inverse(u), dtype=float)
    centers[0], centers[-1] = req.f_min, req.f_max
    return centers


def centers_closed_form(req: DesignRequest) -> np.ndarray:
    """Centers from the closed-form expressions of each scale family.

    Log scale: ``f_min**((N-b)/(N-1)) * f_max**((b-1)/(N-1))``.
    Linear-ERB scale:
    ``([(1+D'f_min)**(N-b) * (1+D'f_max)**(b-1)]**(1/(N-1)) - 1) / D'``.
    """
    lo_w, hi_w = _interp_weights(req.n_bands)
    scale = req.scale
    if isinstance(scale, LogScale):
        return np.exp(lo_w * math.log(req.f_min) + hi_w * math.log(req.f_max))
    if isinstance(scale, LinearErbScale):
        dp = scale.d_prime
        return np.expm1(lo_w * math.log1p(dp * req.f_min) + hi_w * math.log1p(dp * req.f_max)) / dp
    raise DomainError(f"no closed form for scale {type(scale).__name__}")


def bandwidths(req: DesignRequest, centers) -> np.ndarray:
    rule = req.bandwidth_rule
    centers = np.asarray(centers, dtype=float)
    if isinstance(rule, ConstantQ):
        return centers / rule.eta_B
    return rule.K * np.asarray(erb(rule.erb, centers), dtype=float)


def q_factors(centers, bws) -> np.ndarray:
    return np.asarray(centers, dtype=float) / np.asarray(bws, dtype=float)


def coverage_per_band(centers, bws) -> np.ndarray:
    """Coverage of each consecutive pair, ``0.5*(bw[b+1] + bw[b]) / (fc[b+1] - fc[b])``."""
    centers = np.asarray(centers, dtype=float)
    bws = np.asarray(bws, dtype=float)
    if centers.ndim != 1 or centers.shape != bws.shape or len(centers) < 2:
        raise DomainError("centers and bandwidths must be 1-D, equal length, at least 2")
    spacing = np.diff(centers)
    if np.any(spacing <= 0):
        raise DomainError("centers must be strictly increasing")
    return 0.5 * (bws[1:] + bws[:-1]) / spacing


def _coth_term(ratio, n_bands):
    # (x + 1) / (x - 1) with x = ratio**(1/(N-1)), via expm1 for small steps
    step = np.expm1(np.log(ratio) / (np.asarray(n_bands, dtype=float) - 1.0))
    return (step + 2.0) / step


def _check_nb(n_bands):
    nb = np.asarray(n_bands)
    if np.any(nb < 2) or np.any(nb != np.floor(nb)):
        raise DomainError(f"n_bands must be an integer >= 2, got {n_bands!r}")


def coverage_closed_form_log(f_min, f_max, n_bands, eta_B):
    """Constant coverage of a constant-Q bank equidistant on the log scale."""
    if not (f_max > f_min > 0):
        raise DomainError(f"need f_max > f_min > 0, got [{f_min}, {f_max}]")
    if not eta_B > 0:
        raise DomainError(f"eta_B must be > 0, got {eta_B}")
    _check_nb(n_bands)
    out = _coth_term(f_max / f_min, n_bands) / (2.0 * eta_B)
    return float(out) if np.ndim(out) == 0 else out


def coverage_closed_form_linear_erb(f_min, f_max, n_bands, D, E, K):
    """Constant coverage of a ``K*(D + E*f)`` bank equidistant on its ERB-rate scale."""
    if not (f_max > f_min >= 0):
        raise DomainError(f"need f_max > f_min >= 0, got [{f_min}, {f_max}]")
    if not (D >= 0 and E > 0 and K > 0):
        raise DomainError(f"need D >= 0, E > 0, K > 0, got D={D}, E={E}, K={K}")
    if D + E * f_min <= 0:
        raise DomainError("ERB at f_min must be > 0")
    _check_nb(n_bands)
    out = (E * K / 2.0) * _coth_term((D + E * f_max) / (D + E * f_min), n_bands)
    return float(out) if np.ndim(out) == 0 else out


def _closed_form_for_rule(f_min, f_max, rule: BandwidthRule):
    if isinstance(rule, ConstantQ):
        return lambda nb: coverage_closed_form_log(f_min, f_max, nb, rule.eta_B)
    if isinstance(rule, ErbScaled) and isinstance(rule.erb, LogErb):
        eta = rule.erb.A / rule.K
        return lambda nb: coverage_closed_form_log(f_min, f_max, nb, eta)
    if isinstance(rule, ErbScaled) and isinstance(rule.erb, LinearErb):
        m = rule.erb
        return lambda nb: coverage_closed_form_linear_erb(f_min, f_max, nb, m.D, m.E, rule.K)
    raise DomainError(f"no closed-form coverage for bandwidth rule {rule!r}")


def coverage_closed_form(req: DesignRequest) -> float:
    """Closed-form coverage matching a design request.

    Only defined where coverage is constant across bands: constant-Q or
    ``f/A`` bandwidths on a log scale, and linear-ERB bandwidths on the
    ERB-rate scale of the same linear ERB.
    """
    rule, scale = req.bandwidth_rule, req.scale
    log_rule = isinstance(rule, ConstantQ) or (isinstance(rule, ErbScaled) and isinstance(rule.erb, LogErb))
    if isinstance(scale, LogScale) and log_rule:
        return _closed_form_for_rule(req.f_min, req.f_max, rule)(req.n_bands)
    if isinstance(scale, LinearErbScale) and isinstance(rule, ErbScaled) and rule.erb == scale.model:
        return _closed_form_for_rule(req.f_min, req.f_max, rule)(req.n_bands)
    raise DomainError("coverage is not constant for this scale/bandwidth combination")


def solve_n_bands(f_min, f_max, target_coverage, rule: BandwidthRule, max_bands=MAX_BANDS) -> int:
    """Smallest number of bands whose closed-form coverage reaches ``target_coverage``.

    Coverage grows strictly with the band count, so integer bisection over
    ``[2, max_bands]`` suffices.

    Raises
    ------
    UnreachableTargetError
        If the target is already met by 2 bands (nothing to solve; the
        error reports that floor) or not met by ``max_bands``.
    """
    cov = _closed_form_for_rule(f_min, f_max, rule)
    floor, ceiling = cov(2), cov(max_bands)
    if not target_coverage > floor:
        raise UnreachableTargetError(
            f"target coverage {target_coverage:g} is at or below the 2-band floor {floor:.6g}",
            floor, ceiling,
        )
    if target_coverage > ceiling:
        raise UnreachableTargetError(
            f"target coverage {target_coverage:g} exceeds {ceiling:.6g} reached with {max_bands} bands",
            floor, ceiling,
        )
    lo, hi = 2, max_bands  # cov(lo) < target <= cov(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cov(mid) >= target_coverage:
            hi = mid
        else:
            lo = mid
    return hi


def design_filterbank(req: DesignRequest) -> FilterbankDesign:
    centers = center_frequencies(req)
    bws = bandwidths(req, centers)
    return FilterbankDesign(
        request=req,
        centers=centers,
        bandwidths=bws,
        q_factors=q_factors(centers, bws),
        coverages=coverage_per_band(centers, bws),
    )
