"""Auditory filterbank design on logarithmic and linear-ERB frequency scales."""

from .design import (
    ConstantQ,
    DesignRequest,
    ErbScaled,
    FilterbankDesign,
    bandwidths,
    center_frequencies,
    coverage_closed_form,
    coverage_closed_form_linear_erb,
    coverage_closed_form_log,
    coverage_per_band,
    design_filterbank,
    solve_n_bands,
)
from .errors import DomainError, NumericalError, ResolutionError, UnreachableTargetError
from .gammatone import (
    GammatoneFilter,
    apply_filterbank,
    gammatone_q_factor,
    k_of_n,
    make_filter,
    measure_bandwidth,
)
from .scales import (
    GLASBERG_MOORE,
    LinearErb,
    LinearErbScale,
    LogErb,
    LogScale,
    PolynomialErb,
    erb,
    erbs,
    erbs_inverse,
    erbs_numeric,
    fit_log_erb_slope,
)
from .signals import Harmonic, HarmonicSpeaker, SampledSignal, mix, synthesize

__version__ = "0.1.0"
