"""Exit criteria. Each test records a one-line PASS/FAIL summary printed at the end of the run."""

import time

import numpy as np
import pytest

from auditory_fb.design import (
    ConstantQ,
    DesignRequest,
    ErbScaled,
    coverage_closed_form_linear_erb,
    coverage_closed_form_log,
    design_filterbank,
)
from auditory_fb.gammatone import gammatone_q_factor, k_of_n, make_filter, measure_bandwidth
from auditory_fb.scales import GLASBERG_MOORE, LinearErbScale, LogErb, LogScale, erb, erbs, erbs_numeric

import test_properties as props

F_MIN, F_MAX = 200.0, 3600.0


@pytest.fixture
def criterion(record_property):
    def record(label, measured):
        record_property("criterion", label)
        record_property("measured", measured)

    return record


def test_c01_k4(criterion):
    k = k_of_n(4)
    criterion("C01 k(4) = 0.8865 +- 5e-4", f"k(4)={k:.6f}")
    assert abs(k - 0.8865) <= 5e-4


def test_c02_gammatone_q(criterion):
    q = gammatone_q_factor(4, 7.7)
    criterion("C02 Q(n=4, A=7.7) = 8.69 +- 0.01", f"Q={q:.5f}")
    assert abs(q - 8.69) <= 0.01


def test_c03_log_coverage(criterion):
    closed = coverage_closed_form_log(F_MIN, F_MAX, 16, 8.69)
    design = design_filterbank(DesignRequest(F_MIN, F_MAX, 16, LogScale(), ConstantQ(8.69)))
    rel = np.max(np.abs(design.coverages - closed)) / closed
    criterion("C03 log coverage 0.6 +- 0.01, per-band within 1e-9 rel", f"closed={closed:.5f}, max rel dev={rel:.2e}")
    assert abs(closed - 0.6) <= 0.01
    assert len(design.coverages) == 15
    assert rel <= 1e-9


def test_c04_linear_coverage(criterion):
    closed = coverage_closed_form_linear_erb(F_MIN, F_MAX, 16, 24.7, 0.108, 0.8865)
    design = design_filterbank(
        DesignRequest(F_MIN, F_MAX, 16, LinearErbScale(GLASBERG_MOORE), ErbScaled(0.8865, GLASBERG_MOORE))
    )
    rel = np.max(np.abs(design.coverages - closed)) / closed
    criterion("C04 linear-ERB coverage 0.66 +- 0.01, per-band within 1e-9 rel", f"closed={closed:.5f}, max rel dev={rel:.2e}")
    assert abs(closed - 0.66) <= 0.01
    assert rel <= 1e-9


def test_c05_coverage_at_24_bands(criterion):
    k = k_of_n(4)
    log = coverage_closed_form_log(F_MIN, F_MAX, 24, gammatone_q_factor(4, 7.7))
    lin = coverage_closed_form_linear_erb(F_MIN, F_MAX, 24, 24.7, 0.108, k)
    criterion("C05 coverage at N_b=24 in [0.95, 1.05] for both scales", f"log={log:.5f}, linear-erb={lin:.5f}")
    assert 0.95 <= lin <= 1.05
    assert 0.95 <= log <= 1.05


def test_c06_erbs_constants(criterion):
    scale = LinearErbScale(GLASBERG_MOORE)
    e_rel = abs(scale.e_prime - 21.4) / 21.4
    d_rel = abs(scale.d_prime - 0.00437) / 0.00437
    criterion("C06 E' ~ 21.4 and D' ~ 0.00437 within 0.5%", f"E'={scale.e_prime:.4f} ({e_rel:.2%}), D'={scale.d_prime:.6f} ({d_rel:.2%})")
    assert e_rel <= 5e-3 and d_rel <= 5e-3


def test_c07_quadrature_oracle(criterion):
    start = time.perf_counter()
    worst = 0.0
    for scale in (LinearErbScale(GLASBERG_MOORE), LogScale(7.7, 20.0)):
        for f in np.geomspace(25.0, 20000.0, 50):
            closed = erbs(scale, f)
            numeric = erbs_numeric(scale.model, f, scale.floor)
            worst = max(worst, abs(closed - numeric) / max(1.0, abs(closed)))
    elapsed = time.perf_counter() - start
    criterion("C07 closed-form ERBS = quadrature within 1e-6 rel at 50 points, < 1 s", f"worst={worst:.2e}, {elapsed:.3f} s")
    assert worst <= 1e-6
    assert elapsed < 1.0


def test_c08_equidistance(criterion):
    h = np.arange(1, 11)
    log = LogScale(7.7, 20.0)
    lin = LinearErbScale(GLASBERG_MOORE)
    log_spread = np.ptp(erbs(log, h * 110.0) - erbs(log, h * 150.0))
    lin_spread = np.ptp(erbs(lin, h * 110.0) - erbs(lin, h * 150.0))
    criterion("C08 log spread < 1e-9, linear-ERB spread > 0.05", f"log={log_spread:.2e}, linear-erb={lin_spread:.4f}")
    assert log_spread < 1e-9
    assert lin_spread > 0.05


def test_c09_spectral_oracle(criterion):
    start = time.perf_counter()
    filt = make_filter(4, 2000.0, GLASBERG_MOORE, 32000.0)
    m = measure_bandwidth(filt)
    elapsed = time.perf_counter() - start
    target = erb(GLASBERG_MOORE, 2000.0)
    erb_rel = abs(m.erb_hz - target) / target
    k_rel = abs(m.bw3db_hz / m.erb_hz - k_of_n(4)) / k_of_n(4)
    criterion(
        "C09 measured ERB within 2% of model, bw3dB/ERB within 2% of k(4), < 5 s",
        f"ERB rel={erb_rel:.2e}, k rel={k_rel:.2e}, {elapsed:.3f} s",
    )
    assert erb_rel <= 0.02 and k_rel <= 0.02
    assert elapsed < 5.0


def test_c10_q_factor_behavior(criterion):
    k = k_of_n(4)
    grid = np.geomspace(F_MIN, F_MAX, 200)
    q_log = grid / (k * erb(LogErb(7.7), grid))
    q_lin = grid / (k * erb(GLASBERG_MOORE, grid))
    spread = np.ptp(q_log) / np.mean(q_log)
    criterion(
        "C10 q_log constant (< 1e-12 rel), q_linear_erb strictly increasing",
        f"q_log spread={spread:.1e}, q_lin {q_lin[0]:.3f} -> {q_lin[-1]:.3f}",
    )
    assert spread < 1e-12
    assert np.all(np.diff(q_lin) > 0)
    assert q_lin[0] < q_lin[-1]


def test_c11_property_suites(criterion):
    suites = [
        props.test_centers,
        props.test_coverage_monotone_in_bands,
        props.test_filterbank_linear,
        props.test_synthesis_deterministic,
    ]
    start = time.perf_counter()
    for run in suites:
        assert run.hypothesis.inner_test  # hypothesis-wrapped
        assert props.DRAWS.max_examples >= 1000
        run()
    elapsed = time.perf_counter() - start
    criterion("C11 property suites, 1000 draws each, < 30 s", f"{len(suites)} suites in {elapsed:.1f} s")
    assert elapsed < 30.0
