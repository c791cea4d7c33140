import math

import numpy as np
import pytest
from scipy.optimize import brentq

from auditory_fb.errors import DomainError, NumericalError
from auditory_fb.scales import (
    GLASBERG_MOORE,
    MOORE_GLASBERG_1983,
    LinearErb,
    LinearErbScale,
    LogErb,
    LogScale,
    PolynomialErb,
    adaptive_simpson,
    erb,
    erbs,
    erbs_inverse,
    erbs_numeric,
    fit_log_erb_slope,
    read_erb_csv,
)


class TestErb:
    def test_linear_at_zero(self):
        assert erb(LinearErb(24.7, 0.108), 0) == 24.7

    def test_linear_at_1000(self):
        assert erb(LinearErb(24.7, 0.108), 1000) == pytest.approx(24.7 + 108.0, rel=1e-15)

    def test_log_identity(self):
        assert erb(LogErb(7.7), 7.7) == 1.0

    def test_polynomial(self):
        f = 1000.0
        assert erb(MOORE_GLASBERG_1983, f) == pytest.approx(6.23e-6 * f**2 + 93.39e-3 * f + 28.52)

    def test_array_input(self):
        out = erb(GLASBERG_MOORE, np.array([0.0, 1000.0]))
        np.testing.assert_allclose(out, [24.7, 132.7])

    @pytest.mark.parametrize(
        "model, f",
        [(GLASBERG_MOORE, -1.0), (LogErb(7.7), 0.0), (LogErb(7.7), -5.0), (MOORE_GLASBERG_1983, 30000.0)],
    )
    def test_domain_violation(self, model, f):
        with pytest.raises(DomainError):
            erb(model, f)

    @pytest.mark.parametrize("kwargs", [dict(D=-1.0, E=0.1), dict(D=1.0, E=0.0)])
    def test_linear_invariants(self, kwargs):
        with pytest.raises(DomainError):
            LinearErb(**kwargs)

    def test_log_invariant(self):
        with pytest.raises(DomainError):
            LogErb(0.0)

    def test_polynomial_must_be_positive(self):
        with pytest.raises(DomainError):
            PolynomialErb(1e-4, -1.0, 10.0)  # dips below 0 around f = 5000


class TestLinearScale:
    scale = LinearErbScale(GLASBERG_MOORE)

    def test_zero(self):
        assert erbs(self.scale, 0) == 0

    def test_matches_published_form(self):
        # 21.4 * lg(0.00437 f + 1) uses rounded constants
        f = np.array([100.0, 1000.0, 8000.0])
        published = 21.4 * np.log10(0.00437 * f + 1)
        np.testing.assert_allclose(erbs(self.scale, f), published, rtol=5e-3)

    def test_derived_constants(self):
        assert self.scale.e_prime == pytest.approx(21.4, rel=5e-3)
        assert self.scale.d_prime == pytest.approx(0.00437, rel=5e-3)

    def test_round_trip(self):
        u = erbs(self.scale, 1000.0)
        assert erbs_inverse(self.scale, u) == pytest.approx(1000.0, rel=1e-9)

    def test_inverse_rejects_negative(self):
        with pytest.raises(DomainError):
            erbs_inverse(self.scale, -0.1)

    def test_inverse_rejects_overflow(self):
        with pytest.raises(DomainError):
            erbs_inverse(self.scale, 1e6)

    def test_needs_positive_intercept(self):
        with pytest.raises(DomainError):
            LinearErbScale(LinearErb(0.0, 0.1))


class TestLogScale:
    scale = LogScale(7.7, 20.0)

    def test_offset_constant(self):
        # C = -A ln(f_m); 7.7 * ln 20 = 23.067
        assert self.scale.C == pytest.approx(-23.1, abs=0.05)

    def test_zero_at_fm(self):
        assert erbs(self.scale, 20.0) == 0

    def test_flat_below_fm(self):
        np.testing.assert_array_equal(erbs(self.scale, np.array([0.0, 5.0, 19.9])), 0.0)

    def test_one_e_fold(self):
        assert erbs(self.scale, 20 * math.e) == pytest.approx(7.7, rel=1e-14)

    def test_inverse_zero_is_fm(self):
        assert erbs_inverse(self.scale, 0.0) == 20.0

    def test_inverse(self):
        assert erbs_inverse(self.scale, 7.7) == pytest.approx(20 * math.e, rel=1e-14)

    def test_matches_a_ln_f_plus_c(self):
        f = np.geomspace(25, 20000, 11)
        np.testing.assert_allclose(erbs(self.scale, f), 7.7 * np.log(f) + self.scale.C, rtol=1e-12)

    def test_negative_frequency(self):
        with pytest.raises(DomainError):
            erbs(self.scale, -1.0)


class TestQuadrature:
    def test_simpson_polynomial_exact(self):
        assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-12)

    def test_simpson_reports_failure(self):
        with pytest.raises(NumericalError) as info:
            adaptive_simpson(lambda x: 1 / math.sqrt(x) if x > 0 else 1e300, 0.0, 1.0, max_depth=5)
        assert info.value.achieved is not None

    def test_linear_closed_form(self):
        numeric = erbs_numeric(GLASBERG_MOORE, 1000.0, 0.0)
        assert numeric == pytest.approx(erbs(LinearErbScale(), 1000.0), rel=1e-6)

    def test_empty_integral(self):
        assert erbs_numeric(LogErb(7.7), 300.0, 300.0) == 0.0

    def test_log_integral(self):
        assert erbs_numeric(LogErb(7.7), 200.0, 20.0) == pytest.approx(7.7 * math.log(10), rel=1e-9)

    def test_polynomial_against_antiderivative(self):
        # 1/(a f^2 + b f + c) with negative discriminant integrates to an arctan
        a, b, c = MOORE_GLASBERG_1983.a, MOORE_GLASBERG_1983.b, MOORE_GLASBERG_1983.c
        disc = b * b - 4 * a * c
        if disc < 0:
            q = math.sqrt(-disc)
            anti = lambda f: 2 / q * math.atan((2 * a * f + b) / q)
        else:
            q = math.sqrt(disc)
            anti = lambda f: math.log(abs((2 * a * f + b - q) / (2 * a * f + b + q))) / q
        expected = anti(5000.0) - anti(100.0)
        assert erbs_numeric(MOORE_GLASBERG_1983, 5000.0, 100.0) == pytest.approx(expected, rel=1e-8)

    def test_rejects_reversed_bounds(self):
        with pytest.raises(DomainError):
            erbs_numeric(GLASBERG_MOORE, 100.0, 200.0)

    def test_root_find_against_closed_inverse(self):
        scale = LinearErbScale()
        u = 17.3
        f = brentq(lambda x: erbs_numeric(GLASBERG_MOORE, x, 0.0) - u, 1.0, 20000.0, xtol=1e-10)
        assert erbs_inverse(scale, u) == pytest.approx(f, rel=1e-8)


class TestFit:
    def test_exact_recovery(self):
        f = np.array([100.0, 500.0, 2000.0, 6000.0])
        assert fit_log_erb_slope(zip(f, f / 7.7)) == pytest.approx(7.7, rel=1e-12)

    def test_duplicated_point(self):
        assert fit_log_erb_slope([(1000, 129.87), (1000, 129.87)]) == pytest.approx(7.7, abs=1e-3)

    def test_symmetric_noise(self):
        # +-1 Hz at the same frequency cancels in the normal equations
        pts = [(500, 100 + 1), (500, 100 - 1), (2000, 400)]
        assert fit_log_erb_slope(pts) == pytest.approx(5.0, abs=1e-2)

    @pytest.mark.parametrize("pts", [[], [(100, 10)], [(0, 10), (0, 20)], [(100, -1), (200, 20)]])
    def test_degenerate(self, pts):
        with pytest.raises(DomainError):
            fit_log_erb_slope(pts)


class TestCsv:
    def test_read(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("freq_hz,erb_hz\n100,13\n1000,130\n", encoding="utf-8")
        assert read_erb_csv(p) == [(100.0, 13.0), (1000.0, 130.0)]

    def test_bad_header(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("f,e\n100,13\n", encoding="utf-8")
        with pytest.raises(DomainError, match="line 1"):
            read_erb_csv(p)

    def test_bad_value_names_line(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("freq_hz,erb_hz\n100,13\n200,abc\n", encoding="utf-8")
        with pytest.raises(DomainError, match="line 3"):
            read_erb_csv(p)

    def test_empty(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("", encoding="utf-8")
        with pytest.raises(DomainError):
            read_erb_csv(p)
