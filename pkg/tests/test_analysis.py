import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from oblink.analysis import (
    analytic_ber,
    analytic_snr_gap_db,
    ber_curve,
    binomial_ci,
    delay_storage_report,
    q_function,
    snr_gain_db,
    spectral_gain,
    unload_curve,
    unload_probability,
)
from oblink.bitunit import make_scheme_params
from oblink.phy import Scheme, SnrConvention, SnrSpec

P36 = make_scheme_params(36, 4, 256)


class TestUnloadProbability:
    def test_frozen_values(self):
        # oracle: direct evaluation of ((phi-1)/phi)**m
        assert unload_probability(16, 256) == pytest.approx(6.678005283720385e-08, rel=1e-12)
        assert unload_probability(8, 8) == pytest.approx(0.34360891580581665, rel=1e-12)
        assert unload_probability(4, 0) == 1.0
        assert unload_probability(1, 5) == 0.0

    def test_monotone_in_m(self):
        vals = [unload_probability(16, m) for m in range(0, 200, 7)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_ordered_in_phi(self):
        for m in (1, 8, 64, 384):
            assert unload_probability(8, m) < unload_probability(16, m) < unload_probability(32, m)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            unload_probability(0, 1)
        with pytest.raises(ValueError):
            unload_probability(4, -1)

    @given(st.integers(2, 64), st.integers(0, 500))
    @settings(max_examples=100, deadline=None)
    def test_stays_in_unit_interval(self, phi, m):
        assert 0.0 <= unload_probability(phi, m) <= 1.0


class TestGains:
    def test_spectral_gain_values(self):
        assert spectral_gain(36, 4) == pytest.approx(1.125, abs=0)
        assert spectral_gain(36, 0) == 1.0

    def test_snr_gain_db(self):
        # oracle: 10*log10(36/32)
        assert snr_gain_db(36, 4) == pytest.approx(0.5115252244738129, rel=1e-12)

    def test_rejects_k_out_of_range(self):
        with pytest.raises(ValueError):
            spectral_gain(36, 36)


class TestQFunction:
    def test_frozen_value(self):
        assert q_function(math.sqrt(2.0)) == pytest.approx(0.07864960352514257, rel=1e-13)

    def test_against_gaussian_tail_quadrature(self):
        # independent oracle: numerical integration of the standard normal tail
        for x in (0.0, 0.5, 1.5, 3.0, 4.2):
            tail, _ = integrate.quad(lambda u: math.exp(-u * u / 2) / math.sqrt(2 * math.pi), x, np.inf)
            assert q_function(x) == pytest.approx(tail, rel=1e-9)

    def test_against_scipy_norm_sf(self):
        for x in np.linspace(-2, 6, 17):
            assert q_function(float(x)) == pytest.approx(stats.norm.sf(x), rel=1e-12)


class TestAnalyticBer:
    def test_conventional_at_0db(self):
        got = analytic_ber(Scheme.CONVENTIONAL, SnrSpec(0.0, SnrConvention.ES_N0), P36)
        assert got == pytest.approx(0.07864960352514257, rel=1e-12)

    def test_proposed_at_0db_ebn0(self):
        # oracle: (32/36) * Q(sqrt(2 * 1.125)) = 0.0594
        got = analytic_ber(Scheme.PROPOSED, SnrSpec(0.0, SnrConvention.EB_N0_INFO), P36)
        assert got == pytest.approx(0.059384178905651626, rel=1e-12)

    def test_proposed_esn0_keeps_prefactor_only(self):
        got = analytic_ber(Scheme.PROPOSED, SnrSpec(0.0, SnrConvention.ES_N0), P36)
        assert got == pytest.approx((32 / 36) * 0.07864960352514257, rel=1e-12)

    def test_rejects_coded_rate(self):
        with pytest.raises(ValueError):
            analytic_ber(Scheme.PROPOSED, SnrSpec(0.0), P36, code_rate=0.5)

    def test_proposed_never_worse_under_ebn0(self):
        for db in np.linspace(0, 10, 21):
            snr = SnrSpec(float(db), SnrConvention.EB_N0_INFO)
            assert analytic_ber(Scheme.PROPOSED, snr, P36) <= analytic_ber(Scheme.CONVENTIONAL, snr, P36)

    def test_curves_builder(self):
        curve = ber_curve(Scheme.PROPOSED, [0, 3, 6], SnrConvention.EB_N0_INFO, P36)
        assert len(curve.x_values) == 3
        assert ((curve.y_values >= 0) & (curve.y_values <= 1)).all()


def test_analytic_gap_at_1e4():
    """Gap oracle (frozen from a bisection cross-check): 0.5815 dB at BER 1e-4."""
    gap = analytic_snr_gap_db(P36, SnrConvention.EB_N0_INFO, 1e-4)
    assert gap == pytest.approx(0.5815489381341159, abs=1e-6)


def test_unload_curve_shape():
    curve = unload_curve(8, [1, 8, 16])
    assert curve.y_values[1] == pytest.approx(0.34360891580581665, rel=1e-12)


class TestDelayStorage:
    def test_frozen_example(self):
        # oracle: direct products for N=36, K=4, M=256
        rep = delay_storage_report(P36)
        assert rep.storage_bits == 8192
        assert rep.bus_before_first_injection == 256
        assert rep.rounds_to_first_injection == 16

    def test_minimum_storage(self):
        rep = delay_storage_report(make_scheme_params(36, 4, 1))
        assert rep.storage_bits == 32
        assert rep.rounds_to_first_injection == 1


class TestBinomialCi:
    def test_brackets_point_estimate(self):
        for k, n in [(0, 100), (5, 100), (50, 100), (100, 100), (3, 7)]:
            lo, hi = binomial_ci(k, n)
            assert lo <= k / n <= hi

    def test_against_scipy_normal_quantile(self):
        lo, hi = binomial_ci(50, 100)
        z = stats.norm.isf(0.025)
        p, n = 0.5, 100
        denom = 1 + z * z / n
        center = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        assert lo == pytest.approx(center - half, rel=1e-9)
        assert hi == pytest.approx(center + half, rel=1e-9)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            binomial_ci(5, 4)
