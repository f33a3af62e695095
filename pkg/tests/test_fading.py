import math

import numpy as np
import pytest

from fadecap.fading import (
    ConstantError,
    FadingModel,
    GaussianEstimateLaw,
    GeneralPSDError,
    InterpolationError,
    PredictionError,
    entropy_power,
    error_variance,
    psd_interpolation_variance,
    psd_prediction_variance,
    rectangular_psd,
    sample_estimate,
)

# high-precision direct evaluation of the prediction closed form, B=1/4, rho=10
PRED_B25_RHO10 = math.sqrt(0.21) - 0.1


class TestErrorVariance:
    def test_interpolation_half_bt(self):
        m = FadingModel(error=InterpolationError(B=0.25, T=2))
        assert error_variance(m, 10.0) == pytest.approx(1.0 / 11.0, rel=1e-12)

    def test_interpolation_low_snr_limit(self):
        m = FadingModel(error=InterpolationError(B=0.25, T=2))
        assert error_variance(m, 1e-9) == pytest.approx(1.0, abs=1e-8)

    def test_prediction_quarter(self):
        m = FadingModel(error=PredictionError(B=0.25))
        assert error_variance(m, 10.0) == pytest.approx(PRED_B25_RHO10, rel=1e-12)

    def test_constant(self):
        m = FadingModel(error=ConstantError(0.5))
        assert error_variance(m, 3.0) == 0.5

    def test_rho_domain(self):
        m = FadingModel(error=ConstantError(0.5))
        with pytest.raises(ValueError):
            error_variance(m, 0.0)

    @pytest.mark.parametrize(
        "profile", [PredictionError(0.25), InterpolationError(0.25, 2)]
    )
    def test_strictly_decreasing(self, profile):
        grid = np.logspace(-1, 6, 40)
        vals = [profile.variance(r) for r in grid]
        assert all(a > b for a, b in zip(vals[:-1], vals[1:]))

    @pytest.mark.parametrize(
        "profile", [PredictionError(0.25), InterpolationError(0.25, 2)]
    )
    def test_vanishes_at_high_snr(self, profile):
        assert profile.variance(1e8) < 1e-3

    def test_invalid_bandwidths(self):
        with pytest.raises(ValueError):
            PredictionError(0.5)
        with pytest.raises(ValueError):
            InterpolationError(0.25, T=3)  # T > 1/(2B)

    def test_default_pilot_spacing(self):
        assert InterpolationError(0.25).T == 2
        assert InterpolationError(0.2).T == 2


class TestPSDVariances:
    def test_prediction_matches_closed_form(self):
        psd = rectangular_psd(0.25)
        v = psd_prediction_variance(psd, 10.0, breakpoints=(-0.25, 0.25))
        assert v == pytest.approx(PRED_B25_RHO10, abs=1e-7)

    def test_prediction_flat_edge(self):
        # psd identically 1: exp{log(1 + 1/rho)} - 1/rho = 1
        v = psd_prediction_variance(lambda lam: 1.0, 10.0)
        assert v == pytest.approx(1.0, abs=1e-9)

    def test_prediction_vanishes(self):
        psd = rectangular_psd(0.25)
        v = psd_prediction_variance(psd, 1e6, breakpoints=(-0.25, 0.25))
        assert v < 1e-2

    def test_interpolation_matches_closed_form(self):
        psd = rectangular_psd(0.25)
        v = psd_interpolation_variance(psd, 10.0, 2, breakpoints=(-0.25, 0.25))
        assert v == pytest.approx(1.0 / 11.0, abs=1e-7)

    def test_interpolation_limits(self):
        psd = rectangular_psd(0.25)
        lo = psd_interpolation_variance(psd, 1e-9, 2, breakpoints=(-0.25, 0.25))
        assert lo == pytest.approx(1.0, abs=1e-8)
        hi = psd_interpolation_variance(psd, 1e8, 2, breakpoints=(-0.25, 0.25))
        assert hi == pytest.approx(0.0, abs=1e-7)

    def test_general_psd_profile_dispatch(self):
        prof = GeneralPSDError(rectangular_psd(0.25), mode="interpolation", T=2,
                               breakpoints=(-0.25, 0.25))
        assert prof.variance(10.0) == pytest.approx(1.0 / 11.0, abs=1e-7)


class TestEntropyPower:
    def test_gaussian_error(self):
        m = FadingModel(error=ConstantError(0.5))
        assert entropy_power(m, 0j, 10.0) == 0.5

    def test_not_absolutely_continuous(self):
        m = FadingModel(error=ConstantError(0.5), error_gaussian=False,
                        error_absolutely_continuous=False)
        assert entropy_power(m, 0j, 10.0) == 0.0

    def test_supplied_entropy_inverts(self):
        v = 0.37
        m = FadingModel(
            error=ConstantError(v),
            error_gaussian=False,
            error_entropy=lambda hhat, rho: math.log(math.pi * math.e * v),
        )
        assert entropy_power(m, 0j, 10.0) == pytest.approx(v, rel=1e-12)

    def test_refuses_to_assume_gaussian(self):
        m = FadingModel(error=ConstantError(0.5), error_gaussian=False)
        with pytest.raises(ValueError):
            entropy_power(m, 0j, 10.0)


class TestSampling:
    def test_second_moment(self):
        m = FadingModel(GaussianEstimateLaw(0.0, 0.5), ConstantError(0.0))
        rng = np.random.default_rng(3)
        h = sample_estimate(m, 10.0, rng, size=10**6)
        g = np.abs(h) ** 2
        se = g.std(ddof=1) / math.sqrt(len(g))
        assert abs(g.mean() - 0.5) < 4.0 * se

    def test_determinism(self):
        m = FadingModel(GaussianEstimateLaw(0.0, 0.5), ConstantError(0.0))
        a = sample_estimate(m, 10.0, np.random.default_rng(42), size=1000)
        b = sample_estimate(m, 10.0, np.random.default_rng(42), size=1000)
        np.testing.assert_array_equal(a, b)

    def test_degenerate(self):
        m = FadingModel(GaussianEstimateLaw(1.0, 0.0), ConstantError(0.0))
        h = sample_estimate(m, 10.0, np.random.default_rng(0), size=100)
        np.testing.assert_array_equal(h, np.ones(100, dtype=complex))


class TestNormalization:
    def test_normalized_tracks_error(self):
        m = FadingModel(error=InterpolationError(0.25, 2), normalized=True)
        for rho in (0.1, 1.0, 100.0):
            assert m.vhat(rho) + m.vtilde(rho) == pytest.approx(1.0, rel=1e-12)

    def test_unnormalized_keeps_vhat(self):
        m = FadingModel(GaussianEstimateLaw(0.0, 0.5), ConstantError(0.5))
        assert m.vhat(123.0) == 0.5
