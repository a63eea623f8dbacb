"""Transforms, unit-root and portmanteau tests, CSS estimation, model
selection, and forecasting identities."""

import math

import numpy as np
import pytest

from countscale import (
    ArimaSpec,
    ConfigError,
    SelectionError,
    ValidationError,
    acf,
    adf_test,
    box_cox,
    difference,
    fit_arima,
    forecast,
    fourier_terms,
    information_criteria,
    inv_box_cox,
    ljung_box,
    seasonal_difference,
    select_model,
)
from countscale.arima import _innovations


def ar1(n, phi, seed, mu=0.0, sd=1.0):
    rng = np.random.default_rng(seed)
    e = rng.normal(0, sd, n)
    y = np.zeros(n)
    y[0] = e[0]
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y + mu


class TestDifference:
    def test_first_difference(self):
        assert list(difference([1, 3, 6], 1)) == [2, 3]

    def test_second_difference_of_squares(self):
        assert list(difference([1, 4, 9, 16], 2)) == [2, 2]

    def test_identity(self):
        assert list(difference([5, 6], 0)) == [5, 6]

    def test_too_short(self):
        with pytest.raises(ValidationError):
            difference([1, 2], 2)

    def test_seasonal(self):
        assert list(seasonal_difference([1, 2, 3, 4], 1, 2)) == [2, 2]
        assert list(seasonal_difference([1, 2, 3, 4], 0, 2)) == [1, 2, 3, 4]

    def test_roundtrip_reconstruction(self):
        """Cumulative reconstruction from retained initial values."""
        rng = np.random.default_rng(0)
        for trial in range(300):
            n = int(rng.integers(10, 60))
            s = int(rng.integers(1, 5))
            y = rng.normal(0, 10, n)
            w = seasonal_difference(y, 1, s)
            rebuilt = list(y[:s])
            for v in w:
                rebuilt.append(v + rebuilt[-s])
            assert np.allclose(rebuilt, y, atol=1e-10), f"trial {trial}"
            d = difference(y, 1)
            rebuilt = np.concatenate([[y[0]], y[0] + np.cumsum(d)])
            assert np.allclose(rebuilt, y, atol=1e-10)


class TestBoxCox:
    def test_lambda_one_is_shift(self):
        y = np.array([1.0, 2.0, 5.0])
        assert np.allclose(box_cox(y, 1.0), y - 1.0)

    def test_lambda_zero_is_log(self):
        y = np.array([1.0, math.e, math.e**2])
        assert np.allclose(box_cox(y, 0.0), [0, 1, 2])

    def test_hand_computed(self):
        got = box_cox(np.array([4.0]), 0.49)[0]
        assert got == pytest.approx((4**0.49 - 1) / 0.49, abs=1e-10)
        assert got == pytest.approx(1.98463, abs=1e-4)

    def test_inverse_identity(self):
        rng = np.random.default_rng(1)
        for lam in (-0.5, 0.0, 0.3, 0.49, 1.0, 2.0):
            y = rng.uniform(0.5, 50, 100)
            assert np.allclose(inv_box_cox(box_cox(y, lam), lam), y, atol=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValidationError):
            box_cox([0.0, 1.0], 0.0)
        with pytest.raises(ValidationError):
            box_cox([-1.0], 0.5)

    def test_zero_maps_through_positive_lambda(self):
        assert box_cox([0.0], 0.5)[0] == pytest.approx(-2.0)


class TestFourier:
    def test_shape_and_columns(self):
        X = fourier_terms(10, 365.25, 1)
        assert X.shape == (10, 2)
        X2 = fourier_terms(10, 12, 3)
        assert X2.shape == (10, 6)

    def test_t_starts_at_one(self):
        X = fourier_terms(5, 12.0, 1)
        assert X[0, 0] == pytest.approx(np.sin(2 * np.pi / 12))
        assert X[0, 1] == pytest.approx(np.cos(2 * np.pi / 12))

    def test_full_period_points(self):
        # t equal to the period: angle is 2*pi exactly
        X = fourier_terms(12, 12.0, 1)
        assert X[11, 0] == pytest.approx(0.0, abs=1e-12)
        assert X[11, 1] == pytest.approx(1.0)

    def test_near_orthogonality(self):
        n = 365 * 4
        X = fourier_terms(n, 365.0, 2)
        for i in range(X.shape[1]):
            for j in range(i + 1, X.shape[1]):
                assert abs(X[:, i] @ X[:, j]) / n < 1e-3

    def test_validation(self):
        with pytest.raises(ValidationError):
            fourier_terms(10, 365.25, 0)
        with pytest.raises(ValidationError):
            fourier_terms(10, -1.0, 1)


class TestAcf:
    def test_brute_force(self):
        rng = np.random.default_rng(2)
        x = rng.normal(0, 1, 50)
        xc = x - x.mean()
        denom = (xc**2).sum()
        got = acf(x, 10)
        for k in range(1, 11):
            want = (xc[:-k] * xc[k:]).sum() / denom
            assert got[k - 1] == pytest.approx(want, abs=1e-12)


class TestAdf:
    def test_white_noise_calibration(self):
        hits = 0
        for seed in range(100):
            y = np.random.default_rng(seed).normal(0, 1, 500)
            hits += adf_test(y).reject_5pct
        assert hits >= 90, f"only {hits}/100 white-noise series rejected"

    def test_random_walk_calibration(self):
        hits = 0
        for seed in range(100):
            y = np.cumsum(np.random.default_rng(seed).normal(0, 1, 500))
            hits += not adf_test(y).reject_5pct
        assert hits >= 90, f"only {hits}/100 random walks failed to reject"

    def test_default_lag_rule(self):
        y = np.random.default_rng(0).normal(0, 1, 151)
        res = adf_test(y)
        assert res.lag == int(12 * (151 / 100) ** 0.25)

    def test_explicit_lag(self):
        y = np.random.default_rng(0).normal(0, 1, 200)
        assert adf_test(y, max_lag=4).lag == 4

    def test_constant_series_inapplicable(self):
        res = adf_test(np.full(100, 3.0))
        assert not res.applicable
        assert math.isnan(res.stat)
        assert not res.reject_5pct

    def test_too_short(self):
        with pytest.raises(ValidationError):
            adf_test(np.arange(10))

    def test_fixture_ballpark(self, monthly_counts):
        res = adf_test(monthly_counts.values.astype(float))
        assert -6.0 < res.stat < -3.5
        assert res.reject_5pct


class TestSpec:
    def test_invariants(self):
        with pytest.raises(ConfigError):
            ArimaSpec(P=1)  # seasonal order without period
        with pytest.raises(ConfigError):
            ArimaSpec(p=-1)
        with pytest.raises(ConfigError):
            ArimaSpec(fourier_K=1, fourier_period=0.0)

    def test_text_roundtrip(self):
        specs = [
            ArimaSpec(),
            ArimaSpec(p=2, d=1, q=1),
            ArimaSpec(p=1, P=0, D=1, Q=1, s=12),
            ArimaSpec(p=1, fourier_K=2, fourier_period=365.25),
            ArimaSpec(q=1, boxcox_lambda=0.49),
            ArimaSpec(p=1, include_intercept=False),
        ]
        for s in specs:
            assert ArimaSpec.from_text(s.text) == s

    def test_parse_errors(self):
        with pytest.raises(ConfigError):
            ArimaSpec.from_text("1,0,0")
        with pytest.raises(ConfigError):
            ArimaSpec.from_text("(1,0,0)+X9")

    def test_coefficient_count(self):
        assert ArimaSpec(p=1, q=1).n_coefficients == 3  # ar, ma, intercept
        assert ArimaSpec(p=1, d=1).n_coefficients == 1  # differencing drops the mean
        assert ArimaSpec(fourier_K=1).n_coefficients == 3


class TestFit:
    def test_ar1_recovery(self):
        f = fit_arima(ar1(2000, 0.6, seed=0), ArimaSpec(p=1))
        assert abs(f.ar[0] - 0.6) < 0.05
        assert f.converged

    def test_ma1_recovery(self):
        rng = np.random.default_rng(3)
        e = rng.normal(0, 1, 2001)
        y = e[1:] + 0.5 * e[:-1]
        f = fit_arima(y, ArimaSpec(q=1))
        assert abs(f.ma[0] - 0.5) < 0.07

    def test_mean_model(self):
        rng = np.random.default_rng(4)
        z = rng.normal(5, 2, 400)
        f = fit_arima(z, ArimaSpec())
        assert f.intercept == pytest.approx(z.mean(), abs=1e-9)
        assert f.sigma2 == pytest.approx(z.var(), rel=1e-9)

    def test_intercept_dropped_under_differencing(self):
        y = np.cumsum(np.random.default_rng(5).normal(1, 1, 300))
        f = fit_arima(y, ArimaSpec(d=1))
        assert f.intercept is None

    def test_residuals_and_neffective(self):
        y = ar1(300, 0.5, seed=6)
        f = fit_arima(y, ArimaSpec(p=1, d=1))
        assert f.n_effective == 299
        assert f.residuals.shape == (299,)

    def test_coefficient_lengths_match_spec(self):
        y = ar1(400, 0.5, seed=7, mu=20.0)
        spec = ArimaSpec(p=2, q=1)
        f = fit_arima(y, spec)
        assert len(f.ar) == 2 and len(f.ma) == 1
        assert f.sigma2 >= 0

    def test_css_trace_monotone(self):
        """The best-point sum of squares never worsens across iterations."""
        y = ar1(300, 0.7, seed=8)
        spec = ArimaSpec(p=1, include_intercept=False)

        def css_of(theta):
            e = _innovations(y, theta[:1], [], [], [], 0)
            return float(e @ e)

        trace = []
        fit_arima(y, spec, callback=lambda xk: trace.append(css_of(xk)))
        assert len(trace) > 3
        assert all(a >= b - 1e-9 for a, b in zip(trace, trace[1:]))

    def test_too_short_after_differencing(self):
        with pytest.raises(ValidationError):
            fit_arima(np.arange(4, dtype=float), ArimaSpec(p=2, d=1, q=2))

    def test_fourier_regression(self):
        t = np.arange(1, 401)
        rng = np.random.default_rng(9)
        y = 10 + 3 * np.sin(2 * np.pi * t / 50) + 1.5 * np.cos(2 * np.pi * t / 50)
        y = y + rng.normal(0, 0.5, 400)
        f = fit_arima(y, ArimaSpec(fourier_K=1, fourier_period=50.0))
        (a1, b1), = f.fourier_coeffs
        assert a1 == pytest.approx(3.0, abs=0.2)
        assert b1 == pytest.approx(1.5, abs=0.2)
        assert f.intercept == pytest.approx(10.0, abs=0.2)

    def test_explosive_estimates_reported_not_rejected(self):
        # near-unit-root data: the fit reports root moduli instead of failing
        y = np.cumsum(np.random.default_rng(10).normal(0, 1, 300))
        f = fit_arima(y, ArimaSpec(p=1))
        assert len(f.ar_root_moduli) == 1
        assert f.ar_root_moduli[0] > 0


class TestInformationCriteria:
    def test_direct_formula(self):
        y = ar1(100, 0.4, seed=11)
        f = fit_arima(y, ArimaSpec(p=1))
        aic, aicc, bic = information_criteria(f)
        k = f.spec.n_coefficients + 1
        n = f.n_effective
        assert aic == pytest.approx(-2 * f.loglik + 2 * k)
        assert aicc == pytest.approx(aic + 2 * k * (k + 1) / (n - k - 1))
        assert bic == pytest.approx(-2 * f.loglik + k * math.log(n))
        assert aicc > aic

    def test_hand_example(self):
        # loglik -100, k 3, n 50
        aic = -2 * -100 + 2 * 3
        aicc = aic + 2 * 3 * 4 / (50 - 3 - 1)
        bic = 200 + 3 * math.log(50)
        assert aic == 206
        assert aicc == pytest.approx(206 + 24 / 46, abs=1e-12)
        assert aicc == pytest.approx(206.5217, abs=1e-4)
        assert bic == pytest.approx(211.736, abs=1e-3)

    def test_aicc_undefined_marker(self):
        y = np.random.default_rng(12).normal(0, 1, 3)
        f = fit_arima(y, ArimaSpec(p=1, include_intercept=False))
        # n_effective 3, k 2 -> n <= k+1: the correction divides by zero
        assert f.n_effective == 3 and f.spec.n_coefficients == 1
        assert information_criteria(f)[1] is None


class TestLjungBox:
    def test_brute_force_ten_points(self):
        x = np.array([1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, -0.5, 1.5, -2.5])
        n = len(x)
        xc = x - x.mean()
        denom = (xc**2).sum()
        q_want = 0.0
        for k in range(1, 4):
            rho = (xc[:-k] * xc[k:]).sum() / denom
            q_want += rho**2 / (n - k)
        q_want *= n * (n + 2)
        q_got, p_got = ljung_box(x, 3, 0)
        assert q_got == pytest.approx(q_want, abs=1e-10)
        assert 0.0 <= p_got <= 1.0

    def test_noise_calibration(self):
        high_p = 0
        for seed in range(200):
            e = np.random.default_rng(seed).normal(0, 1, 500)
            high_p += ljung_box(e, 20, 0)[1] > 0.05
        assert high_p >= 180

    def test_autocorrelated_detected(self):
        low_p = 0
        for seed in range(100):
            y = ar1(500, 0.9, seed=seed)
            low_p += ljung_box(y, 20, 0)[1] < 0.01
        assert low_p >= 95

    def test_chi_square_survival_against_series_oracle(self):
        # regularized upper incomplete gamma vs a direct series evaluation
        from scipy.special import gammaincc

        def oracle(x, df):
            # survival via integration on a fine grid (trapezoid)
            from scipy.integrate import quad
            from scipy.special import gamma as G

            f = lambda t: t ** (df / 2 - 1) * math.exp(-t / 2) / (2 ** (df / 2) * G(df / 2))
            val, _ = quad(f, x, np.inf)
            return val

        for x in (0.5, 2.0, 10.0, 25.0):
            for df in (1, 3, 10, 20):
                assert gammaincc(df / 2, x / 2) == pytest.approx(oracle(x, df), abs=1e-8)

    def test_degenerate_residuals(self):
        q, p = ljung_box(np.zeros(50), 10, 0)
        assert math.isnan(q) and math.isnan(p)

    def test_validation(self):
        with pytest.raises(ValidationError):
            ljung_box(np.arange(30), 5, 5)
        with pytest.raises(ValidationError):
            ljung_box(np.arange(10), 20, 0)


class TestSelectModel:
    def test_ar1_beats_white_noise(self):
        y = ar1(500, 0.7, seed=13)
        sel = select_model(y, ["(0,0,0)", "(1,0,0)"], "aic")
        assert sel.best.spec.text == "(1,0,0)"

    def test_single_candidate(self):
        y = ar1(100, 0.3, seed=14)
        sel = select_model(y, [ArimaSpec(p=1)], "bic")
        assert sel.best.spec == ArimaSpec(p=1)

    def test_table_is_permutation(self):
        y = ar1(200, 0.5, seed=15)
        cands = ["(0,0,0)", "(1,0,0)", "(0,0,1)", "(1,0,1)"]
        sel = select_model(y, cands, "bic")
        assert sorted(r["spec"] for r in sel.table) == sorted(cands)
        vals = [r["bic"] for r in sel.table if r["error"] == ""]
        assert vals == sorted(vals)

    def test_nested_loglik_inequality(self):
        y = ar1(300, 0.5, seed=16)
        small = fit_arima(y, ArimaSpec(p=1))
        large = fit_arima(y, ArimaSpec(p=2))
        assert large.loglik >= small.loglik - 1e-6

    def test_failures_recorded_and_all_fail_raises(self):
        short = np.arange(6, dtype=float)
        with pytest.raises(SelectionError) as exc_info:
            select_model(short, ["(3,0,3)", "(4,0,4)"], "aic")
        assert len(exc_info.value.failures) == 2

    def test_partial_failure_keeps_going(self):
        y = ar1(40, 0.5, seed=17)
        sel = select_model(y, ["(1,0,0)", "(9,0,9)"], "aic")
        assert sel.best.spec.text == "(1,0,0)"
        failed = [r for r in sel.table if r["error"]]
        assert len(failed) == 1

    def test_bad_criterion(self):
        with pytest.raises(ConfigError):
            select_model(np.arange(50, dtype=float), ["(0,0,0)"], "hqic")


class TestForecast:
    def test_flat_for_mean_model(self):
        y = np.random.default_rng(18).normal(7, 1, 200)
        f = fit_arima(y, ArimaSpec())
        fc = forecast(f, 5)
        assert np.allclose(fc, f.intercept)

    def test_seasonal_naive_identity(self):
        y = np.array([1, 2, 3, 4, 11, 22, 33, 44, 12, 24, 36, 48], dtype=float)
        f = fit_arima(y, ArimaSpec(D=1, s=4))
        assert np.allclose(forecast(f, 4), y[-4:])

    def test_ar1_geometric_convergence(self):
        y = ar1(1000, 0.6, seed=19, mu=10.0)
        f = fit_arima(y, ArimaSpec(p=1))
        fc = forecast(f, 50)
        mu = f.intercept
        phi = f.ar[0]
        # deviation from the mean decays geometrically
        dev0 = (y[-1] - mu)
        for h in (1, 5, 20):
            want = mu + phi**h * dev0
            assert fc[h - 1] == pytest.approx(want, abs=1e-9)

    def test_random_walk_forecast_is_last_value(self):
        y = np.cumsum(np.random.default_rng(20).normal(0, 1, 300))
        f = fit_arima(y, ArimaSpec(d=1))
        assert np.allclose(forecast(f, 7), y[-1])

    def test_boxcox_inverse_applied(self):
        y = np.exp(np.random.default_rng(21).normal(2, 0.2, 200))
        f = fit_arima(y, ArimaSpec(boxcox_lambda=0.0))
        fc = forecast(f, 3)
        assert np.allclose(fc, math.exp(f.intercept))

    def test_horizon_validation(self):
        y = np.random.default_rng(22).normal(0, 1, 50)
        f = fit_arima(y, ArimaSpec())
        with pytest.raises(ValidationError):
            forecast(f, 0)

    def test_fourier_continuation(self):
        # noiseless harmonic: forecasts continue the wave
        t = np.arange(1, 301, dtype=float)
        y = 20 + 4 * np.sin(2 * np.pi * t / 25) + 2 * np.cos(2 * np.pi * t / 25)
        f = fit_arima(y, ArimaSpec(fourier_K=1, fourier_period=25.0))
        fc = forecast(f, 10)
        tf = np.arange(301, 311, dtype=float)
        want = 20 + 4 * np.sin(2 * np.pi * tf / 25) + 2 * np.cos(2 * np.pi * tf / 25)
        assert np.allclose(fc, want, atol=1e-4)
