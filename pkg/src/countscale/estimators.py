"""Estimator-style wrappers with the fit/transform/predict and get_params
conventions, so the pipeline composes with scikit-learn tooling."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .arima import ArimaSpec, fit_arima, forecast
from .downscale import DownscaleConfig, downscale
from .exceptions import ValidationError
from .series import AggregatedSeries, sigma0_from_prior, build_prior

__all__ = ["TemporalDownscaler", "SarimaForecaster"]


class TemporalDownscaler(BaseEstimator, TransformerMixin):
    """Turns aggregated count units into a synthetic daily series.

    fit() resolves the jitter scale from the aggregate itself when sigma0
    is None; transform() runs the full generate/smooth/restore pipeline and
    returns the daily values as an integer array.  Each transform of the
    same input with the same seed reproduces the same series.
    """

    def __init__(self, sigma0=None, threshold=0.6, threshold_mode="fraction",
                 sweeps=100, radius=3, seed=None, sigma_divisor=30.0):
        self.sigma0 = sigma0
        self.threshold = threshold
        self.threshold_mode = threshold_mode
        self.sweeps = sweeps
        self.radius = radius
        self.seed = seed
        self.sigma_divisor = sigma_divisor

    @staticmethod
    def _as_aggregated(X) -> AggregatedSeries:
        if isinstance(X, AggregatedSeries):
            return X
        values, lengths = X
        return AggregatedSeries.from_values(values, lengths)

    def fit(self, X, y=None):
        agg = self._as_aggregated(X)
        if self.sigma0 is not None:
            self.sigma0_ = float(self.sigma0)
        else:
            prior = build_prior(agg)
            self.sigma0_ = sigma0_from_prior(prior, divisor=self.sigma_divisor)
        return self

    def transform(self, X):
        if not hasattr(self, "sigma0_"):
            raise ValidationError("transform called before fit")
        agg = self._as_aggregated(X)
        config = DownscaleConfig(
            sigma0=self.sigma0_, threshold=self.threshold,
            threshold_mode=self.threshold_mode, sweeps=self.sweeps,
            radius=self.radius, seed=self.seed,
            sigma_divisor=self.sigma_divisor,
        )
        self.result_ = downscale(agg, config)
        return self.result_.final.values.copy()


class SarimaForecaster(BaseEstimator):
    """Point-forecast regressor over a single series.

    Parameters mirror ArimaSpec; fit(y) estimates the model and predict(h)
    returns h steps ahead on the original scale.
    """

    def __init__(self, order=(1, 0, 0), seasonal_order=(0, 0, 0, 0),
                 fourier_K=0, fourier_period=365.25, include_intercept=True,
                 boxcox_lambda=None, maxiter=5000):
        self.order = order
        self.seasonal_order = seasonal_order
        self.fourier_K = fourier_K
        self.fourier_period = fourier_period
        self.include_intercept = include_intercept
        self.boxcox_lambda = boxcox_lambda
        self.maxiter = maxiter

    def _spec(self) -> ArimaSpec:
        p, d, q = self.order
        P, D, Q, s = self.seasonal_order
        return ArimaSpec(
            p=p, d=d, q=q, P=P, D=D, Q=Q, s=s,
            fourier_K=self.fourier_K, fourier_period=self.fourier_period,
            include_intercept=self.include_intercept,
            boxcox_lambda=self.boxcox_lambda,
        )

    def fit(self, y, X=None):
        y = np.asarray(y, dtype=float)
        self.fit_ = fit_arima(y, self._spec(), maxiter=self.maxiter)
        return self

    def predict(self, horizon: int):
        if not hasattr(self, "fit_"):
            raise ValidationError("predict called before fit")
        return forecast(self.fit_, horizon)
