"""countscale: temporal downscaling of aggregated count series and
Box-Jenkins forecasting at either granularity.

The core pipeline turns per-unit totals (for example monthly case counts)
into a synthetic daily series whose per-unit sums match the input exactly,
then smooths the jumps that independent per-unit generation leaves at unit
boundaries.  A companion forecasting stack (ARMA/SARIMA/harmonic regression
fitted by conditional sum of squares) supports comparing forecasts made
directly on the aggregate against forecasts made on the synthetic days.
"""

from .arima import (
    AdfResult,
    ArimaFit,
    ArimaSpec,
    DiagnosticReport,
    SelectionResult,
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
from .decompose import DecompositionResult, decompose_additive
from .downscale import (
    DownscaleConfig,
    DownscaleResult,
    detect_spikes,
    downscale,
    resolve_threshold,
    sigma0_for,
    smooth_spikes,
)
from .estimators import SarimaForecaster, TemporalDownscaler
from .exceptions import (
    ConfigError,
    FitError,
    SelectionError,
    ValidationError,
)
from .io import ingest_csv, parse_period, sha256_file, verify_manifest, write_manifest
from .metrics import ErrorReport, error_report, mae, mase, rmse, summary_stats
from .series import (
    AggregatedSeries,
    AggregateUnit,
    DailySeries,
    PriorSeries,
    aggregate,
    build_prior,
    sigma0_from_prior,
)

__version__ = "0.1.0"

__all__ = [
    "AdfResult",
    "AggregateUnit",
    "AggregatedSeries",
    "ArimaFit",
    "ArimaSpec",
    "ConfigError",
    "DailySeries",
    "DecompositionResult",
    "DiagnosticReport",
    "DownscaleConfig",
    "DownscaleResult",
    "ErrorReport",
    "FitError",
    "PriorSeries",
    "SarimaForecaster",
    "SelectionError",
    "SelectionResult",
    "TemporalDownscaler",
    "ValidationError",
    "acf",
    "adf_test",
    "aggregate",
    "box_cox",
    "build_prior",
    "decompose_additive",
    "detect_spikes",
    "difference",
    "downscale",
    "error_report",
    "fit_arima",
    "forecast",
    "fourier_terms",
    "information_criteria",
    "ingest_csv",
    "inv_box_cox",
    "ljung_box",
    "mae",
    "mase",
    "parse_period",
    "resolve_threshold",
    "rmse",
    "seasonal_difference",
    "select_model",
    "sha256_file",
    "sigma0_for",
    "sigma0_from_prior",
    "smooth_spikes",
    "summary_stats",
    "verify_manifest",
    "write_manifest",
    "__version__",
]
