"""Command-line entry points.

Subcommands: downscale, evaluate, forecast, compare, aggregate.  Every run
emits its data files plus one manifest recording the command, the resolved
configuration (seed included), input and output checksums, and the tool
version.  Exit codes: 0 success, 1 usage or configuration error, 2 data
validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import itertools
import sys
from pathlib import Path

import numpy as np

from . import io as _io
from .arima import (
    ArimaSpec,
    DiagnosticReport,
    adf_test,
    forecast,
    information_criteria,
    ljung_box,
    select_model,
)
from .decompose import decompose_additive
from .downscale import DownscaleConfig, downscale
from .exceptions import ConfigError, FitError, SelectionError, ValidationError
from .metrics import error_report, summary_stats
from .series import AggregatedSeries, build_prior, sigma0_from_prior

__all__ = ["main", "build_parser", "run_compare"]

MONTHLY_GRID_DEFAULT = (
    "(1,0,0)(0,1,1)12;(0,1,1)(0,1,1)12;(1,0,0)(1,1,0)12;(2,0,0)(0,1,1)12"
)
DAILY_GRID_DEFAULT = (
    "(1,0,0)+F1:365.25;(2,0,0)+F1:365.25;(1,0,1)+F1:365.25;(2,0,1)+F1:365.25"
)


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


_DOWNSCALE_DEFAULTS = {
    "sigma0": (float, None),
    "sigma_divisor": (float, 30.0),
    "threshold": (float, 0.6),
    "threshold_mode": (str, "fraction"),
    "sweeps": (int, 100),
    "radius": (int, 3),
    "refresh_threshold": (_bool, False),
    "seed": (int, None),
}

_EVALUATE_DEFAULTS = {
    "period": (int, None),
    "mase_m": (int, 1),
    "seed": (int, None),
}

_FORECAST_DEFAULTS = {
    "criterion": (str, "bic"),
    "boxcox": (float, None),
    "lb_lags": (int, None),
    "seed": (int, None),
}

_COMPARE_DEFAULTS = dict(_DOWNSCALE_DEFAULTS)
_COMPARE_DEFAULTS.update({
    "criterion": (str, "bic"),
    "mase_m": (int, 1),
    "monthly_grid": (str, MONTHLY_GRID_DEFAULT),
    "daily_grid": (str, DAILY_GRID_DEFAULT),
})

_AGGREGATE_DEFAULTS = {"seed": (int, None)}


def _load_config(path):
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            cfg[key.strip()] = value.strip()
    return cfg


def _fill(args):
    """Resolve option precedence: CLI flag > config file > default."""
    table = getattr(args, "defaults", {})
    cfg = _load_config(args.config) if args.config else {}
    for key in cfg:
        if key not in table:
            raise ConfigError(f"unknown config key {key!r}")
    for dest, (cast, default) in table.items():
        if getattr(args, dest, None) is None:
            if dest in cfg:
                try:
                    setattr(args, dest, cast(cfg[dest]))
                except ValueError:
                    raise ConfigError(
                        f"config value {dest}={cfg[dest]!r} is not valid"
                    ) from None
            else:
                setattr(args, dest, default)


def _prefix(args, input_path) -> str:
    if args.out_prefix:
        return args.out_prefix
    p = Path(input_path)
    return str(p.with_suffix(""))


def _series_start(agg: AggregatedSeries):
    try:
        return _io.period_start(agg.labels[0])
    except ValidationError:
        return _dt.date(1970, 1, 1)


def _echo(args, keys):
    out = {k: getattr(args, k) for k in keys}
    out["out_prefix"] = args.out_prefix
    return out


def _parse_grid(text: str):
    specs = [s for s in (part.strip() for part in text.split(";")) if s]
    if not specs:
        raise ConfigError(f"empty model grid {text!r}")
    return [ArimaSpec.from_text(s) for s in specs]


# ---------------------------------------------------------------------------
# downscale


def _downscale_config(args, agg) -> DownscaleConfig:
    sigma0 = args.sigma0
    if sigma0 is None:
        sigma0 = sigma0_from_prior(build_prior(agg), divisor=args.sigma_divisor)
    return DownscaleConfig(
        sigma0=sigma0, threshold=args.threshold,
        threshold_mode=args.threshold_mode, sweeps=args.sweeps,
        radius=args.radius, family="normal", seed=args.seed,
        sigma_divisor=args.sigma_divisor,
        refresh_threshold=args.refresh_threshold,
    )


def cmd_downscale(args) -> int:
    agg = _io.ingest_csv(args.input, "aggregated")
    config = _downscale_config(args, agg)
    result = downscale(agg, config)
    prefix = _prefix(args, args.input)
    start = _series_start(agg)

    files = []
    for tag, stage in (("stage_initial", result.initial),
                       ("stage_smoothed", result.smoothed),
                       ("daily", result.final)):
        path = f"{prefix}_{tag}.csv"
        _io.emit_daily(path, stage.values, start=start)
        files.append((path, "daily"))

    sums = {tag: stage.unit_sums()
            for tag, stage in (("initial", result.initial),
                               ("smoothed", result.smoothed),
                               ("final", result.final))}
    rows = []
    for i, unit in enumerate(agg.units):
        rows.append([unit.label, unit.length, unit.value,
                     int(sums["initial"][i]), int(sums["smoothed"][i]),
                     int(sums["final"][i])])
    rows.append(["Total", agg.n_days, agg.total,
                 int(sums["initial"].sum()), int(sums["smoothed"].sum()),
                 int(sums["final"].sum())])
    units_path = f"{prefix}_units.csv"
    _io.emit_table(units_path, ["period", "days", "input", "initial",
                                "smoothed", "final"], rows)
    files.append((units_path, "table"))

    report_path = f"{prefix}_report.json"
    _io.dump_json(report_path, {
        "sigma0": config.sigma0,
        "threshold_used": result.threshold_used,
        "spike_counts": list(result.spike_counts),
        "sweeps_run": result.sweeps_run,
        "stopped_early": result.stopped_early,
        "total": int(result.final.total),
    })
    files.append((report_path, "json"))

    _io.write_manifest(
        f"{prefix}_manifest.json", "downscale",
        _echo(args, _DOWNSCALE_DEFAULTS), [args.input], files,
    )
    print(f"downscale: {agg.n_days} days, total {int(result.final.total)}, "
          f"wrote {prefix}_daily.csv")
    return 0


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(args) -> int:
    _, actual = _io.ingest_csv(args.actual, "daily")
    _, synthetic = _io.ingest_csv(args.synthetic, "daily")
    if actual.size != synthetic.size:
        raise ValidationError(
            f"series lengths differ: {actual.size} vs {synthetic.size}"
        )
    report = error_report(actual, synthetic, m=args.mase_m)
    prefix = _prefix(args, args.synthetic)
    files = []

    metrics_path = f"{prefix}_metrics.json"
    _io.dump_json(metrics_path, report.as_dict())
    files.append((metrics_path, "json"))

    stats_a = summary_stats(actual)
    stats_s = summary_stats(synthetic)
    summary_path = f"{prefix}_summary.csv"
    _io.emit_table(summary_path, ["statistic", "actual", "synthetic"],
                   [[k, stats_a[k], stats_s[k]] for k in stats_a])
    files.append((summary_path, "table"))

    if args.period is not None:
        for tag, values in (("actual", actual), ("synthetic", synthetic)):
            dec = decompose_additive(values.astype(float), args.period)
            path = f"{prefix}_components_{tag}.csv"
            rows = zip(range(values.size), values, dec.trend, dec.seasonal,
                       dec.residual)
            _io.emit_table(path, ["index", "observed", "trend", "seasonal",
                                  "residual"], rows)
            files.append((path, "table"))

    _io.write_manifest(
        f"{prefix}_manifest.json", "evaluate",
        _echo(args, _EVALUATE_DEFAULTS), [args.actual, args.synthetic], files,
    )
    mase_text = "undefined" if report.mase is None else repr(report.mase)
    print(f"evaluate: rmse {report.rmse!r} mae {report.mae!r} mase {mase_text}")
    return 0


# ---------------------------------------------------------------------------
# forecast


def _sniff_schema(path) -> str:
    with open(path) as fh:
        head = fh.readline().strip()
    first = head.split(",")[0].strip()
    if first == "date":
        return "daily"
    if first == "period":
        return "aggregated"
    raise ValidationError(f"{path}: cannot tell daily from aggregated input "
                          f"(header starts with {first!r})")


def _emit_models_table(path, table):
    rows = []
    for rank, row in enumerate(table, start=1):
        rows.append([rank, row["spec"], row["k"], row["loglik"], row["aic"],
                     row["aicc"], row["bic"], row["error"]])
    _io.emit_table(path, ["rank", "spec", "k", "loglik", "aic", "aicc",
                          "bic", "error"], rows)


def _diagnose(series, best, lb_lags):
    """ADF on the modelled series plus Ljung-Box on the winner's residuals."""
    if series.size >= 20:
        adf = adf_test(series)
        adf_stat, adf_reject = adf.stat, adf.reject_5pct
        adf_info = dataclasses.asdict(adf)
    else:
        adf_stat, adf_reject = float("nan"), False
        adf_info = {"applicable": False, "reason": "series shorter than 20"}
    resid = best.residuals
    spec = best.spec
    fitted = spec.p + spec.q + spec.P + spec.Q
    lags = lb_lags if lb_lags is not None else min(20, resid.size - 1)
    lags = max(lags, fitted + 1)
    if resid.size > lags > fitted:
        q, p = ljung_box(resid, lags, fitted)
    else:
        q, p, lags = float("nan"), float("nan"), None
    report = DiagnosticReport(
        adf_stat=adf_stat, adf_reject_5pct=adf_reject,
        ljung_box_Q=q, ljung_box_p=p,
        criteria=information_criteria(best),
    )
    return report, adf_info, {"lags": lags, "fitted_params": fitted}


def _coefficients(fit):
    return {
        "ar": list(fit.ar), "ma": list(fit.ma),
        "seasonal_ar": list(fit.seasonal_ar),
        "seasonal_ma": list(fit.seasonal_ma),
        "intercept": fit.intercept,
        "fourier": [list(pair) for pair in fit.fourier_coeffs],
        "sigma2": fit.sigma2,
        "ar_root_moduli": list(fit.ar_root_moduli),
        "ma_root_moduli": list(fit.ma_root_moduli),
    }


def cmd_forecast(args) -> int:
    schema = _sniff_schema(args.input)
    if schema == "daily":
        _, values = _io.ingest_csv(args.input, "daily")
        y = values.astype(float)
    else:
        agg = _io.ingest_csv(args.input, "aggregated")
        y = agg.values.astype(float)

    specs = []
    for chunk in args.spec:
        specs.extend(_parse_grid(chunk))
    if args.boxcox is not None:
        specs = [
            dataclasses.replace(s, boxcox_lambda=args.boxcox)
            if s.boxcox_lambda is None else s
            for s in specs
        ]

    selection = select_model(y, specs, args.criterion)
    best = selection.best
    fc = forecast(best, args.horizon)
    report, adf_info, lb_info = _diagnose(y, best, args.lb_lags)

    prefix = _prefix(args, args.input)
    files = []
    models_path = f"{prefix}_models.csv"
    _emit_models_table(models_path, selection.table)
    files.append((models_path, "table"))

    forecast_path = f"{prefix}_forecast.csv"
    _io.emit_table(forecast_path, ["step", "forecast"],
                   zip(range(1, fc.size + 1), fc))
    files.append((forecast_path, "table"))

    residuals_path = f"{prefix}_residuals.csv"
    _io.emit_table(residuals_path, ["step", "residual"],
                   zip(range(1, best.residuals.size + 1), best.residuals))
    files.append((residuals_path, "table"))

    diag_path = f"{prefix}_diagnostics.json"
    _io.dump_json(diag_path, {
        "input_schema": schema,
        "criterion": args.criterion,
        "spec": best.spec.text,
        "coefficients": _coefficients(best),
        "loglik": best.loglik,
        "n_effective": best.n_effective,
        "converged": best.converged,
        "report": report.as_dict(),
        "adf": adf_info,
        "ljung_box": lb_info,
    })
    files.append((diag_path, "json"))

    _io.write_manifest(
        f"{prefix}_manifest.json", "forecast",
        dict(_echo(args, _FORECAST_DEFAULTS), spec=";".join(args.spec),
             horizon=args.horizon),
        [args.input], files,
    )
    lb_text = "skipped" if lb_info["lags"] is None else repr(report.ljung_box_p)
    print(f"forecast: best {best.spec.text} by {args.criterion}, "
          f"ljung-box p {lb_text}, wrote {forecast_path}")
    return 0


# ---------------------------------------------------------------------------
# compare


def run_compare(agg: AggregatedSeries, holdout: int, monthly_grid,
                daily_grid, *, criterion: str = "bic",
                config: DownscaleConfig = None, seed=None,
                daily_truth=None, mase_m: int = 1):
    """Score a direct aggregate forecast against the downscaled-daily route.

    The last `holdout` units are held out.  The aggregate branch fits its
    grid on the training units and forecasts the holdout unit values; the
    daily branch downscales the training units, fits its grid on the
    synthetic days, and forecasts the holdout window day by day.  Daily
    forecasts are scored against `daily_truth` when given (exactly the
    holdout window), otherwise against the downscaled representation of
    the holdout from a full-series run with the same configuration.
    """
    n = len(agg.units)
    if not 0 < holdout < n:
        raise ValidationError(f"holdout must lie in 1..{n - 1}, got {holdout}")
    train = AggregatedSeries(agg.units[: n - holdout])
    test_units = agg.units[n - holdout:]
    test_values = np.array([u.value for u in test_units], dtype=float)
    h_days = int(sum(u.length for u in test_units))

    monthly_specs = _parse_grid(monthly_grid) if isinstance(monthly_grid, str) else list(monthly_grid)
    daily_specs = _parse_grid(daily_grid) if isinstance(daily_grid, str) else list(daily_grid)

    sel_m = select_model(train.values.astype(float), monthly_specs, criterion)
    fc_m = np.asarray(forecast(sel_m.best, holdout), dtype=float)
    report_m = error_report(test_values, fc_m, m=mase_m)

    if config is None:
        sigma0 = sigma0_from_prior(build_prior(train))
        config = DownscaleConfig(sigma0=sigma0, seed=seed)
    synthetic = downscale(train, config).final.values.astype(float)
    sel_d = select_model(synthetic, daily_specs, criterion)
    fc_d = np.asarray(forecast(sel_d.best, h_days), dtype=float)

    if daily_truth is not None:
        reference = np.asarray(daily_truth, dtype=float)
        if reference.size != h_days:
            raise ValidationError(
                f"daily truth has {reference.size} values, holdout spans {h_days} days"
            )
        reference_source = "truth"
    else:
        full = downscale(agg, config)
        reference = full.final.values[-h_days:].astype(float)
        reference_source = "downscaled"
    report_d = error_report(reference, fc_d, m=mase_m)

    if report_m.mase is None or report_d.mase is None:
        winner = "undefined"
    else:
        winner = "daily" if report_d.mase < report_m.mase else "monthly"
    return {
        "monthly": {"spec": sel_m.best.spec.text, "report": report_m,
                    "forecast": fc_m, "table": sel_m.table},
        "daily": {"spec": sel_d.best.spec.text, "report": report_d,
                  "forecast": fc_d, "table": sel_d.table,
                  "reference": reference_source},
        "holdout": holdout,
        "holdout_days": h_days,
        "winner": winner,
    }


def cmd_compare(args) -> int:
    agg = _io.ingest_csv(args.input, "aggregated")
    if not 0 < args.holdout < len(agg.units):
        raise ValidationError(
            f"holdout must lie in 1..{len(agg.units) - 1}, got {args.holdout}"
        )
    train = AggregatedSeries(agg.units[: len(agg.units) - args.holdout])
    config = _downscale_config(args, train)
    daily_truth = None
    inputs = [args.input]
    if args.daily_truth:
        _, daily_truth = _io.ingest_csv(args.daily_truth, "daily")
        inputs.append(args.daily_truth)

    result = run_compare(
        agg, args.holdout, args.monthly_grid, args.daily_grid,
        criterion=args.criterion, config=config,
        daily_truth=daily_truth, mase_m=args.mase_m,
    )

    prefix = _prefix(args, args.input)
    files = []
    comparison_path = f"{prefix}_comparison.csv"
    rows = []
    for branch in ("monthly", "daily"):
        rep = result[branch]["report"]
        rows.append([branch, result[branch]["spec"], rep.rmse, rep.mae,
                     rep.mase, rep.n])
    _io.emit_table(comparison_path,
                   ["branch", "spec", "rmse", "mae", "mase", "n"], rows)
    files.append((comparison_path, "table"))

    for branch in ("monthly", "daily"):
        path = f"{prefix}_forecast_{branch}.csv"
        fc = result[branch]["forecast"]
        _io.emit_table(path, ["step", "forecast"],
                       zip(range(1, fc.size + 1), fc))
        files.append((path, "table"))

    json_path = f"{prefix}_compare.json"
    _io.dump_json(json_path, {
        "winner": result["winner"],
        "holdout": result["holdout"],
        "holdout_days": result["holdout_days"],
        "monthly": {"spec": result["monthly"]["spec"],
                    "metrics": result["monthly"]["report"].as_dict()},
        "daily": {"spec": result["daily"]["spec"],
                  "metrics": result["daily"]["report"].as_dict(),
                  "reference": result["daily"]["reference"]},
    })
    files.append((json_path, "json"))

    _io.write_manifest(
        f"{prefix}_manifest.json", "compare",
        dict(_echo(args, _COMPARE_DEFAULTS), holdout=args.holdout,
             daily_truth=args.daily_truth),
        inputs, files,
    )

    def _mase_text(rep):
        return "undefined" if rep.mase is None else repr(rep.mase)

    print(f"compare: monthly mase {_mase_text(result['monthly']['report'])} "
          f"vs daily mase {_mase_text(result['daily']['report'])} "
          f"-> {result['winner']}")
    return 0


# ---------------------------------------------------------------------------
# aggregate


def cmd_aggregate(args) -> int:
    dates, values = _io.ingest_csv(args.input, "daily")
    labels, sums, lengths = [], [], []
    pos = 0
    for month, group in itertools.groupby(dates, key=lambda d: d[:7]):
        count = len(list(group))
        labels.append(month)
        sums.append(int(values[pos : pos + count].sum()))
        lengths.append(count)
        pos += count
    agg = AggregatedSeries.from_values(sums, lengths, labels=labels)
    prefix = _prefix(args, args.input)
    out_path = f"{prefix}_aggregated.csv"
    _io.emit_aggregated(out_path, agg)
    _io.write_manifest(
        f"{prefix}_manifest.json", "aggregate",
        _echo(args, _AGGREGATE_DEFAULTS), [args.input],
        [(out_path, "aggregated")],
    )
    print(f"aggregate: {len(labels)} units, total {agg.total}, wrote {out_path}")
    return 0


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="countscale",
                     description="Downscale aggregated counts to synthetic "
                                 "daily series and forecast either scale.")
    parser.add_argument("--version", action="version", version=_io.TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (full determinism per seed)")
    common.add_argument("--config", default=None,
                        help="flat key=value file; CLI flags take precedence")
    common.add_argument("--out-prefix", dest="out_prefix", default=None,
                        help="output path prefix (default: input name)")

    p = sub.add_parser("downscale", parents=[common],
                       help="aggregated CSV -> synthetic daily CSV")
    p.add_argument("input")
    p.add_argument("--sigma0", type=float, default=None,
                   help="jitter scale (default: derived from the input)")
    p.add_argument("--sigma-divisor", dest="sigma_divisor", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--threshold-mode", dest="threshold_mode",
                   choices=("fraction", "absolute"), default=None)
    p.add_argument("--sweeps", type=int, default=None)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--refresh-threshold", dest="refresh_threshold",
                   action="store_const", const=True, default=None)
    p.set_defaults(func=cmd_downscale, defaults=_DOWNSCALE_DEFAULTS)

    p = sub.add_parser("evaluate", parents=[common],
                       help="error metrics and decomposition for two daily CSVs")
    p.add_argument("actual")
    p.add_argument("synthetic")
    p.add_argument("--period", type=int, default=None,
                   help="seasonal period; enables component CSVs")
    p.add_argument("--mase-m", dest="mase_m", type=int, default=None)
    p.set_defaults(func=cmd_evaluate, defaults=_EVALUATE_DEFAULTS)

    p = sub.add_parser("forecast", parents=[common],
                       help="fit a model grid and forecast")
    p.add_argument("input")
    p.add_argument("--spec", action="append", required=True,
                   help='candidate like "(1,0,0)(0,1,1)12"; repeat or '
                        "semicolon-separate for a grid")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--criterion", choices=("aic", "aicc", "bic"), default=None)
    p.add_argument("--boxcox", type=float, default=None,
                   help="Box-Cox lambda applied to candidates without one")
    p.add_argument("--lb-lags", dest="lb_lags", type=int, default=None)
    p.set_defaults(func=cmd_forecast, defaults=_FORECAST_DEFAULTS)

    p = sub.add_parser("compare", parents=[common],
                       help="direct aggregate forecast vs downscaled-daily forecast")
    p.add_argument("input")
    p.add_argument("--holdout", type=int, required=True,
                   help="number of trailing units to score against")
    p.add_argument("--monthly-grid", dest="monthly_grid", default=None)
    p.add_argument("--daily-grid", dest="daily_grid", default=None)
    p.add_argument("--daily-truth", dest="daily_truth", default=None,
                   help="daily CSV covering exactly the holdout window")
    p.add_argument("--criterion", choices=("aic", "aicc", "bic"), default=None)
    p.add_argument("--mase-m", dest="mase_m", type=int, default=None)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--sigma-divisor", dest="sigma_divisor", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--threshold-mode", dest="threshold_mode",
                   choices=("fraction", "absolute"), default=None)
    p.add_argument("--sweeps", type=int, default=None)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--refresh-threshold", dest="refresh_threshold",
                   action="store_const", const=True, default=None)
    p.set_defaults(func=cmd_compare, defaults=_COMPARE_DEFAULTS)

    p = sub.add_parser("aggregate", parents=[common],
                       help="daily CSV -> calendar-month aggregated CSV")
    p.add_argument("input")
    p.set_defaults(func=cmd_aggregate, defaults=_AGGREGATE_DEFAULTS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _fill(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"countscale: configuration error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"countscale: {exc}", file=sys.stderr)
        return 2
    except (FitError, SelectionError) as exc:
        print(f"countscale: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
