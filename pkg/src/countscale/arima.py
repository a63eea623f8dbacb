"""Box-Jenkins pipeline: transforms, unit-root and residual diagnostics,
ARMA/SARIMA/harmonic-regression fitting by conditional sum of squares, model
selection, and recursive point forecasting.

Estimation minimises the conditional sum of squares of the innovations
(pre-sample terms set to zero) with a deterministic Nelder-Mead start, so a
given series and spec always produce the same fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import toeplitz
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import gammaincc

from .exceptions import ConfigError, FitError, SelectionError, ValidationError

__all__ = [
    "difference",
    "seasonal_difference",
    "box_cox",
    "inv_box_cox",
    "fourier_terms",
    "acf",
    "AdfResult",
    "adf_test",
    "ArimaSpec",
    "ArimaFit",
    "fit_arima",
    "information_criteria",
    "ljung_box",
    "DiagnosticReport",
    "SelectionResult",
    "select_model",
    "forecast",
]

_TINY = 1e-300


# ---------------------------------------------------------------------------
# transforms


def difference(series, d: int):
    """Apply the first difference d times; length shrinks by d."""
    y = np.asarray(series, dtype=float)
    if d < 0:
        raise ValidationError(f"d must be >= 0, got {d}")
    if y.size <= d:
        raise ValidationError(f"series of length {y.size} cannot be differenced {d} times")
    for _ in range(d):
        y = np.diff(y)
    return y


def seasonal_difference(series, D: int, s: int):
    """Apply the lag-s difference D times; length shrinks by D*s."""
    y = np.asarray(series, dtype=float)
    if D < 0:
        raise ValidationError(f"D must be >= 0, got {D}")
    if s < 1:
        raise ValidationError(f"seasonal period must be >= 1, got {s}")
    if y.size <= D * s:
        raise ValidationError(
            f"series of length {y.size} cannot be seasonally differenced {D} times at lag {s}"
        )
    for _ in range(D):
        y = y[s:] - y[:-s]
    return y


def box_cox(series, lam: float):
    """Power transform: (y**lam - 1)/lam, or log y at lam = 0."""
    y = np.asarray(series, dtype=float)
    if lam <= 0:
        if np.any(y <= 0):
            raise ValidationError("box_cox with lambda <= 0 requires strictly positive values")
    elif np.any(y < 0):
        raise ValidationError("box_cox requires non-negative values")
    if lam == 0:
        return np.log(y)
    return (np.power(y, lam) - 1.0) / lam


def inv_box_cox(series, lam: float):
    """Exact inverse of box_cox; values below the branch domain clip to 0."""
    z = np.asarray(series, dtype=float)
    if lam == 0:
        return np.exp(z)
    base = lam * z + 1.0
    # a point forecast can wander below the transform's image; the inverse
    # is undefined there and 0 is the nearest value in range
    base = np.maximum(base, 0.0)
    return np.power(base, 1.0 / lam)


def fourier_terms(n: int, period: float, K: int):
    """Harmonic regressors sin/cos(2*pi*k*t/period), k=1..K, t=1..n."""
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    if period <= 0:
        raise ValidationError(f"period must be positive, got {period}")
    t = np.arange(1, n + 1, dtype=float)
    cols = []
    for k in range(1, K + 1):
        w = 2.0 * np.pi * k * t / period
        cols.append(np.sin(w))
        cols.append(np.cos(w))
    return np.column_stack(cols)


def _fourier_at(tvals, period: float, K: int):
    t = np.asarray(tvals, dtype=float)
    cols = []
    for k in range(1, K + 1):
        w = 2.0 * np.pi * k * t / period
        cols.append(np.sin(w))
        cols.append(np.cos(w))
    return np.column_stack(cols)


def acf(series, nlags: int):
    """Sample autocorrelations 1..nlags (mean-removed, biased normalisation)."""
    x = np.asarray(series, dtype=float)
    if nlags < 1:
        raise ValidationError(f"nlags must be >= 1, got {nlags}")
    if x.size <= nlags:
        raise ValidationError(f"need more than {nlags} points, got {x.size}")
    x = x - x.mean()
    denom = float(x @ x)
    if denom == 0:
        return np.full(nlags, np.nan)
    return np.array([float(x[: x.size - k] @ x[k:]) / denom for k in range(1, nlags + 1)])


# ---------------------------------------------------------------------------
# unit-root test

# MacKinnon response-surface coefficients for the constant-only case:
# crit = b0 + b1/T + b2/T**2 + b3/T**3
_ADF_CRIT = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
}


def _adf_critical(level: float, nobs: int) -> float:
    b0, b1, b2, b3 = _ADF_CRIT[level]
    return b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3


@dataclass(frozen=True)
class AdfResult:
    stat: float
    reject_5pct: bool
    lag: int
    nobs: int
    crit_1pct: float
    crit_5pct: float
    applicable: bool = True


def adf_test(series, max_lag: int = None) -> AdfResult:
    """Unit-root t-test: regress dy_t on (const, y_{t-1}, dy_{t-1..k}).

    The lag k defaults to floor(12*(n/100)**0.25).  Rejection (stat below
    the 5% critical value) indicates stationarity.  A constant series makes
    the regressor matrix degenerate; the result is then flagged
    inapplicable with a NaN statistic.
    """
    y = np.asarray(series, dtype=float)
    n = y.size
    if n < 20:
        raise ValidationError(f"adf_test needs at least 20 points, got {n}")
    k = int(12 * (n / 100.0) ** 0.25) if max_lag is None else int(max_lag)
    if k < 0:
        raise ValidationError(f"max_lag must be >= 0, got {max_lag}")
    dy = np.diff(y)
    nobs = dy.size - k
    if nobs < k + 3:
        raise ValidationError(f"series too short for lag order {k}")
    rows = [np.ones(nobs), y[k : n - 1]]
    for i in range(1, k + 1):
        rows.append(dy[k - i : dy.size - i])
    X = np.column_stack(rows)
    target = dy[k:]
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        return AdfResult(
            stat=float("nan"),
            reject_5pct=False,
            lag=k,
            nobs=int(nobs),
            crit_1pct=_adf_critical(0.01, nobs),
            crit_5pct=_adf_critical(0.05, nobs),
            applicable=False,
        )
    beta, *_ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ beta
    dof = nobs - X.shape[1]
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(beta[1] / math.sqrt(cov[1, 1]))
    crit5 = _adf_critical(0.05, nobs)
    return AdfResult(
        stat=stat,
        reject_5pct=bool(stat < crit5),
        lag=k,
        nobs=int(nobs),
        crit_1pct=_adf_critical(0.01, nobs),
        crit_5pct=crit5,
    )


# ---------------------------------------------------------------------------
# model spec and fit


@dataclass(frozen=True)
class ArimaSpec:
    """Orders and regression structure of one candidate model."""

    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 0
    fourier_K: int = 0
    fourier_period: float = 365.25
    include_intercept: bool = True
    boxcox_lambda: float = None

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q", "s", "fourier_K"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v!r}")
        if self.s == 0 and (self.P or self.D or self.Q):
            raise ConfigError("seasonal orders require a seasonal period s > 0")
        if self.s == 1:
            raise ConfigError("seasonal period s must be 0 (none) or >= 2")
        if self.fourier_K > 0 and self.fourier_period <= 0:
            raise ConfigError("fourier_period must be positive when fourier_K > 0")

    @property
    def n_coefficients(self) -> int:
        k = self.p + self.q + self.P + self.Q + 2 * self.fourier_K
        if self.include_intercept and self.d + self.D == 0:
            k += 1
        return k

    @property
    def text(self) -> str:
        out = f"({self.p},{self.d},{self.q})"
        if self.s:
            out += f"({self.P},{self.D},{self.Q}){self.s}"
        if self.fourier_K:
            out += f"+F{self.fourier_K}:{self.fourier_period:g}"
        if self.boxcox_lambda is not None:
            out += f"+L{self.boxcox_lambda:g}"
        if not self.include_intercept:
            out += "+noc"
        return out

    @classmethod
    def from_text(cls, text: str) -> "ArimaSpec":
        """Parse "(p,d,q)", "(p,d,q)(P,D,Q)s", with +F/+L/+noc suffixes."""
        raw = text.strip().replace(" ", "")
        parts = raw.split("+")
        head, mods = parts[0], parts[1:]
        import re

        m = re.fullmatch(
            r"\((\d+),(\d+),(\d+)\)(?:\((\d+),(\d+),(\d+)\)(\d+))?", head
        )
        if not m:
            raise ConfigError(f"cannot parse model spec {text!r}")
        g = [int(v) if v is not None else 0 for v in m.groups()]
        kwargs = dict(p=g[0], d=g[1], q=g[2], P=g[3], D=g[4], Q=g[5], s=g[6])
        for mod in mods:
            if mod == "noc":
                kwargs["include_intercept"] = False
            elif mod.startswith("F"):
                kpart, _, ppart = mod[1:].partition(":")
                kwargs["fourier_K"] = int(kpart)
                if ppart:
                    kwargs["fourier_period"] = float(ppart)
            elif mod.startswith("L"):
                kwargs["boxcox_lambda"] = float(mod[1:])
            else:
                raise ConfigError(f"unknown spec modifier {mod!r} in {text!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class ArimaFit:
    """Estimated coefficients plus everything forecasting needs."""

    spec: ArimaSpec
    ar: np.ndarray
    ma: np.ndarray
    seasonal_ar: np.ndarray
    seasonal_ma: np.ndarray
    intercept: float  # None when no intercept is estimated
    fourier_coeffs: tuple  # (a_k, b_k) pairs
    sigma2: float
    loglik: float
    n_effective: int
    residuals: np.ndarray
    converged: bool
    n_iter: int
    css: float
    ar_root_moduli: tuple = ()
    ma_root_moduli: tuple = ()
    # training context consumed by forecast()
    y_transformed: np.ndarray = field(default=None, repr=False)
    regressors: np.ndarray = field(default=None, repr=False)
    beta: np.ndarray = field(default=None, repr=False)


def _lag_poly(coefs):
    # autoregressive convention (1 - c1 B - c2 B^2 - ...) as ascending coefficients
    return np.concatenate(([1.0], -np.asarray(coefs, dtype=float)))


def _seasonal_lag_poly(coefs, s: int):
    out = np.zeros(len(coefs) * s + 1)
    out[0] = 1.0
    for i, c in enumerate(coefs, start=1):
        out[i * s] = -float(c)
    return out


def _ma_lag_poly(coefs):
    # moving-average convention (1 + c1 B + c2 B^2 + ...) as ascending coefficients
    return np.concatenate(([1.0], np.asarray(coefs, dtype=float)))


def _seasonal_ma_lag_poly(coefs, s: int):
    out = np.zeros(len(coefs) * s + 1)
    out[0] = 1.0
    for i, c in enumerate(coefs, start=1):
        out[i * s] = float(c)
    return out


def _innovations(w, ar, ma, sar, sma, s):
    """Zero-presample innovations of the (seasonal) ARMA recursion."""
    ar_poly = npoly.polymul(_lag_poly(ar), _seasonal_lag_poly(sar, s)) if s else _lag_poly(ar)
    ma_poly = npoly.polymul(_ma_lag_poly(ma), _seasonal_ma_lag_poly(sma, s)) if s else _ma_lag_poly(ma)
    return lfilter(ar_poly, ma_poly, w)


def _difference_all(y, spec: ArimaSpec):
    w = difference(y, spec.d) if spec.d else np.asarray(y, dtype=float)
    if spec.D:
        w = seasonal_difference(w, spec.D, spec.s)
    return w


def _yule_walker(w, p: int):
    """Autocorrelation-equation AR start values, clipped to a stable range."""
    if p == 0:
        return np.array([])
    x = np.asarray(w, dtype=float)
    x = x - x.mean()
    n = x.size
    if n <= p:
        return np.zeros(p)
    r = np.array([float(x[: n - k] @ x[k:]) / n for k in range(p + 1)])
    if r[0] <= 0:
        return np.zeros(p)
    try:
        phi = np.linalg.solve(toeplitz(r[:p]), r[1 : p + 1])
    except np.linalg.LinAlgError:
        return np.zeros(p)
    if not np.all(np.isfinite(phi)):
        return np.zeros(p)
    return np.clip(phi, -0.95, 0.95)


def _root_moduli(poly):
    """Moduli of the roots of an ascending-order lag polynomial."""
    c = np.asarray(poly, dtype=float)
    if c.size <= 1 or not np.any(c[1:]):
        return ()
    roots = np.roots(c[::-1])
    return tuple(float(abs(r)) for r in roots)


def fit_arima(series, spec: ArimaSpec, maxiter: int = 5000, callback=None) -> ArimaFit:
    """Estimate a model by conditional sum of squares.

    Pipeline: optional Box-Cox, optional regression on intercept/harmonic
    columns (regression with ARMA errors, coefficients estimated jointly),
    regular and seasonal differencing, then Nelder-Mead over the innovation
    sum of squares from a deterministic start (autocorrelation-equation AR
    values, MA at zero, regression part at its least-squares solution).

    Raises FitError when the optimizer exhausts its budget, carrying the
    iteration count and final objective in `diagnostics`.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    if spec.boxcox_lambda is not None:
        y = box_cox(y, spec.boxcox_lambda)

    n = y.size
    use_intercept = spec.include_intercept and (spec.d + spec.D == 0)
    cols = []
    if use_intercept:
        cols.append(np.ones(n))
    if spec.fourier_K:
        cols.append(fourier_terms(n, spec.fourier_period, spec.fourier_K))
    X = np.column_stack(cols) if cols else None

    p, q, P, Q, s = spec.p, spec.q, spec.P, spec.Q, spec.s
    n_beta = X.shape[1] if X is not None else 0
    k_coef = p + q + P + Q + n_beta

    if X is not None:
        beta0, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid0 = y - X @ beta0
    else:
        beta0 = np.array([])
        resid0 = y
    w0 = _difference_all(resid0, spec)
    n_eff = w0.size
    if n_eff < max(3, k_coef + 1):
        raise ValidationError(
            f"only {n_eff} observations remain after differencing; "
            f"too few for {k_coef} coefficients"
        )

    def split(theta):
        i = 0
        ar = theta[i : i + p]; i += p
        ma = theta[i : i + q]; i += q
        sar = theta[i : i + P]; i += P
        sma = theta[i : i + Q]; i += Q
        return ar, ma, sar, sma, theta[i:]

    def innovations_for(theta):
        ar, ma, sar, sma, beta = split(theta)
        r = y - X @ beta if X is not None else y
        w = _difference_all(r, spec)
        return _innovations(w, ar, ma, sar, sma, s)

    def objective(theta):
        e = innovations_for(theta)
        css = float(e @ e)
        if not np.isfinite(css):
            return 1e10
        # log keeps the tolerance scale-free; monotone in the css itself
        return 0.5 * math.log(max(css, _TINY) / e.size)

    if k_coef == 0:
        e = w0
        css = float(e @ e)
        sigma2 = css / n_eff
        loglik = -0.5 * n_eff * (math.log(2 * math.pi * max(sigma2, _TINY)) + 1.0)
        return ArimaFit(
            spec=spec, ar=np.array([]), ma=np.array([]),
            seasonal_ar=np.array([]), seasonal_ma=np.array([]),
            intercept=None, fourier_coeffs=(), sigma2=float(sigma2),
            loglik=float(loglik), n_effective=int(n_eff), residuals=e,
            converged=True, n_iter=0, css=css,
            y_transformed=y, regressors=X, beta=beta0,
        )

    theta0 = np.concatenate([
        _yule_walker(w0, p), np.zeros(q), np.zeros(P), np.zeros(Q), beta0,
    ])
    simplex = np.vstack([theta0] + [theta0 + 0.1 * e for e in np.eye(theta0.size)])
    res = minimize(
        objective, theta0, method="Nelder-Mead", callback=callback,
        options=dict(
            initial_simplex=simplex, xatol=1e-8, fatol=1e-8,
            maxiter=maxiter, maxfev=10**6,
        ),
    )
    if not res.success:
        raise FitError(
            f"estimation did not converge for {spec.text} "
            f"after {res.nit} simplex iterations",
            diagnostics={"iterations": int(res.nit), "objective": float(res.fun),
                         "spec": spec.text},
        )

    ar, ma, sar, sma, beta = split(res.x)
    e = innovations_for(res.x)
    css = float(e @ e)
    sigma2 = css / n_eff
    loglik = -0.5 * n_eff * (math.log(2 * math.pi * max(sigma2, _TINY)) + 1.0)

    fourier_pairs = ()
    intercept = None
    if X is not None:
        b = list(beta)
        if use_intercept:
            intercept = float(b.pop(0))
        fourier_pairs = tuple((float(b[2 * k]), float(b[2 * k + 1])) for k in range(spec.fourier_K))

    return ArimaFit(
        spec=spec,
        ar=np.asarray(ar, dtype=float),
        ma=np.asarray(ma, dtype=float),
        seasonal_ar=np.asarray(sar, dtype=float),
        seasonal_ma=np.asarray(sma, dtype=float),
        intercept=intercept,
        fourier_coeffs=fourier_pairs,
        sigma2=float(sigma2),
        loglik=float(loglik),
        n_effective=int(n_eff),
        residuals=e,
        converged=True,
        n_iter=int(res.nit),
        css=css,
        ar_root_moduli=_root_moduli(_lag_poly(ar)),
        ma_root_moduli=_root_moduli(_ma_lag_poly(ma)),
        y_transformed=y,
        regressors=X,
        beta=np.asarray(beta, dtype=float),
    )


def information_criteria(fit: ArimaFit):
    """(AIC, AICc, BIC) with k = coefficient count + 1 for the variance.

    AICc is None when the effective sample is too small for the correction.
    """
    k = fit.spec.n_coefficients + 1
    n = fit.n_effective
    aic = -2.0 * fit.loglik + 2.0 * k
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1) if n > k + 1 else None
    bic = -2.0 * fit.loglik + k * math.log(n)
    return float(aic), (float(aicc) if aicc is not None else None), float(bic)


def ljung_box(residuals, lags: int, fitted_params: int = 0):
    """Portmanteau autocorrelation test on residuals.

    Returns (Q, p) where p comes from the chi-square survival function with
    lags - fitted_params degrees of freedom.  Degenerate (zero-variance)
    residuals return (nan, nan).
    """
    e = np.asarray(residuals, dtype=float)
    if lags <= fitted_params:
        raise ValidationError(f"lags ({lags}) must exceed fitted_params ({fitted_params})")
    if e.size <= lags:
        raise ValidationError(f"need more than {lags} residuals, got {e.size}")
    if np.allclose(e, e[0]):
        return float("nan"), float("nan")
    n = e.size
    rho = acf(e, lags)
    q = n * (n + 2.0) * float(np.sum(rho**2 / (n - np.arange(1, lags + 1))))
    df = lags - fitted_params
    pval = float(gammaincc(df / 2.0, q / 2.0))
    return float(q), pval


@dataclass(frozen=True)
class DiagnosticReport:
    """Stationarity and residual-whiteness summary for a chosen model."""

    adf_stat: float
    adf_reject_5pct: bool
    ljung_box_Q: float
    ljung_box_p: float
    criteria: tuple  # (aic, aicc, bic)

    def __post_init__(self):
        p = self.ljung_box_p
        if p is not None and not math.isnan(p) and not 0.0 <= p <= 1.0:
            raise ValidationError(f"ljung_box_p must lie in [0, 1], got {p}")

    def as_dict(self):
        return {
            "adf_stat": self.adf_stat,
            "adf_reject_5pct": self.adf_reject_5pct,
            "ljung_box_Q": self.ljung_box_Q,
            "ljung_box_p": self.ljung_box_p,
            "criteria": {"aic": self.criteria[0], "aicc": self.criteria[1],
                         "bic": self.criteria[2]},
        }


@dataclass(frozen=True)
class SelectionResult:
    best: ArimaFit
    table: tuple  # rows: dict per candidate, ranked


def select_model(series, candidates, criterion: str = "bic", maxiter: int = 5000) -> SelectionResult:
    """Fit every candidate and rank by an information criterion.

    Failed candidates are kept in the table with their error message and
    sort to the bottom.  Ties break on fewer coefficients, then on the
    spec's text form.  Raises SelectionError when nothing fits.
    """
    criterion = criterion.lower()
    if criterion not in ("aic", "aicc", "bic"):
        raise ConfigError(f"criterion must be aic, aicc or bic, got {criterion!r}")
    pos = {"aic": 0, "aicc": 1, "bic": 2}[criterion]
    rows = []
    fits = {}
    for spec_ in candidates:
        spec_ = ArimaSpec.from_text(spec_) if isinstance(spec_, str) else spec_
        row = {"spec": spec_.text, "k": spec_.n_coefficients + 1}
        try:
            f = fit_arima(series, spec_, maxiter=maxiter)
            aic, aicc, bic = information_criteria(f)
            row.update(loglik=f.loglik, aic=aic, aicc=aicc, bic=bic, error="")
            fits[spec_.text] = f
        except (FitError, ValidationError) as exc:
            row.update(loglik=None, aic=None, aicc=None, bic=None, error=str(exc))
        rows.append(row)

    def sort_key(row):
        value = (row["aic"], row["aicc"], row["bic"])[pos]
        if value is None:
            return (1, 0.0, row["k"], row["spec"])
        return (0, value, row["k"], row["spec"])

    rows.sort(key=sort_key)
    if not fits:
        raise SelectionError(
            "no candidate model could be fitted",
            failures=[(r["spec"], r["error"]) for r in rows],
        )
    best_row = next(r for r in rows if not r["error"])
    return SelectionResult(best=fits[best_row["spec"]], table=tuple(rows))


def forecast(fit: ArimaFit, horizon: int):
    """Recursive point forecasts on the original scale.

    Future innovations are zero; the differencing is inverted with the
    retained tail values, regression terms are evaluated at future times,
    and any Box-Cox transform is inverted last.
    """
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")
    spec = fit.spec
    y = np.asarray(fit.y_transformed, dtype=float)
    n = y.size
    h = int(horizon)

    if fit.regressors is not None:
        r = y - fit.regressors @ fit.beta
        cols = []
        if fit.intercept is not None:
            cols.append(np.ones(h))
        if spec.fourier_K:
            cols.append(_fourier_at(np.arange(n + 1, n + h + 1), spec.fourier_period, spec.fourier_K))
        mu_future = np.column_stack(cols) @ fit.beta
    else:
        r = y
        mu_future = np.zeros(h)

    s = spec.s
    ar_poly = npoly.polymul(_lag_poly(fit.ar), _seasonal_lag_poly(fit.seasonal_ar, s)) if s else _lag_poly(fit.ar)
    ma_poly = npoly.polymul(_ma_lag_poly(fit.ma), _seasonal_ma_lag_poly(fit.seasonal_ma, s)) if s else _ma_lag_poly(fit.ma)

    w = _difference_all(r, spec)
    e = lfilter(ar_poly, ma_poly, w)

    w_ext = w.tolist()
    e_ext = e.tolist()
    n_ar, n_ma = ar_poly.size - 1, ma_poly.size - 1
    for _ in range(h):
        val = 0.0
        for i in range(1, n_ar + 1):
            if len(w_ext) - i >= 0:
                val -= ar_poly[i] * w_ext[len(w_ext) - i]
        for j in range(1, n_ma + 1):
            idx = len(e_ext) - j
            if idx >= 0:
                val += ma_poly[j] * e_ext[idx]
        w_ext.append(val)
        e_ext.append(0.0)

    # invert the differencing: r_t = w_t - sum_j c_j r_{t-j} with c the
    # expansion of (1-B)^d (1-B^s)^D beyond lag zero
    diff_poly = np.array([1.0])
    for _ in range(spec.d):
        diff_poly = npoly.polymul(diff_poly, np.array([1.0, -1.0]))
    for _ in range(spec.D):
        seas = np.zeros(s + 1)
        seas[0], seas[s] = 1.0, -1.0
        diff_poly = npoly.polymul(diff_poly, seas)

    r_ext = r.tolist()
    w_future = w_ext[w.size :]
    for t in range(h):
        val = w_future[t]
        for j in range(1, diff_poly.size):
            val -= diff_poly[j] * r_ext[len(r_ext) - j]
        r_ext.append(val)

    out = np.asarray(r_ext[n:], dtype=float) + mu_future
    if spec.boxcox_lambda is not None:
        out = inv_box_cox(out, spec.boxcox_lambda)
    return out
