"""Small statistical helpers shared by the experiment harness."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import ParameterError, UnsupportedDistributionTargetError


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    sd: float
    skewness: float
    kurtosis: float  # excess


def summarize(values: np.ndarray) -> SampleSummary:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size < 2:
        raise ParameterError(
            f"need at least 2 finite values to summarize, got {v.size}")
    return SampleSummary(
        count=int(v.size),
        mean=float(np.mean(v)),
        sd=float(np.std(v, ddof=1)),
        skewness=float(sps.skew(v, bias=False)),
        kurtosis=float(sps.kurtosis(v, bias=False)),
    )


def ks_against_gaussian(values: np.ndarray, sd: float) -> tuple[float, float]:
    """KS statistic and p-value of a sample against N(0, sd^2).

    Only the Gaussian limit admits a KS target here; callers facing a
    non-Gaussian limit law should raise UnsupportedDistributionTargetError
    before reaching this point.
    """
    if not (np.isfinite(sd) and sd > 0):
        raise ParameterError(f"KS reference sd must be > 0, got {sd}")
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size < 8:
        raise ParameterError(
            f"need at least 8 finite values for a KS test, got {v.size}")
    res = sps.kstest(v, "norm", args=(0.0, sd))
    return float(res.statistic), float(res.pvalue)


def require_gaussian_target(kind: str) -> None:
    if kind != "gaussian":
        raise UnsupportedDistributionTargetError(
            f"distribution comparison requires a Gaussian limit, got "
            f"'{kind}'; no closed-form CDF is available")


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float


def loglog_fit(x: np.ndarray, y: np.ndarray) -> LogLogFit:
    """Least-squares slope of log y against log x.

    Both inputs must be positive; a non-positive y (e.g. a degenerate
    spread estimate) is a caller error, not a fit result.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ParameterError(
            f"need matching 1-D arrays of length >= 2, got {x.shape} and {y.shape}")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ParameterError("log-log fit needs positive finite x")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise ParameterError("log-log fit needs positive finite y")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    total = ly - np.mean(ly)
    denom = float(total @ total)
    r2 = 1.0 if denom == 0.0 else 1.0 - float(resid @ resid) / denom
    return LogLogFit(slope=float(slope), intercept=float(intercept),
                     r_squared=r2)


def rate_normalizer(t: float, exponent: float, log_correction: bool) -> float:
    """T^exponent, with a 1/sqrt(log T) tempering in the critical case.

    The critical normalizer sqrt(T / log T) is this with exponent 1/2;
    the logarithm is natural.
    """
    if log_correction and t <= 1.0:
        raise ParameterError(
            f"log-corrected normalizer needs horizon > 1, got {t}")
    base = t ** exponent
    return base / math.sqrt(math.log(t)) if log_correction else base
