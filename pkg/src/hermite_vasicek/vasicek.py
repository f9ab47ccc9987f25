"""Mean-reverting state paths driven by a rough path, and their moments.

The state solves dX = a(b - X)dt + dZ pathwise; on a grid the drift is
integrated exactly and the driver increment enters with a midpoint weight,
X_{k+1} = e^{-a dt} X_k + b(1 - e^{-a dt}) + e^{-a dt/2} (Z_{k+1} - Z_k),
which halves the step bias relative to left/right weights at no cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter
from scipy.special import gamma as gamma_fn, gammainc

from .errors import NumericalError, ParameterError
from .fgn import _check_hurst
from .paths import SamplePath

_SERIES_CUTOFF = 50.0


@dataclass(frozen=True)
class VasicekParams:
    """Mean-reversion rate a (> 0, 1/time) and long-run level b."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise ParameterError(f"mean-reversion rate a must be > 0, got {self.a}")
        if not np.isfinite(self.b):
            raise ParameterError(f"long-run level b must be finite, got {self.b}")


def vasicek_path(params: VasicekParams, driver: SamplePath) -> SamplePath:
    """State path X on the driver's grid, X_0 = 0, exact-in-drift recursion."""
    if driver.values[0] != 0.0:
        raise ParameterError("driver path must start at 0")
    dt = driver.grid.dt
    decay = math.exp(-params.a * dt)
    forcing = params.b * (1.0 - decay) + math.exp(-params.a * dt / 2.0) * driver.increments
    values = np.empty(driver.grid.n + 1)
    values[0] = 0.0
    values[1:] = lfilter([1.0], [1.0, -decay], forcing)
    return SamplePath(grid=driver.grid, values=values, warnings=driver.warnings)


def ou_path(a: float, driver: SamplePath) -> SamplePath:
    """Stochastic convolution Y_t = int_0^t e^{-a(t-u)} dZ_u; b = 0 state path."""
    return vasicek_path(VasicekParams(a=a, b=0.0), driver)


def _exp_series(x: np.ndarray, s: float) -> np.ndarray:
    """sum_k x^(s+k) / (k! (s+k)) = int_0^x v^(s-1) e^v dv, for x <= ~50."""
    out = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(400):
        out += term / (s + k)
        term *= x / (k + 1)
        if np.all(term / (s + k + 1) <= 1.0e-17 * np.maximum(out, 1.0)):
            return x ** s * out
    raise NumericalError(f"series for the exponential moment integral did not "
                         f"converge at x = {np.max(x):.3g}")


def expected_y_squared(a: float, H: float, t) -> float | np.ndarray:
    """Second moment E[Y_t^2] of the stochastic convolution at rate a.

    Equals H(2H-1) int int_{[0,t]^2} e^{-a(u+v)} |u-v|^(2H-2) du dv, reduced
    exactly to incomplete-gamma form: with x = a t,

        a^(2H) E[Y_t^2] / (H(2H-1)) = gamma_lower(2H-1, x) - e^(-2x) M(x),
        M(x) = int_0^x v^(2H-2) e^v dv.

    Accepts scalar or array t; t = inf returns the stationary value
    a^(-2H) H Gamma(2H).  Monotone nondecreasing in t.
    """
    _check_hurst(H)
    if not (np.isfinite(a) and a > 0):
        raise ParameterError(f"rate a must be > 0, got {a}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr[np.isfinite(t_arr)] < 0):
        raise ParameterError("time t must be >= 0")
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    s = 2.0 * H - 1.0
    out = np.empty(t_arr.shape)
    inf = np.isinf(t_arr)
    out[inf] = H * gamma_fn(2.0 * H)
    x = a * t_arr[~inf]
    lower = gammainc(s, x) * gamma_fn(s)
    correction = np.zeros_like(x)
    small = x <= _SERIES_CUTOFF
    if np.any(small):
        xs = x[small]
        correction[small] = np.exp(-2.0 * xs) * _exp_series(xs, s)
    out[~inf] = H * s * (lower - correction)
    out *= a ** (-2.0 * H)
    return float(out[0]) if scalar else out
