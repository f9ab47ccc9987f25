"""Moment estimators for the drift pair (a, b) and the tilted functional G_T.

The estimators observe one path continuously (trapezoid quadrature on the
grid): b_hat is the time average, alpha_T the centered second moment, and
a_hat inverts the stationary-variance map a -> a^(-2H) H Gamma(2H).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import ConfigurationError, DegenerateVarianceError, ParameterError
from .hermite import DEFAULT_REFINEMENT, HermiteSpec, simulate_hermite
from .paths import GridSpec, SamplePath
from .vasicek import expected_y_squared, ou_path

ALPHA_FLOOR = 1.0e-12
MIN_POINTS_PER_LAYER = 64


@dataclass(frozen=True)
class EstimateResult:
    alpha_t: float
    a_hat: float
    b_hat: float
    horizon: float


@dataclass(frozen=True)
class GTResult:
    horizon: float
    g_t: float
    spec: HermiteSpec


def integrate_path(path: SamplePath) -> float:
    """Trapezoid quadrature of the path over its grid; exact for affine values."""
    return float(np.trapezoid(path.values, dx=path.grid.dt))


def estimate(path: SamplePath, spec: HermiteSpec) -> EstimateResult:
    """Drift estimates from one observed path.

    b_hat = (1/T) int X dt; alpha_T = (1/T) int (X - b_hat)^2 dt (the centered
    form is algebraically the mean of X^2 minus b_hat^2 under the same
    quadrature weights, and better conditioned); a_hat inverts
    alpha = a^(-2H) H Gamma(2H).

    Raises DegenerateVarianceError, carrying b_hat and alpha_T, when alpha_T
    falls at or below 1e-12 * (path scale)^2 and the inversion would blow up.
    """
    T = path.grid.horizon
    H = spec.hurst
    b_hat = integrate_path(path) / T
    centered = path.values - b_hat
    alpha = float(np.trapezoid(centered * centered, dx=path.grid.dt)) / T
    scale = float(np.max(np.abs(path.values)))
    if alpha <= ALPHA_FLOOR * scale * scale or alpha <= 0.0:
        raise DegenerateVarianceError(
            f"centered second moment {alpha:.3e} is degenerate; "
            f"a_hat undefined", b_hat=b_hat, alpha_t=alpha)
    a_hat = (alpha / (H * gamma_fn(2.0 * H))) ** (-1.0 / (2.0 * H))
    return EstimateResult(alpha_t=alpha, a_hat=a_hat, b_hat=b_hat, horizon=T)


@lru_cache(maxsize=16)
def _mean_square_profile(a: float, H: float, grid: GridSpec) -> np.ndarray:
    out = expected_y_squared(a, H, grid.times)
    out.setflags(write=False)
    return out


def compute_gt(spec: HermiteSpec, T: float, inner_grid: GridSpec, seed,
               refinement: int = DEFAULT_REFINEMENT) -> GTResult:
    """One realization of the tilted quadratic functional

        G_T = T^((2/q)(1-H) + 2H) int_0^1 (U_T(t)^2 - E[U_T(t)^2]) dt,

    where U_T(t) = int_0^t e^{-T(t-u)} dZ_u on the unit interval.  Defined in
    the regime (q = 1 and H > 3/4) or q >= 2, where it converges in L^2.

    The inner grid must live on [0, 1] and resolve the kernel's 1/T
    correlation length: n >= 64 T is required.
    """
    if spec.q == 1 and spec.hurst <= 0.75:
        raise ParameterError(
            f"G_T requires (q = 1 and H > 3/4) or q >= 2; "
            f"got q = 1, H = {spec.hurst}")
    if not (np.isfinite(T) and T > 0):
        raise ParameterError(f"tilting horizon T must be > 0, got {T}")
    if abs(inner_grid.horizon - 1.0) > 1.0e-12:
        raise ConfigurationError(
            f"inner grid must span [0, 1], got horizon {inner_grid.horizon}")
    if inner_grid.n < MIN_POINTS_PER_LAYER * T:
        raise ConfigurationError(
            f"inner grid with {inner_grid.n} points cannot resolve the 1/T "
            f"boundary layer; need n >= {MIN_POINTS_PER_LAYER}*T = "
            f"{int(MIN_POINTS_PER_LAYER * T)}")
    driver = simulate_hermite(spec, inner_grid, seed, refinement=refinement)
    u = ou_path(float(T), driver)
    integrand = u.values ** 2 - _mean_square_profile(float(T), spec.hurst, inner_grid)
    theta = (2.0 / spec.q) * (1.0 - spec.hurst) + 2.0 * spec.hurst
    g_t = T ** theta * float(np.trapezoid(integrand, dx=inner_grid.dt))
    return GTResult(horizon=float(T), g_t=g_t, spec=spec)
