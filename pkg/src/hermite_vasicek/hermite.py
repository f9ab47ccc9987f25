"""Sample paths of self-similar Hermite drivers.

Order q = 1 is fractional Brownian motion, synthesized exactly via
circulant embedding.  For q >= 2 the path is built from the classical
Hermite-rank construction: fGn at the auxiliary parameter h0 on an internal
refinement, mapped through the q-th (probabilists') Hermite polynomial,
partial-summed, and normalized analytically so the terminal variance is
exactly T^(2H).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn

from .errors import ConfigurationError, ParameterError
from .fgn import _check_hurst, _fgn_covariance_vec, sample_fgn
from .paths import GridSpec, SamplePath

DEFAULT_REFINEMENT = 32


@dataclass(frozen=True)
class HermiteSpec:
    """Order q and Hurst parameter H of a Hermite driver.

    The derived kernel exponent h0 = 1 + (H-1)/q lies in (1 - 1/(2q), 1);
    the normalizing constant c makes the process have unit variance at
    time 1.
    """

    q: int
    hurst: float

    def __post_init__(self):
        if not (isinstance(self.q, (int, np.integer)) and self.q >= 1):
            raise ParameterError(f"order q must be an integer >= 1, got {self.q}")
        _check_hurst(self.hurst)

    @property
    def h0(self) -> float:
        return 1.0 + (self.hurst - 1.0) / self.q

    @property
    def c(self) -> float:
        return hermite_constant(self)


def hermite_constant(spec: HermiteSpec) -> float:
    """Kernel normalization c(H, q) = sqrt(H(2H-1) / (q! beta(h0-1/2, 2-2h0)^q)).

    Satisfies c^2 q! beta^q = H(2H-1), which pins unit variance at t = 1.
    """
    H, q = spec.hurst, spec.q
    h0 = spec.h0
    b = beta_fn(h0 - 0.5, 2.0 - 2.0 * h0)
    return math.sqrt(H * (2.0 * H - 1.0) / (math.factorial(q) * b ** q))


def _rng_for(seed) -> np.random.Generator:
    # default_rng accepts ints, lists of ints, and SeedSequence alike
    return np.random.default_rng(seed)


def simulate_fbm(H: float, grid: GridSpec, seed) -> SamplePath:
    """Fractional Brownian motion on the grid, exact in law.

    Increments form a stationary Gaussian sequence with covariance
    dt^(2H) gamma(k); the path starts at 0 and is a deterministic
    function of (H, grid, seed).
    """
    _check_hurst(H)
    noise, clipped = sample_fgn(H, grid.n, _rng_for(seed))
    values = np.empty(grid.n + 1)
    values[0] = 0.0
    np.cumsum(grid.dt ** H * noise, out=values[1:])
    warn = ("circulant embedding produced negative eigenvalues; clipped",) if clipped else ()
    return SamplePath(grid=grid, values=values, warnings=warn)


def _hermite_apply(q: int, x: np.ndarray) -> np.ndarray:
    # probabilists' convention: He_1 = x, He_2 = x^2 - 1, He_3 = x^3 - 3x, ...
    if q == 1:
        return x
    if q == 2:
        return x * x - 1.0
    prev, cur = x, x * x - 1.0
    for k in range(2, q):
        prev, cur = cur, x * cur - k * prev
    return cur


@lru_cache(maxsize=32)
def _partial_sum_sd(h0: float, q: int, total: int) -> float:
    """Exact sd of sum_{i<=total} He_q(xi_i) for unit fGn xi at parameter h0."""
    rho = _fgn_covariance_vec(h0, np.arange(total))
    weights = total - np.arange(total, dtype=float)
    weights[1:] *= 2.0
    var = math.factorial(q) * float(weights @ rho ** q)
    return math.sqrt(var)


def simulate_hermite(spec: HermiteSpec, grid: GridSpec, seed,
                     refinement: int = DEFAULT_REFINEMENT) -> SamplePath:
    """One Hermite-driver path on the grid.

    For q = 1 this delegates to simulate_fbm (same seed, identical output).
    For q >= 2, fGn at parameter h0 is generated on `refinement` internal
    points per output step, mapped through He_q and partial-summed; the
    analytic normalization enforces Var(Z_T) = T^(2H) exactly at the
    terminal point.

    Parameters
    ----------
    refinement : int
        Internal points per output step; >= 2 required, default 32.
        Coarser refinement biases intermediate covariances.
    """
    if spec.q == 1:
        return simulate_fbm(spec.hurst, grid, seed)
    if refinement < 2:
        raise ConfigurationError(
            f"internal refinement {refinement} too coarse for q = {spec.q}; "
            f"use >= 2 (default {DEFAULT_REFINEMENT})")
    total = grid.n * refinement
    noise, clipped = sample_fgn(spec.h0, total, _rng_for(seed))
    sums = np.cumsum(_hermite_apply(spec.q, noise))
    scale = grid.horizon ** spec.hurst / _partial_sum_sd(spec.h0, spec.q, total)
    values = np.empty(grid.n + 1)
    values[0] = 0.0
    values[1:] = scale * sums[refinement - 1::refinement]
    warn = ("circulant embedding produced negative eigenvalues; clipped",) if clipped else ()
    return SamplePath(grid=grid, values=values, warnings=warn)
