"""Exact fractional Gaussian noise synthesis by circulant embedding.

The length-n Toeplitz covariance of unit-variance fGn embeds in a 2n
circulant whose eigenvalues are an FFT of the first row; one FFT of
suitably weighted complex Gaussians then yields an exact sample in
O(n log n).  For fGn the embedding is nonnegative definite; negative
eigenvalues are clipped defensively and flagged.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ParameterError


def _check_hurst(H: float) -> float:
    H = float(H)
    if not (0.5 < H < 1.0):
        raise ParameterError(f"Hurst parameter must lie in (0.5, 1), got {H}")
    return H


def fgn_covariance(H: float, lag: int) -> float:
    """Autocovariance gamma(k) of unit-step, unit-variance fGn.

    gamma(k) = (|k+1|^2H + |k-1|^2H - 2|k|^2H) / 2; symmetric in the lag,
    gamma(0) = 1.
    """
    _check_hurst(H)
    k = abs(int(lag))
    return float(_fgn_covariance_vec(H, np.array([k]))[0])


def _fgn_covariance_vec(H: float, lags: np.ndarray) -> np.ndarray:
    k = np.abs(lags).astype(float)
    two_h = 2.0 * H
    return 0.5 * ((k + 1.0) ** two_h + np.abs(k - 1.0) ** two_h - 2.0 * k ** two_h)


@lru_cache(maxsize=32)
def _embedding_sqrt_eigs(H: float, n: int):
    """sqrt of circulant eigenvalues for length-n fGn; True if any were clipped."""
    gamma = _fgn_covariance_vec(H, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    clipped = bool(np.any(lam < 0))
    np.maximum(lam, 0.0, out=lam)
    root = np.sqrt(lam)
    root.setflags(write=False)
    return root, clipped


def sample_fgn(H: float, n: int, rng: np.random.Generator):
    """One exact sample of n unit-variance fGn increments.

    Returns
    -------
    x : ndarray
        n correlated standard-scale increments.
    clipped : bool
        True when the embedding needed eigenvalue clipping.
    """
    _check_hurst(H)
    if n < 1:
        raise ParameterError(f"need n >= 1 increments, got {n}")
    if n == 1:
        return rng.standard_normal(1), False
    root, clipped = _embedding_sqrt_eigs(H, n)
    m = 2 * n
    z = rng.standard_normal(m)
    w = np.empty(m, dtype=complex)
    w[0] = z[0]
    w[n] = z[1]
    half = (z[2:n + 1] + 1j * z[n + 1:m]) / np.sqrt(2.0)
    w[1:n] = half
    w[n + 1:] = np.conj(half[::-1])
    x = np.fft.fft(root * w)[:n].real / np.sqrt(m)
    return x, clipped
