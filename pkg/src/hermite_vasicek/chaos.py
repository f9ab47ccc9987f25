"""Brute-force double Wiener-Ito oracle for the order-2 driver.

Independent of the Hermite-rank construction: the time axis is cut into
cells, the chaos kernel K(x1, x2) = c * integral_0^t (s-x1)_+^p (s-x2)_+^p ds
with p = h0 - 3/2 is integrated exactly in s per cell pair, and the order-2
integral is realized as the off-diagonal quadratic form sum K_ij W_i W_j in
independent Gaussian cell increments W_i ~ N(0, width_i).  O(cells^2) work;
meant for cross-validation at modest sizes, not production sampling.
"""
from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import beta as beta_fn, hyp2f1

from .errors import ParameterError
from .fgn import _check_hurst
from .hermite import HermiteSpec, hermite_constant

TAIL_FACTOR = 1.0e7
TAIL_RATIO = 1.25
_ROW_BLOCK = 512


@lru_cache(maxsize=8)
def _phi_table(H: float):
    """Cumulative kernel integral Phi(z) = integral_0^z y^p (1+y)^p dy.

    Tabulated once per H on a log grid with series branches outside it;
    Phi(inf) = beta(p+1, -2p-1).
    """
    p = (H - 2.0) / 2.0
    z = np.logspace(-6.0, 7.0, 6501)
    mid = z ** (p + 1.0) / (p + 1.0) * hyp2f1(p + 1.0, -p, p + 2.0, -z)
    interp = PchipInterpolator(np.log(z), mid, extrapolate=False)
    phi_inf = beta_fn(p + 1.0, -2.0 * p - 1.0)
    return p, interp, phi_inf


def _phi(H: float, z: np.ndarray) -> np.ndarray:
    p, interp, phi_inf = _phi_table(H)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    lo = z < 1.0e-6
    hi = z > 1.0e7
    if np.any(lo):
        zl = z[lo]
        out[lo] = zl ** (p + 1.0) / (p + 1.0) + p * zl ** (p + 2.0) / (p + 2.0)
    if np.any(hi):
        zh = z[hi]
        out[hi] = phi_inf - (zh ** (2.0 * p + 1.0) / (-2.0 * p - 1.0)
                             + p * zh ** (2.0 * p) / (-2.0 * p))
    rest = ~(lo | hi)
    if np.any(rest):
        out[rest] = interp(np.log(z[rest]))
    return out


@dataclass(frozen=True)
class _OracleData:
    centers: np.ndarray
    widths: np.ndarray
    kernel: np.ndarray
    variance: float
    warnings: tuple


def _cells(t: float, grid_cells: int, tail_factor: float):
    """Uniform cells on [0, t] plus a geometric tail down to -tail_factor*t."""
    dx = t / grid_cells
    core_centers = dx * (np.arange(grid_cells) + 0.5)
    core_widths = np.full(grid_cells, dx)
    tail_widths = [dx]
    while sum(tail_widths) < tail_factor * t:
        tail_widths.append(tail_widths[-1] * TAIL_RATIO)
    tail_widths = np.array(tail_widths[::-1])
    edges = -np.concatenate([[0.0], np.cumsum(tail_widths[::-1])])[::-1]
    tail_centers = (edges[:-1] + edges[1:]) / 2.0
    centers = np.concatenate([tail_centers, core_centers])
    widths = np.concatenate([tail_widths, core_widths])
    return centers, widths


@lru_cache(maxsize=4)
def _oracle_data(H: float, t: float, grid_cells: int, tail_factor: float) -> _OracleData:
    p, _, _ = _phi_table(H)
    c = hermite_constant(HermiteSpec(q=2, hurst=H))
    centers, widths = _cells(t, grid_cells, tail_factor)
    n = centers.size
    kernel = np.empty((n, n))
    var2 = 0.0
    row_var = np.empty(n)
    for start in range(0, n, _ROW_BLOCK):
        rows = slice(start, min(start + _ROW_BLOCK, n))
        xi = centers[rows][:, None]
        xj = centers[None, :]
        hi = np.maximum(xi, xj)
        delta = np.abs(xi - xj)
        np.fill_diagonal(delta[:, rows], 1.0)
        z1 = (t - hi) / delta
        z0 = np.maximum(0.0, -hi) / delta
        block = c * delta ** (2.0 * p + 1.0) * (_phi(H, z1) - _phi(H, z0))
        np.fill_diagonal(block[:, rows], 0.0)
        kernel[rows] = block
        row_var[rows] = 2.0 * widths[rows] * (block ** 2 @ widths)
    var2 = float(row_var.sum())
    warns = []
    outer = centers < -0.5 * tail_factor * t
    if row_var[outer].sum() > 1.0e-3 * t ** (2.0 * H):
        warns.append("kernel truncation window too small; variance still "
                     "accumulating at the far end of the tail")
    return _OracleData(centers=centers, widths=widths, kernel=kernel,
                       variance=var2, warnings=tuple(warns))


def _evaluate(data: _OracleData, draws: np.ndarray) -> np.ndarray:
    """Quadratic form values for standard-normal draws, one column each."""
    w = np.sqrt(data.widths)[:, None] * draws
    return np.einsum("ij,ij->j", w, data.kernel @ w)


def _checked_data(H: float, t: float, grid_cells: int,
                  tail_factor: float) -> _OracleData:
    data = _oracle_data(H, float(t), int(grid_cells), float(tail_factor))
    for message in data.warnings:
        _warnings.warn(message, RuntimeWarning, stacklevel=3)
    return data


def chaos_oracle_variance(H: float, t: float, grid_cells: int,
                          tail_factor: float = TAIL_FACTOR) -> float:
    """Exact variance of the discretized quadratic form, 2 sum K_ij^2 w_i w_j.

    Converges to t^(2H) as grid_cells grows; the gap is the discretization
    deficit (dropped diagonal band plus tail truncation), free of MC noise.
    Emits a RuntimeWarning when the truncation window is too small for the
    requested accuracy.
    """
    _check_hurst(H)
    return _checked_data(H, t, grid_cells, tail_factor).variance


def chaos_oracle_q2(H: float, t: float, grid_cells: int, seed,
                    tail_factor: float = TAIL_FACTOR) -> float:
    """One realization of the discretized order-2 Wiener-Ito integral.

    Across seeds the sample variance approaches t^(2H) as grid_cells grows.
    The kernel matrix is cached per (H, t, grid_cells, tail_factor), so
    repeated calls at fixed geometry cost one matrix-vector product each.
    """
    return float(chaos_oracle_q2_batch(H, t, grid_cells, [seed],
                                       tail_factor=tail_factor)[0])


def chaos_oracle_q2_batch(H: float, t: float, grid_cells: int, seeds,
                          tail_factor: float = TAIL_FACTOR) -> np.ndarray:
    """Vectorized oracle evaluation, one independent realization per seed."""
    _check_hurst(H)
    if grid_cells < 8:
        raise ParameterError(f"grid_cells must be >= 8, got {grid_cells}")
    data = _checked_data(H, t, grid_cells, tail_factor)
    seeds = list(seeds)
    n = data.centers.size
    out = np.empty(len(seeds))
    block = max(1, (1 << 23) // n)
    for start in range(0, len(seeds), block):
        chunk = seeds[start:start + block]
        draws = np.column_stack([
            np.random.default_rng(s).standard_normal(n) for s in chunk])
        out[start:start + len(chunk)] = _evaluate(data, draws)
    return out
