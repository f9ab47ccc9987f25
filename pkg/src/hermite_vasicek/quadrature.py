"""Quadrature rules for integrands with an algebraic endpoint singularity.

The kernels in this package all reduce to integrals of the form

    int_0^L w^(s-1) g(w) dw,   0 < s < 1,  g smooth,

whose w^(s-1) factor defeats uniform rules.  The rule built here grades
geometrically toward w = 0 (Gauss-Legendre on dyadic panels) and closes the
last sliver with a Gauss-Jacobi rule that carries the w^(s-1) weight exactly,
so the overall error is driven by the smooth factor only.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@lru_cache(maxsize=256)
def _legendre(nodes: int):
    x, w = roots_legendre(nodes)
    return x, w


def gauss_panels(edges, nodes: int = 12):
    """Composite Gauss-Legendre nodes/weights over consecutive panels.

    Parameters
    ----------
    edges : array_like
        Ascending panel edges, length >= 2.
    nodes : int
        Gauss-Legendre points per panel.

    Returns
    -------
    x, w : ndarray
        Flattened nodes and weights; sum(w * f(x)) approximates the integral.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = _legendre(nodes)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def geometric_edges(a: float, b: float, ratio: float = 2.0) -> np.ndarray:
    """Panel edges from a to b with widths growing by `ratio` (a > 0)."""
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    out = [a]
    width = a * (ratio - 1.0)
    while out[-1] + width < b:
        out.append(out[-1] + width)
        width *= ratio
    out.append(b)
    return np.asarray(out)


@lru_cache(maxsize=64)
def power_rule(s: float, panels: int = 28, nodes: int = 10, cap_nodes: int = 24):
    """Nodes/weights on (0, 1] such that sum(w * g(u)) = int_0^1 u^(s-1) g(u) du.

    Dyadic panels [2^-(k+1), 2^-k] carry Gauss-Legendre with the u^(s-1)
    factor folded into the weights; the remaining [0, 2^-panels] sliver uses
    Gauss-Jacobi with weight u^(s-1), which integrates the singularity
    exactly.  Rescale by L^s and evaluate g at L*u for other upper limits.
    """
    if not (0 < s <= 1):
        raise ValueError(f"power exponent s must lie in (0, 1], got {s}")
    xs, ws = [], []
    gl_x, gl_w = _legendre(nodes)
    hi = 1.0
    for _ in range(panels):
        lo = hi / 2
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        u = mid + half * gl_x
        xs.append(u)
        ws.append(half * gl_w * u ** (s - 1.0))
        hi = lo
    # Jacobi cap on [0, hi]: weight (1+t)^(s-1) on [-1,1], u = hi*(1+t)/2
    jx, jw = roots_jacobi(cap_nodes, 0.0, s - 1.0)
    xs.append(hi * (1.0 + jx) / 2.0)
    ws.append(jw * (hi / 2.0) ** s)
    x = np.concatenate(xs)[::-1].copy()
    w = np.concatenate(ws)[::-1].copy()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate_power(g, s: float, L, panels: int = 28, nodes: int = 10):
    """int_0^L w^(s-1) g(w) dw for scalar or array upper limits L.

    Vectorized over L: evaluates g on an outer product grid, so g must
    broadcast.  L = 0 contributes 0.
    """
    u, w = power_rule(s, panels=panels, nodes=nodes)
    L = np.asarray(L, dtype=float)
    scalar = L.ndim == 0
    Lc = np.atleast_1d(L)
    vals = np.zeros(Lc.shape)
    pos = Lc > 0
    if np.any(pos):
        Lp = Lc[pos]
        nodes_2d = Lp[:, None] * u[None, :]
        vals[pos] = Lp ** s * (g(nodes_2d) @ w)
    return float(vals[0]) if scalar else vals
