"""Limit-theorem constants and the fluctuation case split.

The a-estimator's Gaussian-regime standard deviation involves

    sigma_H = H(2H-1) sqrt( 2 * int_R f(x)^2 dx ),
    f(x)    = int int_{R+^2} e^{-(u+v)} |u - v - x|^(2H-2) du dv
            = (1/2) int_R e^{-|w|} |w - x|^(2H-2) dw,

finite for 1/2 < H < 3/4.  Two independent quadrature routes are provided:
a reduced one working from the 1-D w-integral, and a brute-force one that
integrates the (u, v) square directly; both share the outer x-mesh and the
same tail cutoffs so they disagree only through the inner quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import NumericalError, ParameterError
from .fgn import _check_hurst
from .hermite import HermiteSpec
from .quadrature import gauss_panels, geometric_edges, integrate_power

EXP_CUTOFF = 60.0
TAIL_DENSITY_CUT = 1.0e-12
HEAD = 1.0e-9


def _smooth_mesh(refine: int = 0):
    """Panels on [HEAD, EXP_CUTOFF] graded toward 0.

    The [0, HEAD] cell is handled analytically by the callers: Gauss error
    on a panel touching a power singularity does not decay with panel size.
    """
    edges = geometric_edges(HEAD, EXP_CUTOFF, ratio=2.0 ** (1.0 / (1 + refine)))
    return gauss_panels(edges, nodes=8 * (1 + refine))


def _x_cutoff(H: float) -> float:
    # outer integrand f(x)^2 ~ x^(4H-4); cut where it falls below 1e-12
    return TAIL_DENSITY_CUT ** (1.0 / (4.0 * H - 4.0))


def _outer_mesh(H: float, refine: int = 0):
    """x-mesh for int_0^cut f(x)^2 dx, graded at the x = 0 kink."""
    cut = _x_cutoff(H)
    ratio = 2.0 ** (1.0 / (1 + refine))
    edges = np.concatenate([[0.0], geometric_edges(1.0e-6, cut, ratio=ratio)])
    return gauss_panels(edges, nodes=10 * (1 + refine))


def _f_reduced(H: float, x: np.ndarray, refine: int = 0) -> np.ndarray:
    """f(x) for x >= 0 from the 1-D w-integral, split at w = 0 and w = x."""
    s = 2.0 * H - 1.0
    g = 2.0 * H - 2.0
    sx, sw = _smooth_mesh(refine)
    out = np.empty(x.shape)
    near = x <= EXP_CUTOFF
    if np.any(near):
        xn = x[near]
        # w < 0: smooth after folding the sign, graded toward w = 0; the
        # head cell is the exact power mass (e^{-s} = 1 there to 1e-9)
        head = ((xn + HEAD) ** s - xn ** s) / s
        left = head + (np.exp(-sx[None, :]) * (xn[:, None] + sx[None, :]) ** g) @ sw
        # 0 < w < x: e^{-x} int_0^x v^(s-1) e^v dv, graded toward w = x
        mid = np.exp(-xn) * integrate_power(np.exp, s, xn,
                                            panels=28 + 8 * refine, nodes=10 + 4 * refine)
        # w > x: e^{-x} int_0^inf v^(s-1) e^-v dv, graded toward w = x
        right = np.exp(-xn) * integrate_power(lambda v: np.exp(-v), s, EXP_CUTOFF,
                                              panels=28 + 8 * refine, nodes=10 + 4 * refine)
        out[near] = 0.5 * (left + mid + right)
    far = ~near
    if np.any(far):
        xf = x[far][:, None]
        both = (xf + sx[None, :]) ** g + (xf - sx[None, :]) ** g
        out[far] = 0.5 * ((np.exp(-sx[None, :]) * both) @ sw)
    return out


def _f_brute(H: float, x: np.ndarray, refine: int = 0) -> np.ndarray:
    """f(x) for x >= 0 by nested (u, v) quadrature over the truncated square.

    Inner u-integral for fixed v: singular at u = v + x when that lies inside
    the window, handled by power-graded halves; the outer v-integral sees a
    smooth profile.
    """
    s = 2.0 * H - 1.0
    g = 2.0 * H - 2.0
    panels = 16 + 4 * refine
    nodes = 8 + 2 * refine
    vx, vw = gauss_panels(np.concatenate([[0.0],
                                          geometric_edges(1.0e-6, EXP_CUTOFF,
                                                          ratio=2.0 ** (1.0 / (1 + refine)))]),
                          nodes=nodes)
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        c = vx + xi                     # singular u per v-node
        inside = c < EXP_CUTOFF
        inner = np.empty(vx.shape)
        if np.any(inside):
            ci = c[inside]
            below = np.exp(-ci) * integrate_power(np.exp, s, ci,
                                                  panels=panels, nodes=nodes)
            above = np.exp(-ci) * integrate_power(lambda t: np.exp(-t), s,
                                                  EXP_CUTOFF - ci,
                                                  panels=panels, nodes=nodes)
            inner[inside] = below + above
        if np.any(~inside):
            co = c[~inside]
            ux, uw = gauss_panels(EXP_CUTOFF - np.concatenate(
                [[0.0], geometric_edges(1.0e-6, EXP_CUTOFF,
                                        ratio=2.0 ** (1.0 / (1 + refine)))])[::-1],
                nodes=nodes)
            inner[~inside] = ((co[:, None] - ux[None, :]) ** g
                              * np.exp(-ux[None, :])) @ uw
        out[i] = float((np.exp(-vx) * inner) @ vw)
    return out


def f_closed_form(H: float, x) -> float | np.ndarray:
    """Reference evaluation of f(x) through incomplete-gamma identities.

    f(x) = (1/2)[e^x Gamma_upper(2H-1, x) + e^{-x}(M(x) + Gamma(2H-1))] for
    0 <= x <= 60, with M(x) = int_0^x v^(2H-2) e^v dv; beyond that an
    asymptotic expansion in x^-2.  Used as an oracle for the quadrature
    routes.
    """
    from scipy.special import gammaincc
    from .vasicek import _exp_series
    _check_hurst(H)
    s = 2.0 * H - 1.0
    g = 2.0 * H - 2.0
    x_arr = np.atleast_1d(np.abs(np.asarray(x, dtype=float)))
    out = np.empty(x_arr.shape)
    near = x_arr <= EXP_CUTOFF
    if np.any(near):
        xn = x_arr[near]
        upper = gammaincc(s, xn) * gamma_fn(s)
        out[near] = 0.5 * (np.exp(xn) * upper
                           + np.exp(-xn) * (_exp_series(xn, s) + gamma_fn(s)))
    if np.any(~near):
        xf = x_arr[~near]
        c2 = g * (g - 1.0)
        c4 = g * (g - 1.0) * (g - 2.0) * (g - 3.0)
        out[~near] = xf ** g * (1.0 + c2 / xf ** 2 + c4 / (2.0 * xf ** 4))
    return float(out[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def _sigma_from_f(H: float, f_vals: np.ndarray, xw: np.ndarray) -> float:
    i2 = 2.0 * float((f_vals * f_vals) @ xw)
    return H * (2.0 * H - 1.0) * math.sqrt(2.0 * i2)


@lru_cache(maxsize=32)
def sigma_h(H: float, refine: int = 0) -> float:
    """Gaussian-case scale constant, reduced-quadrature route.

    Defined for 1/2 < H < 3/4 (the integral diverges at H = 3/4).  `refine`
    doubles the mesh density per unit; the value moves by less than 1e-4
    between successive refinements at the default resolution.
    """
    _check_hurst(H)
    if H >= 0.75:
        raise ParameterError(
            f"sigma_h is finite only for H < 3/4, got H = {H}")
    xx, xw = _outer_mesh(H, refine)
    val = _sigma_from_f(H, _f_reduced(H, xx, refine), xw)
    if not (np.isfinite(val) and val > 0):
        raise NumericalError(f"sigma_h quadrature failed at H = {H}: {val}")
    return val


@lru_cache(maxsize=8)
def sigma_h_bruteforce(H: float, refine: int = 0) -> float:
    """Independent check route: 2-D inner quadrature, same outer mesh/cuts."""
    _check_hurst(H)
    if H >= 0.75:
        raise ParameterError(
            f"sigma_h is finite only for H < 3/4, got H = {H}")
    xx, xw = _outer_mesh(H, refine)
    return _sigma_from_f(H, _f_brute(H, xx, refine), xw)


def b_constant(spec: HermiteSpec) -> float:
    """Scale constant mapping the G-limit to a unit Rosenblatt variable.

    B = H(2H-1)/sqrt((h0 - 1/2)(4 h0 - 3)) * Gamma(e)/(e - 1) with
    e = 2H + (2/q)(1-H).  Defined when 4 h0 - 3 > 0, i.e. q >= 2 or
    (q = 1 and H > 3/4).
    """
    H, q = spec.hurst, spec.q
    h0 = spec.h0
    if 4.0 * h0 - 3.0 <= 0.0:
        raise ParameterError(
            f"B is defined only for 4*h0 - 3 > 0 (q >= 2, or q = 1 with "
            f"H > 3/4); got q = {q}, H = {H}")
    e = 2.0 * H + (2.0 / q) * (1.0 - H)
    return (H * (2.0 * H - 1.0) / math.sqrt((h0 - 0.5) * (4.0 * h0 - 3.0))
            * gamma_fn(e) / (e - 1.0))


@dataclass(frozen=True)
class LimitLaw:
    """Distributional descriptor of one fluctuation component.

    kind 'gaussian' carries sd; kinds 'rosenblatt' and 'hermite' carry a
    positive scale, the self-similarity parameter(s), and `negated` when the
    anchor expression enters with a minus sign.  `centered_squared_correction`
    flags the additional -(driver at time 1)^2 term inside the supercritical
    a-limit.
    """

    kind: str
    sd: float | None = None
    scale: float | None = None
    hurst: float | None = None
    order: int | None = None
    negated: bool = False
    centered_squared_correction: bool = False


@dataclass(frozen=True)
class FluctuationLaw:
    case_id: str
    a_rate_exponent: float
    a_rate_log_correction: bool
    b_rate_exponent: float
    a_limit: LimitLaw
    b_limit: LimitLaw
    components_independent: bool


def fluctuation_law(spec: HermiteSpec, a: float) -> FluctuationLaw:
    """Asymptotic rates and limit descriptors for the drift estimators.

    Case split on (q, H): Gaussian driver below/at/above H = 3/4, and the
    Hermite-driven regime for q >= 2.  The b-component obeys
    T^(1-H)(b_hat - b) -> Z_1/a in every case; the critical a-component
    carries a sqrt(T/log T) normalizer (natural log) with the literal scale
    (3/4) sqrt(a/pi).
    """
    if not (np.isfinite(a) and a > 0):
        raise ParameterError(f"rate a must be > 0, got {a}")
    H, q = spec.hurst, spec.q
    denom = 2.0 * H * H * gamma_fn(2.0 * H)
    if q == 1:
        b_lim = LimitLaw(kind="gaussian", sd=1.0 / a)
        if H < 0.75:
            return FluctuationLaw(
                case_id="GaussianSubcritical",
                a_rate_exponent=0.5, a_rate_log_correction=False,
                b_rate_exponent=1.0 - H,
                a_limit=LimitLaw(kind="gaussian",
                                 sd=a ** (1.0 + 4.0 * H) * sigma_h(H) / denom,
                                 negated=True),
                b_limit=b_lim, components_independent=True)
        if H == 0.75:
            return FluctuationLaw(
                case_id="GaussianCritical",
                a_rate_exponent=0.5, a_rate_log_correction=True,
                b_rate_exponent=0.25,
                a_limit=LimitLaw(kind="gaussian",
                                 sd=0.75 * math.sqrt(a / math.pi)),
                b_limit=b_lim, components_independent=True)
        return FluctuationLaw(
            case_id="GaussianSupercritical",
            a_rate_exponent=2.0 * (1.0 - H), a_rate_log_correction=False,
            b_rate_exponent=1.0 - H,
            a_limit=LimitLaw(kind="rosenblatt",
                             scale=a ** (2.0 * H - 1.0) * b_constant(spec) / denom,
                             hurst=2.0 * H - 1.0, order=2, negated=True,
                             centered_squared_correction=True),
            b_limit=b_lim, components_independent=False)
    rate = (2.0 / q) * (1.0 - H)
    return FluctuationLaw(
        case_id="HermiteDriven",
        a_rate_exponent=rate, a_rate_log_correction=False,
        b_rate_exponent=1.0 - H,
        a_limit=LimitLaw(kind="rosenblatt",
                         scale=a ** (1.0 - rate) * b_constant(spec) / denom,
                         hurst=1.0 - rate, order=2, negated=True),
        b_limit=LimitLaw(kind="hermite", scale=1.0 / a, hurst=H, order=q),
        components_independent=False)
