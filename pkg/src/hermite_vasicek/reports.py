"""Figure rendering for experiment results.

Figures are drawn straight onto matplotlib Figure objects (no pyplot, no
global state) and written as PNG files next to the delimited output.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .errors import ConfigurationError
from .harness import MCResult, normalized_errors


def _new_axes(ncols: int = 1):
    fig = Figure(figsize=(6.0 * ncols, 4.2))
    axes = fig.subplots(1, ncols)
    return fig, (axes if ncols > 1 else [axes])


def _consistency_figure(result: MCResult) -> Figure:
    fig, (ax,) = _new_axes()
    t = [s.horizon for s in result.horizon_stats]
    ax.loglog(t, [s.mean_abs_err_a for s in result.horizon_stats],
              "o-", label="mean |a_hat - a|")
    ax.loglog(t, [s.mean_abs_err_b for s in result.horizon_stats],
              "s-", label="mean |b_hat - b|")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("mean absolute error")
    ax.set_title(f"consistency, q={result.config.spec.q}, "
                 f"H={result.config.spec.hurst}")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _rate_figure(result: MCResult) -> Figure:
    fig, (ax,) = _new_axes()
    t = np.array([s.horizon for s in result.horizon_stats])
    lx = np.log(t)
    for fit, sds, marker, name in (
            (result.fit_a, [s.sd_a for s in result.horizon_stats], "o", "a_hat"),
            (result.fit_b, [s.sd_b for s in result.horizon_stats], "s", "b_hat")):
        ax.plot(lx, np.log(sds), marker, label=f"{name} (slope {fit.slope:+.3f})")
        ax.plot(lx, fit.intercept + fit.slope * lx, "--", alpha=0.7)
    law = result.law
    ax.set_xlabel("log T")
    ax.set_ylabel("log sd")
    ax.set_title(f"rates, expected a: {-law.a_rate_exponent:+.3f}, "
                 f"b: {-law.b_rate_exponent:+.3f}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _distribution_figure(result: MCResult) -> Figure:
    samples = normalized_errors(result.config, result.rows, result.law)
    horizon, za, zb = samples[-1]
    two = result.ks_b is not None
    fig, axes = _new_axes(2 if two else 1)
    panels = [(axes[0], za, result.law.a_limit.sd, result.ks_a[-1], "a_hat")]
    if two:
        panels.append((axes[1], zb, result.law.b_limit.sd,
                       result.ks_b[-1], "b_hat"))
    for ax, z, sd, ks, name in panels:
        ax.hist(z, bins="auto", density=True, alpha=0.6)
        grid = np.linspace(-4.0 * sd, 4.0 * sd, 301)
        pdf = np.exp(-0.5 * (grid / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))
        ax.plot(grid, pdf, lw=2)
        ax.set_title(f"{name} at T={horizon:g}, KS={ks.statistic:.3f}")
        ax.set_xlabel("normalized error")
    return fig


def _gt_figure(result: MCResult) -> Figure:
    fig, axes = _new_axes(2)
    t = [s.horizon for s in result.horizon_stats]
    means = [s.mean_g for s in result.horizon_stats]
    ses = [s.se_mean_g for s in result.horizon_stats]
    axes[0].errorbar(t, means, yerr=[3.0 * s for s in ses], fmt="o-")
    axes[0].axhline(0.0, color="k", lw=0.8)
    axes[0].set_xscale("log")
    axes[0].set_xlabel("horizon T")
    axes[0].set_ylabel("mean")
    axes[0].set_title("sample mean with 3 se bars")
    axes[1].plot(t, [s.var_g for s in result.horizon_stats], "o-",
                 label="sample variance")
    axes[1].axhline(result.b_squared, color="r", ls="--",
                    label=f"B^2 = {result.b_squared:.4f}")
    axes[1].set_xscale("log")
    axes[1].set_xlabel("horizon T")
    axes[1].legend()
    axes[1].set_title("variance against the limit")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    return fig


_FIGURES = {
    "consistency": _consistency_figure,
    "rate": _rate_figure,
    "distribution": _distribution_figure,
    "gt-converge": _gt_figure,
}


def render_report(result: MCResult, outdir: str | Path,
                  stem: str) -> tuple[Path, ...]:
    """Write the figure for a result; returns the created file paths."""
    maker = _FIGURES.get(result.config.experiment)
    if maker is None:
        raise ConfigurationError(
            f"no report defined for experiment '{result.config.experiment}'")
    dest = Path(outdir) / f"{stem}.png"
    fig = maker(result)
    fig.set_layout_engine("tight")
    fig.savefig(dest, dpi=140)
    return (dest,)
