"""Monte Carlo experiment harness for the drift estimators.

Every replication draws its generator from
SeedSequence([master_seed, horizon_index, replication]), tasks are keyed by
(horizon_index, replication), and rows are assembled in that key order, so a
given configuration produces byte-identical raw output regardless of the
worker count.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .asymptotics import FluctuationLaw, b_constant, fluctuation_law
from .errors import ConfigurationError, DegenerateVarianceError, ParameterError
from .estimators import compute_gt, estimate
from .hermite import DEFAULT_REFINEMENT, HermiteSpec, simulate_hermite
from .paths import GridSpec
from .stats import (LogLogFit, ks_against_gaussian, loglog_fit,
                    rate_normalizer, require_gaussian_target)
from .vasicek import VasicekParams, vasicek_path

EXPERIMENTS = ("consistency", "rate", "distribution", "gt-converge")
ESTIMATOR_COLUMNS = ("horizon", "replication", "seed",
                     "a_hat", "b_hat", "alpha_T", "excluded")
GT_COLUMNS = ("horizon", "replication", "seed", "g_t", "excluded")
EXCLUSION_WARNING_LEVEL = 0.05

# replication driver hook; tests substitute deterministic drivers here
_driver = simulate_hermite


@dataclass(frozen=True)
class MCConfig:
    spec: HermiteSpec
    params: VasicekParams
    horizons: tuple[float, ...]
    dt: float
    replications: int
    master_seed: int
    experiment: str

    def __post_init__(self) -> None:
        horizons = tuple(float(t) for t in self.horizons)
        object.__setattr__(self, "horizons", horizons)
        if len(horizons) == 0:
            raise ConfigurationError("need at least one horizon")
        if any(not (np.isfinite(t) and t > 0) for t in horizons):
            raise ConfigurationError(f"horizons must be finite and > 0: {horizons}")
        if any(b <= a for a, b in zip(horizons, horizons[1:])):
            raise ConfigurationError(
                f"horizons must be strictly increasing: {horizons}")
        if not (np.isfinite(self.dt) and 0 < self.dt <= horizons[0]):
            raise ConfigurationError(
                f"dt must lie in (0, min horizon], got {self.dt}")
        if self.replications < 2:
            raise ConfigurationError(
                f"need at least 2 replications, got {self.replications}")
        if self.master_seed < 0:
            raise ConfigurationError(
                f"master seed must be >= 0, got {self.master_seed}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(
                f"unknown experiment '{self.experiment}', "
                f"expected one of {EXPERIMENTS}")


@dataclass(frozen=True)
class EstimatorHorizonStats:
    horizon: float
    count: int
    excluded: int
    mean_a: float
    sd_a: float
    mean_abs_err_a: float
    mean_b: float
    sd_b: float
    mean_abs_err_b: float
    corr_ab: float


@dataclass(frozen=True)
class GTHorizonStats:
    horizon: float
    count: int
    mean_g: float
    se_mean_g: float
    var_g: float
    var_ratio: float
    skewness: float


@dataclass(frozen=True)
class KSOutcome:
    horizon: float
    statistic: float
    pvalue: float


@dataclass(frozen=True)
class MCResult:
    config: MCConfig
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    horizon_stats: tuple
    law: FluctuationLaw | None
    fit_a: LogLogFit | None
    fit_b: LogLogFit | None
    ks_a: tuple[KSOutcome, ...] | None
    ks_b: tuple[KSOutcome, ...] | None
    b_squared: float | None
    exclusion_fraction: float
    warnings: tuple[str, ...]
    wall_seconds: float


def replication_seed(master_seed: int, horizon_index: int,
                     replication: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, horizon_index, replication])


def _estimator_task(args) -> tuple[int, int, tuple]:
    spec, params, horizon, n, h_idx, rep, master_seed, refinement = args
    ss = replication_seed(master_seed, h_idx, rep)
    seed_id = int(ss.generate_state(1)[0])
    grid = GridSpec(horizon=horizon, n=n)
    driver = _driver(spec, grid, ss, refinement)
    path = vasicek_path(params, driver)
    try:
        res = estimate(path, spec)
        row = (float(horizon), rep, seed_id,
               float(res.a_hat), float(res.b_hat), float(res.alpha_t), 0)
    except DegenerateVarianceError as exc:
        row = (float(horizon), rep, seed_id,
               math.nan, float(exc.b_hat), float(exc.alpha_t), 1)
    return h_idx, rep, row


def _gt_task(args) -> tuple[int, int, tuple]:
    spec, horizon, n, h_idx, rep, master_seed, refinement = args
    ss = replication_seed(master_seed, h_idx, rep)
    seed_id = int(ss.generate_state(1)[0])
    grid = GridSpec(horizon=1.0, n=n)
    res = compute_gt(spec, horizon, grid, ss, refinement)
    return h_idx, rep, (float(horizon), rep, seed_id, float(res.g_t), 0)


def _map_tasks(task_fn, tasks: list, workers: int) -> list:
    if workers <= 1:
        return [task_fn(t) for t in tasks]
    import multiprocessing as mp
    chunk = max(1, len(tasks) // (4 * workers))
    with mp.Pool(processes=workers) as pool:
        return list(pool.imap_unordered(task_fn, tasks, chunksize=chunk))


def _collect(task_fn, tasks: list, workers: int) -> tuple[tuple, ...]:
    results = _map_tasks(task_fn, tasks, workers)
    results.sort(key=lambda item: (item[0], item[1]))
    return tuple(row for _, _, row in results)


def _estimator_rows(config: MCConfig, workers: int,
                    refinement: int) -> tuple[tuple, ...]:
    tasks = []
    for h_idx, horizon in enumerate(config.horizons):
        n = round(horizon / config.dt)
        if n < 2:
            raise ConfigurationError(
                f"horizon {horizon} with dt {config.dt} leaves {n} steps")
        for rep in range(config.replications):
            tasks.append((config.spec, config.params, horizon, n,
                          h_idx, rep, config.master_seed, refinement))
    return _collect(_estimator_task, tasks, workers)


def _split_by_horizon(config: MCConfig,
                      rows: tuple[tuple, ...]) -> list[tuple[float, list]]:
    r = config.replications
    return [(horizon, list(rows[i * r:(i + 1) * r]))
            for i, horizon in enumerate(config.horizons)]


def _safe_corr(x: np.ndarray, y: np.ndarray) -> float:
    if x.size < 2 or float(np.std(x)) == 0.0 or float(np.std(y)) == 0.0:
        return math.nan
    return float(np.corrcoef(x, y)[0, 1])


def _estimator_stats(config: MCConfig,
                     rows: tuple[tuple, ...]) -> tuple[EstimatorHorizonStats, ...]:
    a0, b0 = config.params.a, config.params.b
    out = []
    for horizon, chunk in _split_by_horizon(config, rows):
        arr = np.array([(c[3], c[4], c[6]) for c in chunk], dtype=float)
        keep = arr[:, 2] == 0
        a_hat, b_hat = arr[keep, 0], arr[keep, 1]
        excluded = int(np.sum(~keep))
        if a_hat.size < 2:
            raise ParameterError(
                f"horizon {horizon}: only {a_hat.size} usable replications")
        out.append(EstimatorHorizonStats(
            horizon=horizon, count=len(chunk), excluded=excluded,
            mean_a=float(np.mean(a_hat)), sd_a=float(np.std(a_hat, ddof=1)),
            mean_abs_err_a=float(np.mean(np.abs(a_hat - a0))),
            mean_b=float(np.mean(b_hat)), sd_b=float(np.std(b_hat, ddof=1)),
            mean_abs_err_b=float(np.mean(np.abs(b_hat - b0))),
            corr_ab=_safe_corr(a_hat - a0, b_hat - b0)))
    return tuple(out)


def _exclusion(rows: tuple[tuple, ...]) -> tuple[float, tuple[str, ...]]:
    fraction = float(np.mean([row[-1] for row in rows])) if rows else 0.0
    warnings = ()
    if fraction > EXCLUSION_WARNING_LEVEL:
        warnings = (f"excluded {fraction:.1%} of replications "
                    f"(degenerate sample variance), above "
                    f"{EXCLUSION_WARNING_LEVEL:.0%}",)
    return fraction, warnings


def normalized_errors(config: MCConfig, rows: tuple[tuple, ...],
                      law: FluctuationLaw) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Rate-normalized estimation errors per horizon, exclusions dropped."""
    a0, b0 = config.params.a, config.params.b
    out = []
    for horizon, chunk in _split_by_horizon(config, rows):
        arr = np.array([(c[3], c[4], c[6]) for c in chunk], dtype=float)
        keep = arr[:, 2] == 0
        za = rate_normalizer(horizon, law.a_rate_exponent,
                             law.a_rate_log_correction) * (arr[keep, 0] - a0)
        zb = horizon ** law.b_rate_exponent * (arr[keep, 1] - b0)
        out.append((horizon, za, zb))
    return out


def _require_experiment(config: MCConfig, expected: str) -> None:
    if config.experiment != expected:
        raise ConfigurationError(
            f"config experiment is '{config.experiment}', expected '{expected}'")


def run_consistency(config: MCConfig, workers: int = 1,
                    refinement: int = DEFAULT_REFINEMENT) -> MCResult:
    """Estimate on every horizon and summarize errors against the truth."""
    _require_experiment(config, "consistency")
    start = time.perf_counter()
    rows = _estimator_rows(config, workers, refinement)
    stats = _estimator_stats(config, rows)
    fraction, warnings = _exclusion(rows)
    return MCResult(config=config, columns=ESTIMATOR_COLUMNS, rows=rows,
                    horizon_stats=stats,
                    law=fluctuation_law(config.spec, config.params.a),
                    fit_a=None, fit_b=None, ks_a=None, ks_b=None,
                    b_squared=None, exclusion_fraction=fraction,
                    warnings=warnings,
                    wall_seconds=time.perf_counter() - start)


def run_rate(config: MCConfig, workers: int = 1,
             refinement: int = DEFAULT_REFINEMENT) -> MCResult:
    """Fit log spread of each estimator against log horizon."""
    _require_experiment(config, "rate")
    if len(config.horizons) < 2:
        raise ConfigurationError("rate experiment needs at least 2 horizons")
    start = time.perf_counter()
    rows = _estimator_rows(config, workers, refinement)
    stats = _estimator_stats(config, rows)
    horizons = np.array([s.horizon for s in stats])
    fit_a = loglog_fit(horizons, np.array([s.sd_a for s in stats]))
    fit_b = loglog_fit(horizons, np.array([s.sd_b for s in stats]))
    fraction, warnings = _exclusion(rows)
    return MCResult(config=config, columns=ESTIMATOR_COLUMNS, rows=rows,
                    horizon_stats=stats,
                    law=fluctuation_law(config.spec, config.params.a),
                    fit_a=fit_a, fit_b=fit_b, ks_a=None, ks_b=None,
                    b_squared=None, exclusion_fraction=fraction,
                    warnings=warnings,
                    wall_seconds=time.perf_counter() - start)


def run_distribution(config: MCConfig, workers: int = 1,
                     refinement: int = DEFAULT_REFINEMENT) -> MCResult:
    """Compare rate-normalized errors against the Gaussian limit by KS.

    Only Gaussian limit components admit a closed-form CDF; a non-Gaussian
    a-limit makes the whole experiment unsupported, and a non-Gaussian
    b-limit (q >= 2) skips the b-side comparison.
    """
    _require_experiment(config, "distribution")
    law = fluctuation_law(config.spec, config.params.a)
    require_gaussian_target(law.a_limit.kind)
    start = time.perf_counter()
    rows = _estimator_rows(config, workers, refinement)
    stats = _estimator_stats(config, rows)
    ks_a, ks_b = [], []
    for horizon, za, zb in normalized_errors(config, rows, law):
        stat, pval = ks_against_gaussian(za, law.a_limit.sd)
        ks_a.append(KSOutcome(horizon, stat, pval))
        if law.b_limit.kind == "gaussian":
            stat, pval = ks_against_gaussian(zb, law.b_limit.sd)
            ks_b.append(KSOutcome(horizon, stat, pval))
    fraction, warnings = _exclusion(rows)
    return MCResult(config=config, columns=ESTIMATOR_COLUMNS, rows=rows,
                    horizon_stats=stats, law=law, fit_a=None, fit_b=None,
                    ks_a=tuple(ks_a), ks_b=tuple(ks_b) if ks_b else None,
                    b_squared=None, exclusion_fraction=fraction,
                    warnings=warnings,
                    wall_seconds=time.perf_counter() - start)


def run_gt_converge(config: MCConfig, workers: int = 1,
                    refinement: int = DEFAULT_REFINEMENT) -> MCResult:
    """Sample the normalized integrated square at each horizon.

    The driver lives on [0, 1] with n = round(1 / dt) cells, so dt must be
    at most 1 / (64 * max horizon).
    """
    _require_experiment(config, "gt-converge")
    n = round(1.0 / config.dt)
    if n < 64 * max(config.horizons):
        raise ConfigurationError(
            f"dt {config.dt} gives {n} driver cells, below 64 per unit "
            f"horizon for T = {max(config.horizons)}")
    start = time.perf_counter()
    tasks = []
    for h_idx, horizon in enumerate(config.horizons):
        for rep in range(config.replications):
            tasks.append((config.spec, horizon, n, h_idx, rep,
                          config.master_seed, refinement))
    rows = _collect(_gt_task, tasks, workers)
    bsq = b_constant(config.spec) ** 2
    stats = []
    for horizon, chunk in _split_by_horizon(config, rows):
        g = np.array([c[3] for c in chunk], dtype=float)
        var = float(np.var(g, ddof=1))
        mean = float(np.mean(g))
        sd = math.sqrt(var)
        m3 = float(np.mean((g - mean) ** 3))
        stats.append(GTHorizonStats(
            horizon=horizon, count=g.size, mean_g=mean,
            se_mean_g=sd / math.sqrt(g.size), var_g=var,
            var_ratio=var / bsq, skewness=m3 / sd ** 3))
    fraction, warnings = _exclusion(rows)
    return MCResult(config=config, columns=GT_COLUMNS, rows=rows,
                    horizon_stats=tuple(stats), law=None,
                    fit_a=None, fit_b=None, ks_a=None, ks_b=None,
                    b_squared=bsq, exclusion_fraction=fraction,
                    warnings=warnings,
                    wall_seconds=time.perf_counter() - start)


_RUNNERS = {
    "consistency": run_consistency,
    "rate": run_rate,
    "distribution": run_distribution,
    "gt-converge": run_gt_converge,
}


def run_experiment(config: MCConfig, workers: int = 1,
                   refinement: int = DEFAULT_REFINEMENT) -> MCResult:
    return _RUNNERS[config.experiment](config, workers, refinement)
