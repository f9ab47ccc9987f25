"""Experiment harness: seeding, determinism, exclusions, and summaries."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

import hermite_vasicek.harness as harness
from hermite_vasicek.errors import (ConfigurationError,
                                    DegenerateVarianceError,
                                    UnsupportedDistributionTargetError)
from hermite_vasicek.asymptotics import b_constant
from hermite_vasicek.harness import (MCConfig, normalized_errors,
                                     run_consistency, run_distribution,
                                     run_experiment, run_gt_converge,
                                     run_rate)
from hermite_vasicek.hermite import HermiteSpec
from hermite_vasicek.paths import SamplePath
from hermite_vasicek.stats import rate_normalizer
from hermite_vasicek.vasicek import VasicekParams

SPEC1 = HermiteSpec(q=1, hurst=0.6)
PARAMS = VasicekParams(a=1.0, b=2.0)


def _config(experiment, spec=SPEC1, horizons=(5.0, 10.0), dt=0.1,
            replications=10, master_seed=7):
    return MCConfig(spec=spec, params=PARAMS, horizons=horizons, dt=dt,
                    replications=replications, master_seed=master_seed,
                    experiment=experiment)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        _config("consistency", horizons=())
    with pytest.raises(ConfigurationError):
        _config("consistency", horizons=(10.0, 5.0))
    with pytest.raises(ConfigurationError):
        _config("consistency", horizons=(5.0, 5.0))
    with pytest.raises(ConfigurationError):
        _config("consistency", dt=6.0)
    with pytest.raises(ConfigurationError):
        _config("consistency", replications=1)
    with pytest.raises(ConfigurationError):
        _config("bogus")
    with pytest.raises(ConfigurationError):
        _config("consistency", master_seed=-1)


def test_experiment_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        run_rate(_config("consistency"))


def test_rows_follow_schema_and_reproduce():
    cfg = _config("consistency")
    r1 = run_consistency(cfg)
    r2 = run_consistency(cfg)
    assert r1.columns == ("horizon", "replication", "seed",
                          "a_hat", "b_hat", "alpha_T", "excluded")
    assert len(r1.rows) == 20
    assert r1.rows == r2.rows
    assert r1.rows[0][0] == 5.0 and r1.rows[-1][0] == 10.0


def test_workers_do_not_change_rows():
    cfg = _config("consistency", replications=6)
    assert run_consistency(cfg).rows == run_consistency(cfg, workers=2).rows


def test_master_seed_changes_rows():
    a = run_consistency(_config("consistency", master_seed=1)).rows
    b = run_consistency(_config("consistency", master_seed=2)).rows
    assert a != b


def test_replications_are_independent_across_horizons():
    # same replication index at different horizons must see different noise
    rows = run_consistency(_config("consistency")).rows
    first, second = rows[0], rows[10]
    assert first[2] != second[2]


def test_stats_are_a_pure_function_of_rows():
    cfg = _config("consistency")
    res = run_consistency(cfg)
    again = harness._estimator_stats(cfg, res.rows)
    assert again == res.horizon_stats


def test_zero_driver_gives_deterministic_estimates(monkeypatch):
    def zero_driver(spec, grid, seed, refinement):
        return SamplePath(grid=grid, values=np.zeros(grid.n + 1))

    monkeypatch.setattr(harness, "_driver", zero_driver)
    res = run_consistency(_config("consistency", replications=3))
    for s in res.horizon_stats:
        assert s.sd_a <= 1e-12 and s.sd_b <= 1e-12
        assert np.isnan(s.corr_ab)
    assert res.exclusion_fraction == 0.0


def test_exclusions_counted_and_warned(monkeypatch):
    real = harness.estimate

    def flaky(path, spec):
        drift = PARAMS.b * (1.0 - np.exp(-PARAMS.a * path.grid.horizon))
        if path.values[-1] > drift:
            raise DegenerateVarianceError("forced", b_hat=0.0, alpha_t=0.0)
        return real(path, spec)

    monkeypatch.setattr(harness, "estimate", flaky)
    res = run_consistency(_config("consistency", replications=40))
    excluded = sum(row[-1] for row in res.rows)
    assert excluded > 0
    assert res.exclusion_fraction == excluded / len(res.rows)
    assert res.warnings  # well above the 5% accounting level
    nan_rows = [row for row in res.rows if row[-1] == 1]
    assert all(np.isnan(row[3]) for row in nan_rows)


def test_normalized_errors_drop_exclusions():
    cfg = _config("distribution", horizons=(8.0,), replications=4)
    law = harness.fluctuation_law(cfg.spec, cfg.params.a)
    rows = ((8.0, 0, 1, 1.5, 2.5, 0.3, 0),
            (8.0, 1, 2, float("nan"), 2.0, 0.0, 1),
            (8.0, 2, 3, 0.5, 1.5, 0.3, 0),
            (8.0, 3, 4, 1.0, 2.0, 0.3, 0))
    (horizon, za, zb), = normalized_errors(cfg, rows, law)
    assert za.shape == (3,)
    assert_allclose(za, np.sqrt(8.0) * np.array([0.5, -0.5, 0.0]))
    assert_allclose(zb, 8.0 ** 0.4 * np.array([0.5, -0.5, 0.0]))


def test_critical_case_uses_log_corrected_normalizer():
    cfg = _config("distribution", spec=HermiteSpec(q=1, hurst=0.75),
                  horizons=(16.0,), replications=4)
    law = harness.fluctuation_law(cfg.spec, cfg.params.a)
    rows = ((16.0, 0, 1, 2.0, 2.0, 0.1, 0),
            (16.0, 1, 2, 0.0, 2.0, 0.1, 0))
    (_, za, _), = normalized_errors(cfg, rows, law)
    assert_allclose(za[0], rate_normalizer(16.0, 0.5, True))


def test_rate_experiment_fits_slopes():
    res = run_rate(_config("rate", horizons=(5.0, 10.0, 20.0, 40.0),
                           replications=30))
    assert res.fit_a is not None and res.fit_b is not None
    assert -1.0 < res.fit_a.slope < 0.0
    assert -1.0 < res.fit_b.slope < 0.0


def test_distribution_requires_gaussian_limit():
    with pytest.raises(UnsupportedDistributionTargetError):
        run_distribution(_config("distribution",
                                 spec=HermiteSpec(q=1, hurst=0.8)))
    with pytest.raises(UnsupportedDistributionTargetError):
        run_distribution(_config("distribution",
                                 spec=HermiteSpec(q=2, hurst=0.7)))


def test_distribution_reports_ks_per_horizon():
    res = run_distribution(_config("distribution", horizons=(10.0, 20.0),
                                   replications=20))
    assert len(res.ks_a) == 2 and len(res.ks_b) == 2
    assert all(0.0 <= k.statistic <= 1.0 for k in res.ks_a)


def test_gt_converge_grid_guard():
    with pytest.raises(ConfigurationError):
        run_gt_converge(_config("gt-converge", spec=HermiteSpec(q=2, hurst=0.7),
                                horizons=(4.0,), dt=0.1))


def test_gt_converge_summaries():
    cfg = _config("gt-converge", spec=HermiteSpec(q=2, hurst=0.7),
                  horizons=(2.0, 4.0), dt=1.0 / 256, replications=8)
    res = run_gt_converge(cfg, refinement=4)
    assert res.columns == ("horizon", "replication", "seed", "g_t", "excluded")
    assert_allclose(res.b_squared,
                    b_constant(HermiteSpec(q=2, hurst=0.7)) ** 2, rtol=1e-14)
    for s in res.horizon_stats:
        assert s.count == 8
        assert s.var_g > 0.0
        assert_allclose(s.var_ratio, s.var_g / res.b_squared, rtol=1e-12)


def test_run_experiment_dispatch():
    res = run_experiment(_config("consistency", replications=4))
    assert res.config.experiment == "consistency"
