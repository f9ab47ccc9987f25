"""Hermite driver synthesis: normalization, delegation, and scaling."""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import beta as beta_fn

from hermite_vasicek.errors import ConfigurationError, ParameterError
from hermite_vasicek.fgn import _fgn_covariance_vec
from hermite_vasicek.hermite import (HermiteSpec, _hermite_apply,
                                     _partial_sum_sd, hermite_constant,
                                     simulate_fbm, simulate_hermite)
from hermite_vasicek.paths import GridSpec


def test_spec_validation():
    with pytest.raises(ParameterError):
        HermiteSpec(q=0, hurst=0.7)
    with pytest.raises(ParameterError):
        HermiteSpec(q=1.5, hurst=0.7)
    with pytest.raises(ParameterError):
        HermiteSpec(q=2, hurst=0.5)


def test_kernel_exponent_and_constant():
    spec = HermiteSpec(q=2, hurst=0.7)
    assert_allclose(spec.h0, 0.85, rtol=1e-15)
    b = beta_fn(0.35, 0.3)
    assert_allclose(spec.c, math.sqrt(0.7 * 0.4 / (2.0 * b ** 2)), rtol=1e-14)
    # defining identity c^2 q! beta^q = H(2H-1)
    for q, H in ((1, 0.6), (2, 0.7), (3, 0.9)):
        s = HermiteSpec(q=q, hurst=H)
        lhs = (hermite_constant(s) ** 2 * math.factorial(q)
               * beta_fn(s.h0 - 0.5, 2.0 - 2.0 * s.h0) ** q)
        assert_allclose(lhs, H * (2.0 * H - 1.0), rtol=1e-13)


def test_hermite_polynomials_probabilists():
    x = np.linspace(-2.0, 2.0, 9)
    assert_allclose(_hermite_apply(1, x), x)
    assert_allclose(_hermite_apply(2, x), x * x - 1.0)
    assert_allclose(_hermite_apply(3, x), x ** 3 - 3.0 * x)
    assert_allclose(_hermite_apply(4, x), x ** 4 - 6.0 * x ** 2 + 3.0)


def test_partial_sum_sd_q1_is_fbm_scaling():
    # He_1 partial sums of fGn(h0) have sd total^h0 exactly
    for total in (16, 300):
        assert_allclose(_partial_sum_sd(0.8, 1, total), total ** 0.8,
                        rtol=1e-12)


def test_partial_sum_sd_matches_full_covariance_sum():
    h0, q, total = 0.85, 2, 12
    lags = np.abs(np.arange(total)[:, None] - np.arange(total)[None, :])
    rho = _fgn_covariance_vec(h0, lags)
    var = math.factorial(q) * float(np.sum(rho ** q))
    assert_allclose(_partial_sum_sd(h0, q, total), math.sqrt(var), rtol=1e-12)


def test_fbm_starts_at_zero_and_reproduces():
    grid = GridSpec(horizon=2.0, n=64)
    p1 = simulate_fbm(0.6, grid, 42)
    p2 = simulate_fbm(0.6, grid, 42)
    assert p1.values[0] == 0.0
    assert np.array_equal(p1.values, p2.values)
    assert p1.warnings == ()


def test_fbm_terminal_variance():
    grid = GridSpec(horizon=2.0, n=16)
    H, reps = 0.6, 4000
    z = np.array([simulate_fbm(H, grid, [7, i]).values[-1]
                  for i in range(reps)])
    target = 2.0 ** (2.0 * H)
    se = target * np.sqrt(2.0 / reps)
    assert abs(np.var(z, ddof=1) - target) < 4.0 * se


def test_order_one_delegates_to_fbm():
    grid = GridSpec(horizon=1.0, n=32)
    a = simulate_hermite(HermiteSpec(q=1, hurst=0.7), grid, 9)
    b = simulate_fbm(0.7, grid, 9)
    assert np.array_equal(a.values, b.values)


def test_refinement_guard():
    grid = GridSpec(horizon=1.0, n=8)
    with pytest.raises(ConfigurationError):
        simulate_hermite(HermiteSpec(q=2, hurst=0.7), grid, 1, refinement=1)


def test_q2_path_shape_and_determinism():
    grid = GridSpec(horizon=1.0, n=16)
    spec = HermiteSpec(q=2, hurst=0.7)
    p1 = simulate_hermite(spec, grid, 3, refinement=8)
    p2 = simulate_hermite(spec, grid, 3, refinement=8)
    assert p1.values[0] == 0.0
    assert p1.values.shape == (17,)
    assert np.array_equal(p1.values, p2.values)


def test_q2_terminal_variance_normalized():
    # analytic normalization pins Var(Z_T) = T^(2H); check by MC at 4 se
    grid = GridSpec(horizon=1.5, n=4)
    spec = HermiteSpec(q=2, hurst=0.7)
    reps = 3000
    z = np.array([simulate_hermite(spec, grid, [11, i], refinement=16).values[-1]
                  for i in range(reps)])
    target = 1.5 ** 1.4
    dev = np.var(z, ddof=1) - target
    # heavy-tailed fourth moment: use the empirical se of the variance
    se = np.std((z - z.mean()) ** 2, ddof=1) / np.sqrt(reps)
    assert abs(dev) < 4.0 * se
