"""Exactness of the circulant-embedding fractional Gaussian noise sampler."""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import toeplitz

from hermite_vasicek.errors import ParameterError
from hermite_vasicek.fgn import (_embedding_sqrt_eigs, _fgn_covariance_vec,
                                 fgn_covariance, sample_fgn)


def test_covariance_endpoints():
    assert fgn_covariance(0.7, 0) == 1.0
    assert_allclose(fgn_covariance(0.7, 1), (2.0 ** 1.4 - 2.0) / 2.0,
                    rtol=1e-15)
    assert fgn_covariance(0.7, -3) == fgn_covariance(0.7, 3)


def test_covariance_positive_and_decaying():
    g = _fgn_covariance_vec(0.8, np.arange(1, 200))
    assert np.all(g > 0)
    assert np.all(np.diff(g) < 0)


def test_hurst_domain():
    for H in (0.5, 1.0, 0.2):
        with pytest.raises(ParameterError):
            fgn_covariance(H, 0)


def test_embedding_eigenvalues_nonnegative():
    for H in (0.55, 0.75, 0.95):
        root, clipped = _embedding_sqrt_eigs(H, 512)
        assert not clipped
        assert np.all(root >= 0.0)


def test_sample_shape_and_reproducibility():
    x1, c1 = sample_fgn(0.7, 1000, np.random.default_rng(5))
    x2, c2 = sample_fgn(0.7, 1000, np.random.default_rng(5))
    assert x1.shape == (1000,)
    assert not c1 and not c2
    assert np.array_equal(x1, x2)


def test_sample_validation():
    with pytest.raises(ParameterError):
        sample_fgn(0.7, 0, np.random.default_rng(1))


def test_single_increment_is_standard_normal():
    draws = np.array([sample_fgn(0.9, 1, np.random.default_rng(i))[0][0]
                      for i in range(4000)])
    assert abs(np.mean(draws)) < 4.0 / np.sqrt(4000)
    assert abs(np.var(draws, ddof=1) - 1.0) < 4.0 * np.sqrt(2.0 / 4000)


def test_sample_covariance_matches_target():
    H, n, reps = 0.7, 8, 30000
    rng = np.random.default_rng(123)
    draws = np.stack([sample_fgn(H, n, rng)[0] for _ in range(reps)])
    emp = draws.T @ draws / reps
    target = toeplitz(_fgn_covariance_vec(H, np.arange(n)))
    # Var(xy) = 1 + rho^2 <= 2 per entry: 4 se band
    assert np.max(np.abs(emp - target)) < 4.0 * np.sqrt(2.0 / reps)
