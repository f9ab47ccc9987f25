"""Simulation and drift inference for Vasicek models with Hermite noise.

The driver is a self-similar process of Hermite order q (q = 1 Gaussian,
q = 2 Rosenblatt, ...) with Hurst index in (1/2, 1); the state solves a
linear mean-reverting equation on a uniform grid.  The package synthesizes
driver and state paths, computes moment-based estimators of the drift pair,
evaluates the constants and limit laws of their fluctuations, and runs
Monte Carlo experiments that check consistency, convergence rates, and
limiting distributions.
"""
from .asymptotics import (FluctuationLaw, LimitLaw, b_constant, f_closed_form,
                          fluctuation_law, sigma_h, sigma_h_bruteforce)
from .chaos import (chaos_oracle_q2, chaos_oracle_q2_batch,
                    chaos_oracle_variance)
from .errors import (ConfigurationError, DegenerateVarianceError, FormatError,
                     NumericalError, ParameterError,
                     UnsupportedDistributionTargetError)
from .estimators import (EstimateResult, GTResult, compute_gt, estimate,
                         integrate_path)
from .fgn import fgn_covariance, sample_fgn
from .fileio import (RunManifest, config_from_mapping, config_to_mapping,
                     default_output_dir, parse_config_file, read_manifest,
                     read_path_csv, read_raw_csv, write_manifest,
                     write_path_csv, write_rate_points_csv, write_raw_csv,
                     write_summary_csv)
from .harness import (MCConfig, MCResult, normalized_errors, run_consistency,
                      run_distribution, run_experiment, run_gt_converge,
                      run_rate)
from .hermite import (DEFAULT_REFINEMENT, HermiteSpec, hermite_constant,
                      simulate_fbm, simulate_hermite)
from .paths import GridSpec, SamplePath
from .stats import (LogLogFit, SampleSummary, ks_against_gaussian, loglog_fit,
                    rate_normalizer, summarize)
from .vasicek import VasicekParams, expected_y_squared, ou_path, vasicek_path

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DegenerateVarianceError", "FormatError",
    "NumericalError", "ParameterError", "UnsupportedDistributionTargetError",
    "GridSpec", "SamplePath", "HermiteSpec", "DEFAULT_REFINEMENT",
    "hermite_constant", "simulate_fbm", "simulate_hermite", "fgn_covariance",
    "sample_fgn", "chaos_oracle_variance", "chaos_oracle_q2",
    "chaos_oracle_q2_batch", "VasicekParams", "vasicek_path", "ou_path",
    "expected_y_squared", "EstimateResult", "GTResult", "estimate",
    "integrate_path", "compute_gt", "FluctuationLaw", "LimitLaw", "sigma_h",
    "sigma_h_bruteforce", "f_closed_form", "b_constant", "fluctuation_law",
    "LogLogFit", "SampleSummary", "summarize", "ks_against_gaussian",
    "loglog_fit", "rate_normalizer", "MCConfig", "MCResult",
    "normalized_errors", "run_consistency", "run_rate", "run_distribution",
    "run_gt_converge", "run_experiment", "RunManifest", "config_to_mapping",
    "config_from_mapping", "parse_config_file", "default_output_dir",
    "read_path_csv", "write_path_csv", "read_raw_csv", "write_raw_csv",
    "write_summary_csv", "write_rate_points_csv", "read_manifest",
    "write_manifest",
]
