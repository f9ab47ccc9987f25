"""Exception taxonomy shared across the package."""
from __future__ import annotations


class ParameterError(ValueError):
    """A model or grid parameter is outside its admissible range."""


class ConfigurationError(ValueError):
    """A run configuration is structurally invalid (grids, refinement, experiment layout)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its stated accuracy."""


class FormatError(ValueError):
    """A persisted artifact (CSV, config, manifest) is malformed."""


class DegenerateVarianceError(NumericalError):
    """Empirical variance too small to invert for the mean-reversion rate.

    Carries the partial result: the mean level is still well defined on a
    degenerate path, the rate is not.
    """

    def __init__(self, message: str, b_hat: float, alpha_t: float):
        super().__init__(message)
        self.b_hat = b_hat
        self.alpha_t = alpha_t


class UnsupportedDistributionTargetError(ValueError):
    """A distributional test was requested where no CDF target exists."""
