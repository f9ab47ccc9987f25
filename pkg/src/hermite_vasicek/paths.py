"""Uniform time grids and immutable sample paths."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid t_k = k*dt, k = 0..n, with dt = horizon/n.

    Parameters
    ----------
    horizon : float
        Terminal time T > 0.
    n : int
        Number of steps (>= 1); the grid has n+1 points.
    """

    horizon: float
    n: int

    def __post_init__(self):
        if not (self.horizon > 0 and np.isfinite(self.horizon)):
            raise ParameterError(f"horizon must be positive and finite, got {self.horizon}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ParameterError(f"step count must be an integer >= 1, got {self.n}")

    @property
    def dt(self) -> float:
        return self.horizon / self.n

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n + 1)


@dataclass(frozen=True)
class SamplePath:
    """A path sampled on a uniform grid; values are read-only once built."""

    grid: GridSpec
    values: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 1 or v.size != self.grid.n + 1:
            raise ParameterError(
                f"path needs {self.grid.n + 1} values for its grid, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)
