"""Column-wise z-score standardization.

Features live on wildly different scales (node counts in the thousands,
ratios near 1), so learning code standardizes every column to mean 0 and
unit standard deviation. The population standard deviation is used;
zero-variance columns map to all zeros instead of dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["StandardizationParams", "zscore_fit", "zscore_apply"]


@dataclass(frozen=True)
class StandardizationParams:
    mean: np.ndarray
    std: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, StandardizationParams):
            return NotImplemented
        return (np.array_equal(self.mean, other.mean)
                and np.array_equal(self.std, other.std))


def zscore_fit(values: np.ndarray) -> StandardizationParams:
    """Per-column mean and population standard deviation."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot standardize an empty matrix")
    if values.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return StandardizationParams(mean=values.mean(axis=0), std=values.std(axis=0))


def zscore_apply(values: np.ndarray, params: StandardizationParams) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    std = np.where(params.std == 0, 1.0, params.std)
    out = (values - params.mean) / std
    if np.any(params.std == 0):
        out = np.where(params.std == 0, 0.0, out)
    return out
