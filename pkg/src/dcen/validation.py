"""Input-validation helpers for the estimator and CLI surfaces."""

from __future__ import annotations

import numpy as np

__all__ = ["check_array", "check_vector", "check_consistent_length", "check_is_fitted"]


class NotFittedError(RuntimeError):
    """predict/score was called before fit."""


def check_array(x, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-d float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_vector(x, name: str = "y") -> np.ndarray:
    """Coerce to a finite 1-d float array (column vectors are flattened)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_consistent_length(a: np.ndarray, b: np.ndarray, names: str = "X, y") -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"{names} have inconsistent first dimensions: {a.shape[0]} vs {b.shape[0]}"
        )


def check_is_fitted(estimator, attribute: str = "coef_") -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit first"
        )
