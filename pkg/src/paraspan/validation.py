"""Input validation helpers shared by the estimator-style interfaces."""
from __future__ import annotations

import numpy as np

from .errors import DimMismatch, InputMismatch


def check_feature_array(X, n_features: int) -> np.ndarray:
    """Coerce ``X`` to a 2-D float64 array with the expected feature count."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != n_features:
        raise DimMismatch(f"expected (*, {n_features}) features, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("features contain non-finite values")
    return arr


def check_vector(v, dim: int, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.shape[0] != dim:
        raise DimMismatch(f"{name} has dim {arr.shape[0]}, expected {dim}")
    return arr


def check_same_length(a, b, what: str = "inputs"):
    if len(a) != len(b):
        raise InputMismatch(f"{what} differ in length: {len(a)} vs {len(b)}")


def check_binary_labels(y) -> np.ndarray:
    arr = np.asarray(y)
    if not set(np.unique(arr)) <= {0, 1}:
        raise ValueError("labels must be 0/1")
    return arr.astype(np.float64)
