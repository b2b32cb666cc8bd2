"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import InvalidSampleError


def check_series(x, name: str = "series") -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array of finite samples.

    Accepts anything array-like, including single-column 2-D input so the
    estimators interoperate with the usual ``(n_samples, 1)`` convention.
    Non-finite samples are rejected rather than skipped; skipping would
    silently shift window boundaries downstream.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise InvalidSampleError(f"{name}[{i}] is not finite ({arr[i]!r})", index=i)
    return arr


def check_positive(name: str, value) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
