"""Input validation helpers shared across modules and the estimator API."""

from __future__ import annotations

import numpy as np


def as_float_image(x, name: str = "image") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(*named_arrays: tuple[str, np.ndarray]) -> None:
    shapes = {name: np.asarray(a).shape for name, a in named_arrays}
    if len(set(shapes.values())) > 1:
        raise ValueError(f"shape mismatch: {shapes}")


def check_binary_mask(m, name: str = "mask") -> np.ndarray:
    arr = np.asarray(m)
    values = np.unique(arr)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"{name} must be binary (0/1), found values {values[:8]}")
    return arr.astype(bool)


def check_labels(s, n_tissues: int, name: str = "s") -> np.ndarray:
    arr = np.asarray(s)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must hold integer tissue labels")
    if arr.min(initial=0) < 0 or arr.max(initial=0) >= n_tissues:
        raise ValueError(f"{name} labels must lie in 0..{n_tissues - 1}")
    return arr
