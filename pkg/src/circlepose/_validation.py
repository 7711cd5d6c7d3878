"""Input coercion and validation helpers shared across the library."""

from __future__ import annotations

import numpy as np


def as_matrix_3x3(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite values")
    return m


def as_vec3(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    if np.all(v == 0.0):
        raise ValueError(f"{name} must not be the zero vector")
    return v


def as_points_2d(pts, min_points: int = 1, name: str = "points") -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"{name} must be an (n, 2) array, got shape {pts.shape}")
    if pts.shape[0] < min_points:
        raise ValueError(f"{name} needs at least {min_points} rows, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite values")
    return pts
