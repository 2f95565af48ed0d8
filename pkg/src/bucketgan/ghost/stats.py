"""Correlation statistics over arrays."""

from __future__ import annotations

import numpy as np

from bucketgan.errors import DegenerateDataError, DimensionError


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation over flattened values, in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"pearson shapes differ: {a.shape} vs {b.shape}")
    ca = a - a.mean()
    cb = b - b.mean()
    na = float(np.sqrt(np.sum(ca * ca)))
    nb = float(np.sqrt(np.sum(cb * cb)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateDataError("pearson is undefined for zero-variance input")
    return float(np.dot(ca, cb) / (na * nb))
