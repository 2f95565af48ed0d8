"""Bucket-signal measurement and folding into 2-D arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from bucketgan.errors import DimensionError
from bucketgan.ghost.speckles import SpeckleSequence


@dataclass
class TargetImage:
    """Grayscale target on the speckle grid, pixels in [0, 1]."""

    pixels: np.ndarray          # (height, width) float64
    label: Optional[int] = None

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class BucketArray:
    """A full illumination pass folded row-major into 2-D.

    ``provenance`` records the noise channel the values went through;
    ``fingerprint`` ties the array to the speckle sequence that produced it
    (required for recognition).
    """

    values: np.ndarray          # (rows, cols) float64
    provenance: str = "clean"
    fingerprint: Optional[bytes] = None

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def bucket_signal(pattern: np.ndarray, target: TargetImage) -> float:
    """One bucket reading: sum over pixels of pattern * target."""
    if pattern.shape != target.pixels.shape:
        raise DimensionError(
            f"pattern {pattern.shape} vs target {target.pixels.shape}"
        )
    return float(np.sum(pattern.astype(np.float64) * target.pixels))


def measure_sequence(seq: SpeckleSequence, target: TargetImage) -> np.ndarray:
    """All bucket readings for one target, in pattern order (float64).

    Linear in the target: measuring a*t1 + b*t2 gives a*m1 + b*m2.
    """
    if (seq.height, seq.width) != (target.height, target.width):
        raise DimensionError(
            f"speckles are {seq.height}x{seq.width}, target is "
            f"{target.height}x{target.width}"
        )
    return seq.flat() @ target.pixels.reshape(-1).astype(np.float64)


def measure_targets(seq: SpeckleSequence, stack: np.ndarray) -> np.ndarray:
    """Batch measurement: (n, h, w) targets -> (n, count) bucket vectors."""
    n = stack.shape[0]
    if stack.shape[1:] != (seq.height, seq.width):
        raise DimensionError(
            f"targets are {stack.shape[1:]}, speckles are "
            f"({seq.height}, {seq.width})"
        )
    flat = stack.reshape(n, -1).astype(np.float64)
    return flat @ seq.flat().T


def fold_to_array(v: np.ndarray, rows: int, cols: int,
                  provenance: str = "clean",
                  fingerprint: Optional[bytes] = None) -> BucketArray:
    """Row-major fold: array[r][c] = v[r*cols + c]."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size != rows * cols:
        raise DimensionError(
            f"cannot fold vector of length {v.size} into {rows}x{cols}"
        )
    return BucketArray(values=v.reshape(rows, cols).copy(),
                       provenance=provenance, fingerprint=fingerprint)
