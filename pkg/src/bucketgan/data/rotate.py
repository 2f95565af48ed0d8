"""Target rotation for attitude experiments."""

from __future__ import annotations

import math

import numpy as np

from bucketgan.ghost.measure import TargetImage


def rotate_target(img: TargetImage, degrees: float) -> TargetImage:
    """Rotate counterclockwise about the image center.

    Bilinear interpolation, zero fill outside the source, output clipped to
    [0, 1]. Center is ((h-1)/2, (w-1)/2), so 0 is a bit-exact identity and
    multiples of 90 degrees land exactly on the grid of a square image.
    """
    if degrees % 360.0 == 0.0:
        return TargetImage(pixels=img.pixels.copy(), label=img.label)
    h, w = img.pixels.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    theta = math.radians(degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    dy = rr - cy
    dx = cc - cx
    # Inverse map: where did each output pixel come from in the source.
    src_r = cy + dy * cos_t + dx * sin_t
    src_c = cx - dy * sin_t + dx * cos_t

    r0 = np.floor(src_r).astype(np.int64)
    c0 = np.floor(src_c).astype(np.int64)
    fr = src_r - r0
    fc = src_c - c0

    out = np.zeros((h, w), dtype=np.float64)
    for dr, dc, weight in (
        (0, 0, (1 - fr) * (1 - fc)),
        (0, 1, (1 - fr) * fc),
        (1, 0, fr * (1 - fc)),
        (1, 1, fr * fc),
    ):
        r = r0 + dr
        c = c0 + dc
        valid = (r >= 0) & (r < h) & (c >= 0) & (c < w)
        out[valid] += weight[valid] * img.pixels[r[valid], c[valid]]
    return TargetImage(pixels=np.clip(out, 0.0, 1.0), label=img.label)
