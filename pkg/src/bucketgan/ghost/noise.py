"""Disturbance channels: frozen turbulence fields and additive Gaussian noise.

Turbulence is modeled as a single field drawn once and then fixed — the
recognition window is assumed shorter than the turbulence change rate, so
every pattern (or every bucket array) sees the same disturbance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bucketgan.errors import DegenerateDataError, DimensionError
from bucketgan.ghost.measure import BucketArray
from bucketgan.ghost.speckles import SpeckleSequence, _fingerprint, _header_bytes


@dataclass
class TurbulenceField:
    """A fixed zero-mean Gaussian field; same seed -> identical field."""

    values: np.ndarray          # float64, shape of a pattern or bucket array
    seed: int
    sigma: float


def turbulence_field(seed: int, shape: tuple[int, int],
                     sigma: float) -> TurbulenceField:
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    values = rng.normal(0.0, sigma, size=shape) if sigma > 0 else np.zeros(shape)
    return TurbulenceField(values=values, seed=seed, sigma=sigma)


def pollute_speckles(seq: SpeckleSequence,
                     field: TurbulenceField) -> SpeckleSequence:
    """Perturb every pattern by the same frozen field, clamped to [0, 1]."""
    if field.values.shape != (seq.height, seq.width):
        raise DimensionError(
            f"field shape {field.values.shape} != pattern shape "
            f"({seq.height}, {seq.width})"
        )
    patterns = np.clip(
        seq.patterns.astype(np.float64) + field.values, 0.0, 1.0
    ).astype(np.float32)
    header = _header_bytes(seq.seed, seq.distribution, seq.count,
                           seq.height, seq.width)
    fp = _fingerprint(header, patterns.tobytes(), polluted=True)
    return SpeckleSequence(patterns=patterns, seed=seq.seed,
                           distribution=seq.distribution, fingerprint=fp,
                           polluted=True)


def add_fixed_noise(arr: BucketArray, field: TurbulenceField) -> BucketArray:
    """Elementwise sum of array and field; provenance becomes 'turbulent'."""
    if field.values.shape != arr.values.shape:
        raise DimensionError(
            f"field shape {field.values.shape} != array shape "
            f"{arr.values.shape}"
        )
    return BucketArray(values=arr.values + field.values,
                       provenance="turbulent", fingerprint=arr.fingerprint)


def add_awgn_snr(arr: BucketArray, snr_db: float, rng_seed: int) -> BucketArray:
    """Add white Gaussian noise at an exact realized SNR.

    The drawn noise is rescaled so 10*log10(sum(signal^2)/sum(noise^2))
    equals ``snr_db`` for this realization, not just in expectation.
    ``snr_db = inf`` is the no-noise sentinel.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return BucketArray(values=arr.values.copy(),
                           provenance=arr.provenance,
                           fingerprint=arr.fingerprint)
    signal_power = float(np.sum(arr.values ** 2))
    if signal_power == 0.0:
        raise DegenerateDataError("SNR is undefined for an all-zero array")
    rng = np.random.default_rng(rng_seed)
    noise = rng.normal(0.0, 1.0, size=arr.values.shape)
    target_power = signal_power / (10.0 ** (snr_db / 10.0))
    noise *= math.sqrt(target_power / float(np.sum(noise ** 2)))
    return BucketArray(values=arr.values + noise,
                       provenance=f"awgn({snr_db:g}dB)",
                       fingerprint=arr.fingerprint)
