"""Recognition, accuracy reporting, and correlation tables.

The fingerprint contract is enforced here: recognizing an array measured
under a different speckle sequence than the checkpoint was trained with is
an error, never a silent accuracy drop.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from bucketgan.errors import (
    DegenerateDataError,
    DimensionError,
    FingerprintMismatchError,
)
from bucketgan.data.synth import BucketDataset, normalize_values
from bucketgan.ghost.measure import BucketArray
from bucketgan.ghost.stats import pearson
from bucketgan.gan.checkpoint import Checkpoint
from bucketgan.gan.models import discriminator_forward


@dataclass
class Recognition:
    """One classification: argmax label, its probability, full distribution."""

    label: int
    confidence: float
    class_probs: np.ndarray


@dataclass
class AccuracyReport:
    per_class_accuracy: np.ndarray     # (n,) in [0, 1]
    confusion: np.ndarray              # (n, n) counts, rows = true class
    overall: float
    sample_counts: np.ndarray          # (n,) per true class
    mean_latency_s: float
    metadata: dict = field(default_factory=dict)


def _check_fingerprint(data_fp: bytes | None, ckpt: Checkpoint,
                       what: str) -> None:
    if not data_fp:
        raise FingerprintMismatchError(
            f"{what} carries no speckle fingerprint; cannot check the "
            "recognition contract"
        )
    if data_fp != ckpt.speckle_fingerprint:
        raise FingerprintMismatchError(
            f"{what} was measured under a different speckle sequence than "
            "the checkpoint was trained with"
        )


def _forward_probs(values: np.ndarray, ckpt: Checkpoint) -> np.ndarray:
    x = normalize_values(values.reshape(1, -1), ckpt.norm_stats)
    x = x.astype(ckpt.config.dtype)
    _, probs = discriminator_forward(x, ckpt.discriminator, mode="infer")
    return probs.data[0]


def classify(arr: BucketArray, ckpt: Checkpoint) -> Recognition:
    """Class-head argmax on one (raw, unnormalized) bucket array.

    Normalization uses the checkpoint's stored training stats. Ties break
    toward the lowest class index.
    """
    _check_fingerprint(arr.fingerprint, ckpt, "bucket array")
    if arr.values.shape != (ckpt.rows, ckpt.cols):
        raise DimensionError(
            f"array is {arr.values.shape}, checkpoint expects "
            f"({ckpt.rows}, {ckpt.cols})"
        )
    probs = _forward_probs(arr.values, ckpt)
    label = int(np.argmax(probs))      # np.argmax returns the first maximum
    return Recognition(label=label, confidence=float(probs[label]),
                       class_probs=probs)


def evaluate(test: BucketDataset, ckpt: Checkpoint) -> AccuracyReport:
    """Per-class and overall accuracy of the class head on a raw test set.

    Samples are classified one at a time (the deployment shape), which also
    yields the mean per-array recognition latency.
    """
    if len(test) == 0:
        raise DegenerateDataError("cannot evaluate on an empty test set")
    _check_fingerprint(test.speckle_fingerprint, ckpt, "test dataset")
    n = ckpt.num_classes
    confusion = np.zeros((n, n), dtype=np.int64)
    t0 = time.perf_counter()
    for i in range(len(test)):
        probs = _forward_probs(test.arrays[i].astype(np.float64), ckpt)
        confusion[int(test.labels[i]), int(np.argmax(probs))] += 1
    elapsed = time.perf_counter() - t0

    counts = confusion.sum(axis=1)
    with np.errstate(invalid="ignore"):
        per_class = np.where(counts > 0, np.diag(confusion) / counts, np.nan)
    overall = float(np.trace(confusion) / len(test))
    return AccuracyReport(
        per_class_accuracy=per_class,
        confusion=confusion,
        overall=overall,
        sample_counts=counts,
        mean_latency_s=elapsed / len(test),
        metadata={
            "samples": len(test),
            "epoch": ckpt.epoch,
            "noise_config": test.noise_config,
            "train_seed": ckpt.config.seed,
            "speckle_fingerprint": ckpt.speckle_fingerprint.hex(),
            "wall_clock_s": elapsed,
        },
    )


def class_mean_correlation_table(ds: BucketDataset) -> np.ndarray:
    """Pearson correlation between per-class mean arrays.

    Exactly symmetric with a unit diagonal (upper triangle computed once and
    mirrored).
    """
    means = []
    for c in range(ds.num_classes):
        members = ds.labels == c
        if not members.any():
            raise DegenerateDataError(f"class {c} has no samples")
        means.append(ds.arrays[members].astype(np.float64).mean(axis=0))
    n = ds.num_classes
    table = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            r = pearson(means[i], means[j])
            table[i, j] = r
            table[j, i] = r
    return table
