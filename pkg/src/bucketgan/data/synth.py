"""Labeled bucket-array dataset synthesis, normalization, and splitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from bucketgan.errors import (
    ConfigError,
    DegenerateDataError,
    DimensionError,
    LabelError,
)
from bucketgan.ghost.measure import BucketArray, TargetImage, measure_targets
from bucketgan.ghost.noise import TurbulenceField, add_awgn_snr
from bucketgan.ghost.speckles import SpeckleSequence


@dataclass
class LabeledTarget:
    image: TargetImage
    label: int
    source_id: str = ""


@dataclass
class SplitSpec:
    train_fraction: float
    seed: int
    stratified: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )


@dataclass
class FixedFieldNoise:
    """Frozen turbulence field added to every bucket array."""

    field: TurbulenceField

    @property
    def tag(self) -> str:
        return f"turbulent(sigma={self.field.sigma:g},seed={self.field.seed})"


@dataclass
class AwgnNoise:
    """Per-sample white Gaussian noise at an exact realized SNR."""

    snr_db: float
    seed: int

    @property
    def tag(self) -> str:
        return f"awgn(snr={self.snr_db:g}dB,seed={self.seed})"


NoiseChannel = Union[FixedFieldNoise, AwgnNoise, None]


@dataclass
class BucketDataset:
    """Labeled bucket arrays plus the provenance needed to use them safely:
    the speckle fingerprint they were measured under, the noise channel they
    went through, and (once normalized) the train-split min/max stats."""

    arrays: np.ndarray                 # (n, rows, cols) float32
    labels: np.ndarray                 # (n,) int64
    num_classes: int
    speckle_fingerprint: bytes
    noise_config: str = "none"
    norm_stats: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.arrays.ndim != 3:
            raise DimensionError(
                f"dataset arrays must be (n, rows, cols), got {self.arrays.shape}"
            )
        if len(self.labels) != len(self.arrays):
            raise DimensionError(
                f"{len(self.arrays)} arrays but {len(self.labels)} labels"
            )
        if len(self.labels) and (self.labels.min() < 0
                                 or self.labels.max() >= self.num_classes):
            raise LabelError(
                f"labels must be in [0, {self.num_classes})"
            )

    def __len__(self) -> int:
        return len(self.arrays)

    @property
    def rows(self) -> int:
        return self.arrays.shape[1]

    @property
    def cols(self) -> int:
        return self.arrays.shape[2]

    def array_at(self, i: int) -> BucketArray:
        provenance = "clean" if self.noise_config == "none" else self.noise_config
        return BucketArray(values=self.arrays[i].astype(np.float64),
                           provenance=provenance,
                           fingerprint=self.speckle_fingerprint)

    def take(self, indices: np.ndarray) -> "BucketDataset":
        return replace(self, arrays=self.arrays[indices],
                       labels=self.labels[indices])


def _fold_shape(count: int, fold: Optional[tuple[int, int]]) -> tuple[int, int]:
    if fold is not None:
        rows, cols = fold
        if rows * cols != count:
            raise DimensionError(
                f"fold shape {rows}x{cols} does not match {count} measurements"
            )
        return rows, cols
    side = math.isqrt(count)
    if side * side != count:
        raise DimensionError(
            f"{count} measurements do not fold into a square; pass an "
            "explicit fold shape"
        )
    return side, side


def synth_dataset(targets: list[LabeledTarget], seq: SpeckleSequence,
                  noise: NoiseChannel = None,
                  fold: Optional[tuple[int, int]] = None,
                  num_classes: Optional[int] = None) -> BucketDataset:
    """Measure every target under the fixed sequence and fold the bucket
    vectors into labeled 2-D arrays (optionally through a noise channel)."""
    if not targets:
        raise DegenerateDataError("synth_dataset needs at least one target")
    rows, cols = _fold_shape(seq.count, fold)
    stack = np.stack([t.image.pixels for t in targets])
    buckets = measure_targets(seq, stack)          # (n, count) float64
    arrays = buckets.reshape(len(targets), rows, cols)

    tag = "none"
    if isinstance(noise, FixedFieldNoise):
        if noise.field.values.shape != (rows, cols):
            raise DimensionError(
                f"noise field {noise.field.values.shape} != array "
                f"({rows}, {cols})"
            )
        arrays = arrays + noise.field.values
        tag = noise.tag
    elif isinstance(noise, AwgnNoise):
        noisy = np.empty_like(arrays)
        for i in range(len(arrays)):
            arr = BucketArray(values=arrays[i])
            noisy[i] = add_awgn_snr(arr, noise.snr_db,
                                    _sample_seed(noise.seed, i)).values
        arrays = noisy
        tag = noise.tag
    elif noise is not None:
        raise ConfigError(f"unknown noise channel {noise!r}")

    labels = np.array([t.label for t in targets], dtype=np.int64)
    n_cls = num_classes if num_classes is not None else int(labels.max()) + 1
    return BucketDataset(
        arrays=arrays.astype(np.float32),
        labels=labels,
        num_classes=n_cls,
        speckle_fingerprint=seq.fingerprint,
        noise_config=tag,
    )


def _sample_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(entropy=(seed, index))
    return int(ss.generate_state(1, np.uint64)[0])


def with_awgn(ds: BucketDataset, snr_db: float, seed: int) -> BucketDataset:
    """Noisy copy of a dataset (per-sample exact-SNR white noise)."""
    noisy = np.empty_like(ds.arrays)
    for i in range(len(ds)):
        arr = BucketArray(values=ds.arrays[i].astype(np.float64))
        noisy[i] = add_awgn_snr(arr, snr_db, _sample_seed(seed, i)).values
    return replace(ds, arrays=noisy,
                   noise_config=AwgnNoise(snr_db, seed).tag)


def with_fixed_field(ds: BucketDataset, field: TurbulenceField) -> BucketDataset:
    """Copy of a dataset with one frozen field added to every array."""
    if field.values.shape != (ds.rows, ds.cols):
        raise DimensionError(
            f"field {field.values.shape} != arrays ({ds.rows}, {ds.cols})"
        )
    arrays = (ds.arrays.astype(np.float64) + field.values).astype(np.float32)
    return replace(ds, arrays=arrays,
                   noise_config=FixedFieldNoise(field).tag)


def normalize_dataset(ds: BucketDataset) -> BucketDataset:
    """Affine map of all values to [-1, 1] by the dataset's global min/max.

    Call on the training split only; apply the stored stats to held-out data
    (which may then legitimately fall outside [-1, 1] — no clamping).
    """
    if len(ds) == 0:
        raise DegenerateDataError("cannot normalize an empty dataset")
    if ds.norm_stats is not None:
        raise ConfigError("dataset is already normalized")
    vmin = float(ds.arrays.min())
    vmax = float(ds.arrays.max())
    if vmin == vmax:
        raise DegenerateDataError(
            f"constant dataset (min = max = {vmin}); normalization undefined"
        )
    arrays = normalize_values(ds.arrays, (vmin, vmax)).astype(np.float32)
    return replace(ds, arrays=arrays, norm_stats=(vmin, vmax))


def normalize_values(values: np.ndarray, stats: tuple[float, float]) -> np.ndarray:
    vmin, vmax = stats
    return (np.asarray(values, dtype=np.float64) - vmin) / (vmax - vmin) * 2.0 - 1.0


def denormalize_values(values: np.ndarray, stats: tuple[float, float]) -> np.ndarray:
    vmin, vmax = stats
    return (np.asarray(values, dtype=np.float64) + 1.0) / 2.0 * (vmax - vmin) + vmin


def split(ds: BucketDataset, spec: SplitSpec) -> tuple[BucketDataset, BucketDataset]:
    """Disjoint, exhaustive, seed-deterministic train/test split."""
    rng = np.random.default_rng(spec.seed)
    n = len(ds)
    if n == 0:
        raise DegenerateDataError("cannot split an empty dataset")
    if spec.stratified:
        train_idx: list[np.ndarray] = []
        test_idx: list[np.ndarray] = []
        for c in range(ds.num_classes):
            members = np.flatnonzero(ds.labels == c)
            if members.size == 0:
                raise DegenerateDataError(
                    f"class {c} is empty; stratified split impossible"
                )
            if members.size < 2:
                raise DegenerateDataError(
                    f"class {c} has {members.size} sample(s); stratified "
                    "split needs >= 2 per class"
                )
            perm = rng.permutation(members)
            k = int(round(spec.train_fraction * members.size))
            k = min(max(k, 1), members.size - 1)
            train_idx.append(perm[:k])
            test_idx.append(perm[k:])
        tr = np.concatenate(train_idx)
        te = np.concatenate(test_idx)
    else:
        perm = rng.permutation(n)
        k = int(round(spec.train_fraction * n))
        k = min(max(k, 1), n - 1)
        tr, te = perm[:k], perm[k:]
    return ds.take(np.sort(tr)), ds.take(np.sort(te))
