"""Target ingestion and labeled bucket-array dataset synthesis."""

from bucketgan.data.idx import (
    load_idx_images,
    load_idx_labels,
    load_labeled_targets,
    write_idx_images,
    write_idx_labels,
)
from bucketgan.data.rotate import rotate_target
from bucketgan.data.glyphs import glyph_image, make_glyph_targets, FONT
from bucketgan.data.synth import (
    LabeledTarget,
    BucketDataset,
    SplitSpec,
    FixedFieldNoise,
    AwgnNoise,
    synth_dataset,
    normalize_dataset,
    normalize_values,
    denormalize_values,
    split,
)
from bucketgan.data.io import save_dataset, load_dataset

__all__ = [
    "load_idx_images",
    "load_idx_labels",
    "load_labeled_targets",
    "write_idx_images",
    "write_idx_labels",
    "rotate_target",
    "glyph_image",
    "make_glyph_targets",
    "FONT",
    "LabeledTarget",
    "BucketDataset",
    "SplitSpec",
    "FixedFieldNoise",
    "AwgnNoise",
    "synth_dataset",
    "normalize_dataset",
    "normalize_values",
    "denormalize_values",
    "split",
    "save_dataset",
    "load_dataset",
]
