"""Computational-ghost-imaging forward model.

Speckle sequences illuminate a target; a bucket detector integrates the echo
into one scalar per pattern; a full illumination pass folds into a 2-D
bucket-signal array. Includes the classic second-order-correlation
reconstruction as a sanity path and the turbulence/additive-noise channels.
"""

from bucketgan.ghost.speckles import (
    SpeckleSequence,
    generate_speckles,
    parse_distribution,
    save_speckles,
    load_speckles,
)
from bucketgan.ghost.measure import (
    TargetImage,
    BucketArray,
    bucket_signal,
    measure_sequence,
    measure_targets,
    fold_to_array,
)
from bucketgan.ghost.reconstruct import g2_reconstruct
from bucketgan.ghost.noise import (
    TurbulenceField,
    turbulence_field,
    pollute_speckles,
    add_fixed_noise,
    add_awgn_snr,
)
from bucketgan.ghost.stats import pearson

__all__ = [
    "SpeckleSequence",
    "generate_speckles",
    "parse_distribution",
    "save_speckles",
    "load_speckles",
    "TargetImage",
    "BucketArray",
    "bucket_signal",
    "measure_sequence",
    "measure_targets",
    "fold_to_array",
    "g2_reconstruct",
    "TurbulenceField",
    "turbulence_field",
    "pollute_speckles",
    "add_fixed_noise",
    "add_awgn_snr",
    "pearson",
]
