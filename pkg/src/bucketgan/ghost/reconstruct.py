"""Second-order-correlation reconstruction (classic ghost imaging).

Not on the recognition path; kept as the physics sanity check that the
simulated bucket signals actually carry the target.
"""

from __future__ import annotations

import numpy as np

from bucketgan.errors import DegenerateDataError, DimensionError
from bucketgan.ghost.speckles import SpeckleSequence


def g2_reconstruct(seq: SpeckleSequence, buckets: np.ndarray) -> np.ndarray:
    """Per-pixel normalized correlation <B*I(x,y)> / (<B> <I(x,y)>).

    Ensemble averages run over the pattern index. Invariant under positive
    scaling of the target (the bucket scale cancels).
    """
    buckets = np.asarray(buckets, dtype=np.float64)
    if buckets.ndim != 1 or buckets.size != seq.count:
        raise DimensionError(
            f"need one bucket value per pattern ({seq.count}), got "
            f"{buckets.shape}"
        )
    if seq.count < 2:
        raise DegenerateDataError("g2 needs an ensemble of at least 2 patterns")
    mean_b = buckets.mean()
    if mean_b == 0.0:
        raise DegenerateDataError("bucket ensemble mean is zero")
    flat = seq.flat()                       # (count, h*w)
    mean_i = flat.mean(axis=0)              # per-pixel reference mean
    if np.any(mean_i == 0.0):
        raise DegenerateDataError(
            "some pixels have zero mean reference intensity over the ensemble"
        )
    corr = buckets @ flat / seq.count       # <B * I(x,y)>
    g2 = corr / (mean_b * mean_i)
    return g2.reshape(seq.height, seq.width)
