"""Scalar losses: binary and categorical cross-entropy.

Predictions are clamped to [CLAMP_EPS, 1 - CLAMP_EPS] before the log, so both
losses are finite and reach ~0 only at exactly-correct predictions. Clamped
entries get zero gradient (the clamp's own derivative).
"""

from __future__ import annotations

import numpy as np

from bucketgan.errors import DimensionError, LabelError
from bucketgan.nn.tape import Tape, Value, donate

CLAMP_EPS = 1e-7


def bce_loss(pred: Value, target, tape: Tape | None = None) -> Value:
    """Mean of -[t*log(p) + (1-t)*log(1-p)] over all elements."""
    t = np.asarray(target, dtype=pred.data.dtype)
    if t.shape != pred.data.shape:
        raise DimensionError(
            f"bce target shape {t.shape} != prediction shape {pred.data.shape}"
        )
    p = np.clip(pred.data, CLAMP_EPS, 1.0 - CLAMP_EPS)
    n = p.size
    loss = -(t * np.log(p) + (1.0 - t) * np.log1p(-p)).sum() / n
    y = Value(np.asarray(loss))
    if tape is not None:
        inside = (pred.data > CLAMP_EPS) & (pred.data < 1.0 - CLAMP_EPS)
        def bwd() -> None:
            g = float(y.grad)
            dp = np.where(inside, (p - t) / (p * (1.0 - p) * n), 0.0)
            donate(pred, (g * dp).astype(pred.data.dtype))
        tape.record(bwd)
    return y


def cce_loss(probs: Value, labels, tape: Tape | None = None) -> Value:
    """Mean of -log(probs[i, labels[i]]) over the batch.

    ``probs`` rows are expected to come from softmax (each row a
    distribution); labels are integer class indices.
    """
    pd = probs.data
    if pd.ndim != 2:
        raise DimensionError(f"cce expects (batch, classes) probs, got {pd.shape}")
    y_idx = np.asarray(labels)
    if y_idx.shape != (pd.shape[0],):
        raise DimensionError(
            f"cce labels shape {y_idx.shape} != batch ({pd.shape[0]},)"
        )
    k = pd.shape[1]
    if y_idx.min() < 0 or y_idx.max() >= k:
        raise LabelError(f"labels must be in [0, {k}), got range "
                         f"[{y_idx.min()}, {y_idx.max()}]")
    n = pd.shape[0]
    rows = np.arange(n)
    picked = pd[rows, y_idx]
    clamped = np.clip(picked, CLAMP_EPS, 1.0 - CLAMP_EPS)
    loss = -np.log(clamped).sum() / n
    y = Value(np.asarray(loss))
    if tape is not None:
        inside = (picked > CLAMP_EPS) & (picked < 1.0 - CLAMP_EPS)
        def bwd() -> None:
            g = float(y.grad)
            dp = np.zeros_like(pd)
            dp[rows, y_idx] = np.where(inside, -g / (clamped * n), 0.0)
            donate(probs, dp)
        tape.record(bwd)
    return y
