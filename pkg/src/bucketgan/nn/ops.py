"""Forward ops with recorded backward closures.

Every op takes an optional ``tape``; with ``tape=None`` it is a pure forward
evaluation (inference, finite-difference probes). Shapes follow the batch
convention: activations are (batch, features).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from bucketgan.errors import DegenerateDataError, DimensionError
from bucketgan.nn.tape import Param, Tape, Value, accumulate, donate

# Zero-mean Gaussian weight init, zero bias: the usual GAN dense init.
INIT_STD = 0.02


@dataclass
class DenseParams:
    """Affine layer parameters: weights (out, in), bias (out,)."""

    weights: Param
    bias: Param

    @property
    def in_dim(self) -> int:
        return self.weights.data.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.data.shape[0]

    def parameters(self) -> list[Param]:
        return [self.weights, self.bias]


def dense_params(rng: np.random.Generator, in_dim: int, out_dim: int,
                 std: float = INIT_STD, dtype=np.float32) -> DenseParams:
    w = rng.normal(0.0, std, size=(out_dim, in_dim)).astype(dtype)
    b = np.zeros(out_dim, dtype=dtype)
    return DenseParams(weights=Param(w), bias=Param(b))


def dense_forward(x: Value, p: DenseParams, tape: Tape | None = None) -> Value:
    """y = x @ W.T + b"""
    if x.data.ndim != 2 or x.data.shape[1] != p.in_dim:
        raise DimensionError(
            f"dense input shape {x.data.shape} incompatible with weights "
            f"({p.out_dim}, {p.in_dim})"
        )
    y = Value(x.data @ p.weights.data.T + p.bias.data)
    if tape is not None:
        def bwd() -> None:
            g = y.grad
            donate(p.weights, g.T @ x.data)
            donate(p.bias, g.sum(axis=0))
            donate(x, g @ p.weights.data)
        tape.record(bwd)
    return y


def leaky_relu(x: Value, alpha: float = 0.2, tape: Tape | None = None) -> Value:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"leaky_relu alpha must be in (0, 1), got {alpha}")
    xd = x.data
    negative = xd < 0
    out = xd.copy()
    np.multiply(out, xd.dtype.type(alpha), out=out, where=negative)
    y = Value(out)
    if tape is not None:
        def bwd() -> None:
            g = y.grad.copy()
            np.multiply(g, xd.dtype.type(alpha), out=g, where=negative)
            donate(x, g)
        tape.record(bwd)
    return y


def sigmoid(x: Value, tape: Tape | None = None) -> Value:
    xd = x.data
    # Split form avoids overflow in exp for large |x|.
    out = np.empty_like(xd)
    pos = xd >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-xd[pos]))
    ex = np.exp(xd[~pos])
    out[~pos] = ex / (1.0 + ex)
    y = Value(out)
    if tape is not None:
        def bwd() -> None:
            donate(x, y.grad * out * (1.0 - out))
        tape.record(bwd)
    return y


def tanh(x: Value, tape: Tape | None = None) -> Value:
    y = Value(np.tanh(x.data))
    if tape is not None:
        def bwd() -> None:
            donate(x, y.grad * (1.0 - y.data * y.data))
        tape.record(bwd)
    return y


def softmax(x: Value, tape: Tape | None = None) -> Value:
    """Row softmax with max-subtraction; rows sum to 1."""
    xd = x.data
    if xd.ndim != 2:
        raise DimensionError(f"softmax expects (batch, classes), got {xd.shape}")
    shifted = xd - xd.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    y = Value(probs)
    if tape is not None:
        def bwd() -> None:
            g = y.grad
            donate(x, probs * (g - (g * probs).sum(axis=1, keepdims=True)))
        tape.record(bwd)
    return y


@dataclass
class BatchNormParams:
    """Per-feature scale/shift plus running statistics for inference."""

    gamma: Param
    beta: Param
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.9
    epsilon: float = 1e-5

    def parameters(self) -> list[Param]:
        return [self.gamma, self.beta]


def batchnorm_params(dim: int, momentum: float = 0.9, epsilon: float = 1e-5,
                     dtype=np.float32) -> BatchNormParams:
    return BatchNormParams(
        gamma=Param(np.ones(dim, dtype=dtype)),
        beta=Param(np.zeros(dim, dtype=dtype)),
        running_mean=np.zeros(dim, dtype=dtype),
        running_var=np.ones(dim, dtype=dtype),
        momentum=momentum,
        epsilon=epsilon,
    )


def batchnorm_forward(x: Value, p: BatchNormParams, mode: str = "train",
                      tape: Tape | None = None,
                      update_running: bool | None = None) -> Value:
    """Batch normalization.

    mode="train" normalizes with batch statistics; mode="infer" uses the
    running statistics. Running stats are updated only on recorded training
    passes (``tape`` given), unless ``update_running`` overrides — a frozen
    discriminator pass needs gradients without touching its state.
    """
    if mode not in ("train", "infer"):
        raise ValueError(f"batchnorm mode must be 'train' or 'infer', got {mode!r}")
    xd = x.data
    if xd.ndim != 2 or xd.shape[1] != p.gamma.data.shape[0]:
        raise DimensionError(
            f"batchnorm input shape {xd.shape} incompatible with feature dim "
            f"{p.gamma.data.shape[0]}"
        )
    if mode == "train":
        n = xd.shape[0]
        if n < 2:
            raise DegenerateDataError(
                f"batchnorm in train mode needs batch size >= 2, got {n}"
            )
        mean = xd.mean(axis=0)
        var = xd.var(axis=0)
        std = np.sqrt(var + p.epsilon)
        xhat = (xd - mean) / std
        if update_running is None:
            update_running = tape is not None
        if update_running:
            m = p.momentum
            p.running_mean = (m * p.running_mean + (1.0 - m) * mean).astype(
                p.running_mean.dtype)
            p.running_var = (m * p.running_var + (1.0 - m) * var).astype(
                p.running_var.dtype)
    else:
        std = np.sqrt(p.running_var + p.epsilon)
        xhat = (xd - p.running_mean) / std
    y = Value(p.gamma.data * xhat + p.beta.data)
    if tape is not None:
        if mode == "train":
            def bwd() -> None:
                g = y.grad
                n_ = g.shape[0]
                donate(p.gamma, (g * xhat).sum(axis=0))
                donate(p.beta, g.sum(axis=0))
                gx = g * p.gamma.data
                s1 = gx.sum(axis=0)
                s2 = (gx * xhat).sum(axis=0)
                donate(x, (gx - s1 / n_ - xhat * (s2 / n_)) / std)
            tape.record(bwd)
        else:
            def bwd() -> None:
                g = y.grad
                donate(p.gamma, (g * xhat).sum(axis=0))
                donate(p.beta, g.sum(axis=0))
                donate(x, g * (p.gamma.data / std))
            tape.record(bwd)
    return y


def concat_rows(a: Value, b: Value, tape: Tape | None = None) -> Value:
    """Stack two batches along axis 0; gradient splits back."""
    if a.data.shape[1:] != b.data.shape[1:]:
        raise DimensionError(
            f"concat_rows trailing shapes differ: {a.data.shape} vs {b.data.shape}"
        )
    na = a.data.shape[0]
    y = Value(np.concatenate([a.data, b.data], axis=0))
    if tape is not None:
        def bwd() -> None:
            accumulate(a, y.grad[:na])
            accumulate(b, y.grad[na:])
        tape.record(bwd)
    return y


def reshape(x: Value, shape: tuple, tape: Tape | None = None) -> Value:
    y = Value(x.data.reshape(shape))
    if tape is not None:
        def bwd() -> None:
            accumulate(x, y.grad.reshape(x.data.shape))
        tape.record(bwd)
    return y


def add(a: Value, b: Value, tape: Tape | None = None) -> Value:
    if a.data.shape != b.data.shape:
        raise DimensionError(f"add shapes differ: {a.data.shape} vs {b.data.shape}")
    y = Value(a.data + b.data)
    if tape is not None:
        def bwd() -> None:
            accumulate(a, y.grad)
            accumulate(b, y.grad)
        tape.record(bwd)
    return y


def scale(x: Value, c: float, tape: Tape | None = None) -> Value:
    y = Value(x.data * c)
    if tape is not None:
        def bwd() -> None:
            donate(x, y.grad * c)
        tape.record(bwd)
    return y


def reduce_sum(x: Value, tape: Tape | None = None) -> Value:
    y = Value(np.asarray(x.data.sum()))
    if tape is not None:
        def bwd() -> None:
            accumulate(x, np.broadcast_to(y.grad, x.data.shape))
        tape.record(bwd)
    return y
