"""Generator and discriminator parameter containers and forward passes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bucketgan.errors import DimensionError, LabelError
from bucketgan.nn import (
    BatchNormParams,
    DenseParams,
    Param,
    Tape,
    Value,
    batchnorm_forward,
    batchnorm_params,
    dense_forward,
    dense_params,
    leaky_relu,
    reshape,
    sigmoid,
    softmax,
    tanh,
)

LEAKY_ALPHA = 0.2

GEN_HIDDEN_DEFAULT = (256, 512, 1024, 1024)
DISC_HIDDEN_DEFAULT = (512, 512, 512)


def one_hot(labels, num_classes: int, dtype=np.float32) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelError(
            f"labels must be in [0, {num_classes}), got "
            f"[{labels.min()}, {labels.max()}]"
        )
    out = np.zeros((labels.size, num_classes), dtype=dtype)
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass
class GeneratorParams:
    noise_dim: int
    num_classes: int
    out_dim: int
    layers: list[DenseParams]          # hidden stack + tanh output layer

    def parameters(self) -> list[Param]:
        out: list[Param] = []
        for layer in self.layers:
            out.extend(layer.parameters())
        return out


def init_generator(rng: np.random.Generator, noise_dim: int, num_classes: int,
                   out_dim: int, hidden=GEN_HIDDEN_DEFAULT,
                   dtype=np.float32) -> GeneratorParams:
    dims = [noise_dim + num_classes, *hidden, out_dim]
    layers = [dense_params(rng, dims[i], dims[i + 1], dtype=dtype)
              for i in range(len(dims) - 1)]
    return GeneratorParams(noise_dim=noise_dim, num_classes=num_classes,
                           out_dim=out_dim, layers=layers)


def generator_forward(z: np.ndarray, labels, p: GeneratorParams,
                      tape: Tape | None = None) -> Value:
    """(noise batch, labels) -> synthetic arrays in (-1, 1), flattened."""
    z = np.asarray(z)
    if z.ndim != 2 or z.shape[1] != p.noise_dim:
        raise DimensionError(
            f"noise batch must be (b, {p.noise_dim}), got {z.shape}"
        )
    cond = one_hot(labels, p.num_classes, dtype=z.dtype)
    x = Value(np.concatenate([cond, z], axis=1))
    for layer in p.layers[:-1]:
        x = leaky_relu(dense_forward(x, layer, tape), LEAKY_ALPHA, tape)
    return tanh(dense_forward(x, p.layers[-1], tape), tape)


@dataclass
class DiscriminatorParams:
    input_dim: int
    num_classes: int
    trunk: list[tuple[DenseParams, BatchNormParams]]
    head_s: DenseParams                # width -> 1, sigmoid authenticity
    head_c: DenseParams                # width -> n, softmax class

    def parameters(self) -> list[Param]:
        out: list[Param] = []
        for dense, bn in self.trunk:
            # A bias feeding batch norm is removed exactly by the batch-mean
            # subtraction (beta owns the shift), so it is not trainable.
            out.append(dense.weights)
            out.extend(bn.parameters())
        out.extend(self.head_s.parameters())
        out.extend(self.head_c.parameters())
        return out


def init_discriminator(rng: np.random.Generator, input_dim: int,
                       num_classes: int, hidden=DISC_HIDDEN_DEFAULT,
                       dtype=np.float32) -> DiscriminatorParams:
    trunk = []
    prev = input_dim
    for width in hidden:
        trunk.append((dense_params(rng, prev, width, dtype=dtype),
                      batchnorm_params(width, dtype=dtype)))
        prev = width
    return DiscriminatorParams(
        input_dim=input_dim,
        num_classes=num_classes,
        trunk=trunk,
        head_s=dense_params(rng, prev, 1, dtype=dtype),
        head_c=dense_params(rng, prev, num_classes, dtype=dtype),
    )


def calibrate_batchnorm(p: DiscriminatorParams, x: np.ndarray) -> None:
    """Set trunk running statistics to exact full-dataset moments.

    Momentum-averaged stats lag the weights they were collected under; one
    pass over the (normalized) training set with the final weights pins
    inference-mode normalization to the data the heads were actually fit on.
    Each layer is calibrated under the already-calibrated layers before it.
    """
    h = np.asarray(x)
    for dense, bn in p.trunk:
        pre = h @ dense.weights.data.T + dense.bias.data
        mean = pre.mean(axis=0)
        var = pre.var(axis=0)
        bn.running_mean = mean.astype(bn.running_mean.dtype)
        bn.running_var = var.astype(bn.running_var.dtype)
        norm = (pre - mean) / np.sqrt(var + bn.epsilon)
        act = bn.gamma.data * norm + bn.beta.data
        h = np.where(act >= 0, act, LEAKY_ALPHA * act)


def discriminator_forward(x, p: DiscriminatorParams, mode: str = "infer",
                          tape: Tape | None = None,
                          update_running: bool | None = None
                          ) -> tuple[Value, Value]:
    """One trunk pass, two heads: (realness (b,), class probs (b, n))."""
    if not isinstance(x, Value):
        x = Value(np.asarray(x))
    if x.data.ndim != 2 or x.data.shape[1] != p.input_dim:
        raise DimensionError(
            f"discriminator input must be (b, {p.input_dim}), got {x.data.shape}"
        )
    h = x
    for dense, bn in p.trunk:
        h = dense_forward(h, dense, tape)
        h = batchnorm_forward(h, bn, mode, tape, update_running)
        h = leaky_relu(h, LEAKY_ALPHA, tape)
    realness = reshape(sigmoid(dense_forward(h, p.head_s, tape), tape),
                       (x.data.shape[0],), tape)
    class_probs = softmax(dense_forward(h, p.head_c, tape), tape)
    return realness, class_probs
