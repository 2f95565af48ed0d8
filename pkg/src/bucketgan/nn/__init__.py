"""From-scratch dense neural-network engine.

Reverse-mode differentiation is a recorded tape of backward closures: every
forward op that receives a Tape appends the closure that will push gradients
to its inputs, and ``backward`` replays the tape once in reverse order.
"""

from bucketgan.nn.tape import Tape, Value, Param, backward, zero_grads
from bucketgan.nn.ops import (
    DenseParams,
    BatchNormParams,
    dense_params,
    batchnorm_params,
    dense_forward,
    leaky_relu,
    sigmoid,
    tanh,
    softmax,
    batchnorm_forward,
    concat_rows,
    reshape,
    add,
    scale,
    reduce_sum,
)
from bucketgan.nn.losses import bce_loss, cce_loss
from bucketgan.nn.adam import AdamState, adam_step
from bucketgan.nn.gradcheck import grad_check

__all__ = [
    "Tape",
    "Value",
    "Param",
    "backward",
    "zero_grads",
    "DenseParams",
    "BatchNormParams",
    "dense_params",
    "batchnorm_params",
    "dense_forward",
    "leaky_relu",
    "sigmoid",
    "tanh",
    "softmax",
    "batchnorm_forward",
    "concat_rows",
    "reshape",
    "add",
    "scale",
    "reduce_sum",
    "bce_loss",
    "cce_loss",
    "AdamState",
    "adam_step",
    "grad_check",
]
