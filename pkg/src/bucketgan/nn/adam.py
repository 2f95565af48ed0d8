"""Adam optimizer with bias correction.

The update is computed in place through a preallocated scratch buffer; at
training widths the optimizer would otherwise spend more time allocating
temporaries than the layer GEMMs take.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bucketgan.errors import DimensionError
from bucketgan.nn.tape import Param


@dataclass
class AdamState:
    """First/second moment estimates plus hyperparameters, one slot per
    parameter tensor (order matches the parameter list it was built for)."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8
    _scratch: list[np.ndarray] | None = field(default=None, repr=False)

    @classmethod
    def for_params(cls, params: list[Param], lr: float = 2e-4,
                   beta1: float = 0.5, beta2: float = 0.999,
                   epsilon: float = 1e-8) -> "AdamState":
        return cls(
            m=[np.zeros_like(p.data) for p in params],
            v=[np.zeros_like(p.data) for p in params],
            lr=lr, beta1=beta1, beta2=beta2, epsilon=epsilon,
        )


def adam_step(params: list[Param], grads: list[np.ndarray],
              state: AdamState) -> None:
    """One bias-corrected Adam update, applied to params in place.

    theta -= lr * mhat / (sqrt(vhat) + eps) with mhat = m/(1-b1^t),
    vhat = v/(1-b2^t).
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise DimensionError(
            f"adam_step got {len(params)} params, {len(grads)} grads, "
            f"state for {len(state.m)}"
        )
    if state._scratch is None:
        state._scratch = [np.empty_like(m) for m in state.m]
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** t
    sqrt_bc2 = math.sqrt(1.0 - b2 ** t)
    lr_t = state.lr / bc1
    for p, g, m, v, tmp in zip(params, grads, state.m, state.v, state._scratch):
        if g.shape != p.data.shape:
            raise DimensionError(
                f"gradient shape {g.shape} != parameter shape {p.data.shape}"
            )
        m *= b1
        np.multiply(g, 1.0 - b1, out=tmp)
        m += tmp
        v *= b2
        np.multiply(g, g, out=tmp)
        tmp *= 1.0 - b2
        v += tmp
        # denom = sqrt(vhat) + eps, built in place
        np.sqrt(v, out=tmp)
        tmp /= sqrt_bc2
        tmp += state.epsilon
        np.divide(m, tmp, out=tmp)
        tmp *= lr_t
        p.data -= tmp
