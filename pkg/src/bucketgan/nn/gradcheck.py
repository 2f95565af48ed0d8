"""Analytic-vs-numeric gradient verification.

Central finite differences on the loss, compared against the tape's analytic
gradients. 64-bit parameters are required: the difference quotient at
eps=1e-5 has a float32 noise floor far above the 1e-4 target.

The quotient is only a valid oracle where it can certify a gradient at the
requested tolerance, so two kinds of coordinates are excluded:

* unstable ones, where the quotient disagrees with itself between step
  sizes eps and eps/4 (the interval straddles a LeakyReLU kink, or sits at
  the roundoff floor);
* unresolvable ones, where the gradient magnitude is below what the
  stencil's absolute uncertainty can certify at ``target_rtol``.

A wrong analytic gradient is still caught: there the quotient is stable and
simply disagrees with the analytic value.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from bucketgan.nn.tape import Param, Tape, Value, backward, zero_grads

REL_FLOOR = 1e-12
ROUNDOFF_SAFETY = 8.0


def grad_check(loss_fn: Callable[[Tape | None], Value],
               params: list[Param],
               eps: float = 1e-5,
               samples_per_param: int | None = None,
               seed: int = 0,
               target_rtol: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``loss_fn(tape)`` must rebuild the full forward pass and return the
    scalar loss; with ``tape=None`` it must be side-effect free (finite
    difference probes re-evaluate it many times).

    ``samples_per_param`` limits the check to that many randomly chosen
    coordinates per parameter tensor (exhaustive when None); large models are
    checked on a sampled subset, small ones exhaustively.

    ``target_rtol`` is the tolerance the caller intends to assert; it sets
    the floors below which coordinates are skipped as unverifiable, and does
    not itself pass or fail anything.
    """
    for p in params:
        if p.data.dtype != np.float64:
            raise ValueError("grad_check requires float64 parameters, got "
                             f"{p.data.dtype}")

    zero_grads(params)
    tape = Tape()
    loss = loss_fn(tape)
    backward(tape, loss)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy()
                for p in params]
    zero_grads(params)

    # Absolute roundoff of the eps/4 quotient, with margin for error
    # accumulation over the forward pass; below ~this the spread test is
    # meaningless, and gradients smaller than abs_floor/target_rtol cannot
    # be certified at target_rtol at all.
    roundoff = abs(float(loss.data)) * np.finfo(np.float64).eps / (eps / 2.0)
    abs_floor = ROUNDOFF_SAFETY * roundoff
    grad_floor = (4.0 / 3.0) * abs_floor / target_rtol

    def central(flat: np.ndarray, i: int, h: float) -> float:
        orig = flat[i]
        flat[i] = orig + h
        lp = float(loss_fn(None).data)
        flat[i] = orig - h
        lm = float(loss_fn(None).data)
        flat[i] = orig
        return (lp - lm) / (2.0 * h)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, ga in zip(params, analytic):
        flat = p.data.reshape(-1)
        ga_flat = ga.reshape(-1)
        if samples_per_param is None or samples_per_param >= flat.size:
            idx = np.arange(flat.size)
        else:
            idx = rng.choice(flat.size, size=samples_per_param, replace=False)
        for i in idx:
            g_fd = central(flat, i, eps)
            if max(abs(ga_flat[i]), abs(g_fd)) < grad_floor:
                continue        # below what the stencil can certify
            g_fd_small = central(flat, i, eps / 4.0)
            spread = abs(g_fd - g_fd_small)
            scale = max(abs(g_fd), abs(g_fd_small))
            if spread > max(0.5 * target_rtol * scale, abs_floor):
                continue        # quotient unstable here (kink / noise)
            denom = max(abs(ga_flat[i]), abs(g_fd), REL_FLOOR)
            rel = abs(ga_flat[i] - g_fd) / denom
            if rel > worst:
                worst = rel
    return worst
