"""Gradient tape: nodes, trainable leaves, and the reverse pass."""

from __future__ import annotations

from typing import Callable

import numpy as np

from bucketgan.errors import TapeError


class Value:
    """An array produced during a forward pass, plus its gradient slot."""

    __slots__ = ("data", "grad")

    def __init__(self, data) -> None:
        self.data = np.asarray(data)
        self.grad: np.ndarray | None = None

    @property
    def shape(self):
        return self.data.shape


class Param(Value):
    """A trainable leaf. Same mechanics as Value; the distinct type lets
    optimizers and serializers enumerate what is learnable."""


def accumulate(node: Value, grad: np.ndarray) -> None:
    """Add ``grad`` into the node's gradient slot (allocating on first use)."""
    if node.grad is None:
        node.grad = np.zeros_like(node.data)
    node.grad += grad


def donate(node: Value, grad: np.ndarray) -> None:
    """Like accumulate, but takes ownership of a freshly computed array.

    Only valid when the caller holds the sole reference to ``grad`` (it may
    be mutated by later accumulations into the same node).
    """
    if node.grad is None:
        node.grad = grad
    else:
        node.grad += grad


class Tape:
    """Ordered record of backward closures for one forward pass.

    Each recorded closure reads the upstream ``.grad`` of the op's output and
    accumulates into the op's inputs. A tape is single-use: the reverse pass
    pops every record exactly once.
    """

    def __init__(self) -> None:
        self._records: list[Callable[[], None]] = []
        self._consumed = False

    def record(self, fn: Callable[[], None]) -> None:
        if self._consumed:
            raise TapeError("cannot record onto a consumed tape")
        self._records.append(fn)

    def __len__(self) -> int:
        return len(self._records)


def backward(tape: Tape, loss: Value, seed: float = 1.0) -> None:
    """Run the reverse pass from a scalar loss, filling ``.grad`` slots.

    Raises TapeError if the tape is empty (no forward recorded) or was
    already consumed.
    """
    if tape._consumed:
        raise TapeError("tape already consumed by a previous backward pass")
    if not tape._records:
        raise TapeError("backward called before any forward op was recorded")
    if loss.data.size != 1:
        raise TapeError(f"loss must be scalar, got shape {loss.data.shape}")
    loss.grad = np.full_like(loss.data, seed)
    for fn in reversed(tape._records):
        fn()
    tape._consumed = True
    tape._records.clear()


def zero_grads(params) -> None:
    for p in params:
        p.grad = None
