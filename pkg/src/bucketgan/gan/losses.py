"""Adversarial objectives, split into source and class terms.

The discriminator drives both terms down: authenticity BCE (real -> 1,
fake -> 0) plus class CCE on real and fake samples with their conditioning
labels. The generator's default objective is the usual auxiliary-classifier
form: make fakes read as real AND classify as their conditioning label
(non-saturating). ``class_sign=-1`` flips the class term for the alternative
sign convention; see TrainConfig.objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bucketgan.nn import Tape, Value, add, bce_loss, cce_loss, concat_rows, scale
from bucketgan.gan.models import DiscriminatorParams, discriminator_forward


@dataclass
class LossBreakdown:
    """Source (authenticity) and class terms of one objective evaluation."""

    l_s: float
    l_c: float

    @property
    def total(self) -> float:
        return self.l_s + self.l_c


def discriminator_loss(p: DiscriminatorParams, real_x, real_labels,
                       fake_x, fake_labels, mode: str = "train",
                       tape: Tape | None = None) -> tuple[Value, LossBreakdown]:
    """Combined discriminator objective over one real and one fake batch.

    Side-effect free (running batch-norm stats untouched); the training loop
    owns state updates.
    """
    if not isinstance(real_x, Value):
        real_x = Value(np.asarray(real_x))
    if not isinstance(fake_x, Value):
        fake_x = Value(np.asarray(fake_x))
    rs_real, cp_real = discriminator_forward(real_x, p, mode, tape,
                                             update_running=False)
    rs_fake, cp_fake = discriminator_forward(fake_x, p, mode, tape,
                                             update_running=False)
    realness = concat_rows(rs_real, rs_fake, tape)
    targets = np.concatenate([
        np.ones(real_x.data.shape[0]),
        np.zeros(fake_x.data.shape[0]),
    ]).astype(realness.data.dtype)
    l_s = bce_loss(realness, targets, tape)

    probs = concat_rows(cp_real, cp_fake, tape)
    labels = np.concatenate([np.asarray(real_labels), np.asarray(fake_labels)])
    l_c = cce_loss(probs, labels, tape)

    total = add(l_s, l_c, tape)
    return total, LossBreakdown(l_s=float(l_s.data), l_c=float(l_c.data))


def generator_loss(d_params: DiscriminatorParams, fake_x: Value, fake_labels,
                   mode: str = "train", tape: Tape | None = None,
                   class_sign: float = 1.0) -> tuple[Value, LossBreakdown]:
    """Generator objective through a frozen discriminator.

    ``fake_x`` must be the generator's output Value so gradients flow back
    into the generator when a tape is given.
    """
    realness, class_probs = discriminator_forward(fake_x, d_params, mode,
                                                  tape, update_running=False)
    l_s = bce_loss(realness,
                   np.ones(fake_x.data.shape[0], dtype=realness.data.dtype),
                   tape)
    l_c = cce_loss(class_probs, fake_labels, tape)
    if class_sign == 1.0:
        total = add(l_s, l_c, tape)
    else:
        total = add(l_s, scale(l_c, class_sign, tape), tape)
    return total, LossBreakdown(l_s=float(l_s.data), l_c=float(l_c.data))
