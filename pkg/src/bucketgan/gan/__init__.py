"""Label-conditioned GAN over bucket-signal arrays.

The generator maps (noise, one-hot label) to a synthetic array; the
discriminator shares one dense trunk between a sigmoid authenticity head and
a softmax class head. Recognition uses only the class head at inference.
"""

from bucketgan.gan.models import (
    GeneratorParams,
    DiscriminatorParams,
    init_generator,
    init_discriminator,
    generator_forward,
    discriminator_forward,
    one_hot,
)
from bucketgan.gan.losses import (
    LossBreakdown,
    discriminator_loss,
    generator_loss,
)
from bucketgan.gan.train import TrainConfig, train_epoch, train
from bucketgan.gan.checkpoint import Checkpoint, save_checkpoint, load_checkpoint

__all__ = [
    "GeneratorParams",
    "DiscriminatorParams",
    "init_generator",
    "init_discriminator",
    "generator_forward",
    "discriminator_forward",
    "one_hot",
    "LossBreakdown",
    "discriminator_loss",
    "generator_loss",
    "TrainConfig",
    "train_epoch",
    "train",
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
]
