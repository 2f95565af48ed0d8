"""Adversarial training loop.

Per batch: one discriminator update on real samples, one on fresh fakes,
then one generator update through the frozen discriminator. All randomness
(shuffling, noise draws, conditioning labels) flows from per-epoch child
seeds of the config seed, so a single-threaded run is bit-reproducible.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from bucketgan.errors import ConfigError, NumericsError
from bucketgan.nn import (
    AdamState,
    Tape,
    Value,
    adam_step,
    add,
    backward,
    bce_loss,
    cce_loss,
    zero_grads,
)
from bucketgan.data.synth import BucketDataset
from bucketgan.gan.checkpoint import Checkpoint
from bucketgan.gan.losses import LossBreakdown, generator_loss
from bucketgan.gan.models import (
    DISC_HIDDEN_DEFAULT,
    GEN_HIDDEN_DEFAULT,
    DiscriminatorParams,
    GeneratorParams,
    calibrate_batchnorm,
    discriminator_forward,
    generator_forward,
    init_discriminator,
    init_generator,
)

OBJECTIVES = ("acgan", "source-minus-class")


@dataclass
class TrainConfig:
    epochs: int
    batch_size: int = 64
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    noise_dim: int = 100
    seed: int = 0
    precision: str = "float32"
    objective: str = "acgan"
    gen_hidden: tuple[int, ...] = GEN_HIDDEN_DEFAULT
    disc_hidden: tuple[int, ...] = DISC_HIDDEN_DEFAULT

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 2:
            raise ConfigError(
                f"batch_size must be >= 2 (batch norm), got {self.batch_size}"
            )
        if self.lr <= 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {v}")
        if self.noise_dim < 1:
            raise ConfigError(f"noise_dim must be >= 1, got {self.noise_dim}")
        if self.precision not in ("float32", "float64"):
            raise ConfigError(f"precision must be float32/float64, "
                              f"got {self.precision!r}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(
                f"objective must be one of {OBJECTIVES}, got {self.objective!r}"
            )
        self.gen_hidden = tuple(self.gen_hidden)
        self.disc_hidden = tuple(self.disc_hidden)

    @property
    def dtype(self):
        return np.float32 if self.precision == "float32" else np.float64

    @property
    def class_sign(self) -> float:
        return 1.0 if self.objective == "acgan" else -1.0


def _mean_breakdown(items: list[LossBreakdown]) -> LossBreakdown:
    return LossBreakdown(
        l_s=float(np.mean([b.l_s for b in items])),
        l_c=float(np.mean([b.l_c for b in items])),
    )


def train_epoch(gen: GeneratorParams, disc: DiscriminatorParams,
                adam_g: AdamState, adam_d: AdamState,
                x: np.ndarray, labels: np.ndarray,
                config: TrainConfig,
                rng: np.random.Generator) -> tuple[LossBreakdown, LossBreakdown]:
    """One full pass over (x, labels); returns mean D and G loss breakdowns.

    ``x`` is the flattened normalized training data, (n, input_dim).
    """
    n = x.shape[0]
    num_classes = disc.num_classes
    gen_params = gen.parameters()
    disc_params = disc.parameters()
    order = rng.permutation(n)
    d_losses: list[LossBreakdown] = []
    g_losses: list[LossBreakdown] = []

    for start in range(0, n, config.batch_size):
        idx = order[start:start + config.batch_size]
        b = idx.size
        if b < 2:
            # Batch norm cannot normalize a single sample; fold the leftover
            # into the next epoch's shuffle instead.
            continue

        # (1) discriminator on real samples
        zero_grads(disc_params)
        tape = Tape()
        rs, cp = discriminator_forward(Value(x[idx]), disc, "train", tape,
                                       update_running=True)
        l_s_real = bce_loss(rs, np.ones(b, dtype=rs.data.dtype), tape)
        l_c_real = cce_loss(cp, labels[idx], tape)
        backward(tape, add(l_s_real, l_c_real, tape))
        adam_step(disc_params, [p.grad for p in disc_params], adam_d)

        # (2) discriminator on fresh fakes (generator not recorded)
        z = rng.standard_normal((b, config.noise_dim), dtype=np.float64)
        z = z.astype(config.dtype)
        y_fake = rng.integers(0, num_classes, size=b)
        fake = generator_forward(z, y_fake, gen, tape=None)
        zero_grads(disc_params)
        tape = Tape()
        # Running batch-norm stats track real batches only; folding fake-batch
        # statistics in would skew inference-mode normalization of real data.
        rs_f, cp_f = discriminator_forward(Value(fake.data), disc, "train",
                                           tape, update_running=False)
        l_s_fake = bce_loss(rs_f, np.zeros(b, dtype=rs_f.data.dtype), tape)
        l_c_fake = cce_loss(cp_f, y_fake, tape)
        backward(tape, add(l_s_fake, l_c_fake, tape))
        adam_step(disc_params, [p.grad for p in disc_params], adam_d)

        # (3) generator through the frozen discriminator
        z_g = rng.standard_normal((b, config.noise_dim), dtype=np.float64)
        z_g = z_g.astype(config.dtype)
        y_g = rng.integers(0, num_classes, size=b)
        zero_grads(gen_params)
        zero_grads(disc_params)
        tape = Tape()
        fake_g = generator_forward(z_g, y_g, gen, tape)
        g_total, g_break = generator_loss(disc, fake_g, y_g, "train", tape,
                                          class_sign=config.class_sign)
        backward(tape, g_total)
        adam_step(gen_params, [p.grad for p in gen_params], adam_g)

        d_losses.append(LossBreakdown(
            l_s=0.5 * (float(l_s_real.data) + float(l_s_fake.data)),
            l_c=0.5 * (float(l_c_real.data) + float(l_c_fake.data)),
        ))
        g_losses.append(g_break)

    if not d_losses:
        raise ConfigError(
            f"no usable batch: dataset of {n} samples with batch_size "
            f"{config.batch_size}"
        )
    return _mean_breakdown(d_losses), _mean_breakdown(g_losses)


EpochCallback = Callable[[int, Checkpoint], None]


def train(config: TrainConfig, dataset: BucketDataset,
          on_epoch: Optional[EpochCallback] = None,
          callback_epochs: Optional[set[int]] = None) -> Checkpoint:
    """Train on a normalized dataset and return the final checkpoint.

    ``on_epoch(epoch, snapshot)`` fires after the listed epochs (all epochs
    when ``callback_epochs`` is None) with an independent parameter snapshot,
    usable for periodic checkpointing or accuracy-vs-epoch evaluation.
    """
    if dataset.norm_stats is None:
        raise ConfigError("train requires a normalized dataset "
                          "(run normalize_dataset first)")
    if not dataset.speckle_fingerprint:
        raise ConfigError("dataset has no speckle fingerprint")
    if config.batch_size > len(dataset):
        raise ConfigError(
            f"batch_size {config.batch_size} exceeds dataset size "
            f"{len(dataset)}"
        )
    input_dim = dataset.rows * dataset.cols
    x = dataset.arrays.reshape(len(dataset), input_dim).astype(config.dtype)
    labels = dataset.labels

    root = np.random.SeedSequence(config.seed)
    init_rng = np.random.default_rng(root.spawn(1)[0])
    gen = init_generator(init_rng, config.noise_dim, dataset.num_classes,
                         input_dim, hidden=config.gen_hidden,
                         dtype=config.dtype)
    disc = init_discriminator(init_rng, input_dim, dataset.num_classes,
                              hidden=config.disc_hidden, dtype=config.dtype)
    adam_g = AdamState.for_params(gen.parameters(), lr=config.lr,
                                  beta1=config.beta1, beta2=config.beta2,
                                  epsilon=config.adam_epsilon)
    adam_d = AdamState.for_params(disc.parameters(), lr=config.lr,
                                  beta1=config.beta1, beta2=config.beta2,
                                  epsilon=config.adam_epsilon)

    history: list[tuple[LossBreakdown, LossBreakdown]] = []
    ckpt = Checkpoint(
        generator=gen, discriminator=disc, adam_g=adam_g, adam_d=adam_d,
        config=config, speckle_fingerprint=dataset.speckle_fingerprint,
        norm_stats=dataset.norm_stats, rows=dataset.rows, cols=dataset.cols,
        num_classes=dataset.num_classes, epoch=0, history=history,
    )
    for epoch in range(1, config.epochs + 1):
        rng = np.random.default_rng(root.spawn(1)[0])
        d_loss, g_loss = train_epoch(gen, disc, adam_g, adam_d, x, labels,
                                     config, rng)
        if not (np.isfinite(d_loss.total) and np.isfinite(g_loss.total)):
            raise NumericsError(
                f"non-finite loss at epoch {epoch}: D={d_loss}, G={g_loss}"
            )
        history.append((d_loss, g_loss))
        ckpt.epoch = epoch
        if on_epoch is not None and (callback_epochs is None
                                     or epoch in callback_epochs):
            snapshot = copy.deepcopy(ckpt)
            calibrate_batchnorm(snapshot.discriminator, x)
            on_epoch(epoch, snapshot)
    if config.epochs > 0:
        calibrate_batchnorm(disc, x)
    return ckpt
