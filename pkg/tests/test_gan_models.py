import hashlib
import math

import numpy as np
import pytest

from bucketgan.errors import DimensionError, LabelError
from bucketgan.gan.models import (
    calibrate_batchnorm,
    discriminator_forward,
    generator_forward,
    init_discriminator,
    init_generator,
    one_hot,
)
from bucketgan.gan.losses import discriminator_loss, generator_loss
from bucketgan.nn import Tape, Value, grad_check


@pytest.fixture
def small_models():
    rng = np.random.default_rng(0)
    gen = init_generator(rng, noise_dim=8, num_classes=3, out_dim=16,
                         hidden=(12, 10), dtype=np.float64)
    disc = init_discriminator(rng, input_dim=16, num_classes=3,
                              hidden=(10, 9), dtype=np.float64)
    return gen, disc


class TestOneHot:
    def test_encoding(self):
        out = one_hot([2, 0], 3)
        np.testing.assert_array_equal(out, [[0, 0, 1], [1, 0, 0]])

    def test_range_check(self):
        with pytest.raises(LabelError):
            one_hot([3], 3)
        with pytest.raises(LabelError):
            one_hot([-1], 3)


class TestGenerator:
    def test_output_strictly_inside_tanh_range(self, small_models):
        gen, _ = small_models
        rng = np.random.default_rng(1)
        out = generator_forward(rng.standard_normal((6, 8)),
                                rng.integers(0, 3, 6), gen)
        assert np.all(out.data > -1.0) and np.all(out.data < 1.0)
        assert out.data.shape == (6, 16)

    def test_deterministic(self, small_models):
        gen, _ = small_models
        z = np.random.default_rng(2).standard_normal((4, 8))
        labels = np.array([0, 1, 2, 0])
        a = generator_forward(z, labels, gen).data
        b = generator_forward(z, labels, gen).data
        assert np.array_equal(a, b)

    def test_label_changes_output(self, small_models):
        gen, _ = small_models
        z = np.random.default_rng(3).standard_normal((1, 8))
        a = generator_forward(z, [0], gen).data
        b = generator_forward(z, [1], gen).data
        assert not np.array_equal(a, b)

    def test_bad_noise_dim(self, small_models):
        gen, _ = small_models
        with pytest.raises(DimensionError):
            generator_forward(np.zeros((2, 9)), [0, 1], gen)

    def test_bad_label(self, small_models):
        gen, _ = small_models
        with pytest.raises(LabelError):
            generator_forward(np.zeros((1, 8)), [5], gen)


class TestDiscriminator:
    def test_zero_heads_give_half_and_uniform(self, small_models):
        _, disc = small_models
        disc.head_s.weights.data[:] = 0.0
        disc.head_s.bias.data[:] = 0.0
        disc.head_c.weights.data[:] = 0.0
        disc.head_c.bias.data[:] = 0.0
        x = np.random.default_rng(4).standard_normal((5, 16))
        realness, probs = discriminator_forward(x, disc, mode="infer")
        np.testing.assert_array_equal(realness.data, np.full(5, 0.5))
        np.testing.assert_allclose(probs.data, np.full((5, 3), 1 / 3),
                                   atol=1e-15)

    def test_class_probs_sum_to_one(self, small_models):
        _, disc = small_models
        x = np.random.default_rng(5).standard_normal((7, 16))
        _, probs = discriminator_forward(x, disc, mode="infer")
        np.testing.assert_allclose(probs.data.sum(axis=1), 1.0, atol=1e-12)

    def test_realness_in_open_interval(self, small_models):
        _, disc = small_models
        x = np.random.default_rng(6).standard_normal((7, 16)) * 50
        realness, _ = discriminator_forward(x, disc, mode="infer")
        assert np.all(realness.data > 0.0) and np.all(realness.data < 1.0)

    def test_input_dim_checked(self, small_models):
        _, disc = small_models
        with pytest.raises(DimensionError):
            discriminator_forward(np.zeros((2, 15)), disc)

    def test_trained_fixture_rates_real_above_half(self, trained_ckpt,
                                                   four_class_sets):
        ds_train, _ = four_class_sets
        x = ds_train.arrays.reshape(len(ds_train), -1).astype(np.float32)
        realness, _ = discriminator_forward(x, trained_ckpt.discriminator,
                                            mode="infer")
        assert realness.data.mean() > 0.5


class TestUpdateIsolation:
    @staticmethod
    def _hash(params):
        h = hashlib.sha256()
        for p in params:
            h.update(p.data.tobytes())
        return h.hexdigest()

    def test_d_step_leaves_g_untouched_and_vice_versa(self, small_models):
        from bucketgan.nn import AdamState, adam_step, backward, zero_grads

        gen, disc = small_models
        rng = np.random.default_rng(7)
        adam_g = AdamState.for_params(gen.parameters())
        adam_d = AdamState.for_params(disc.parameters())
        real = rng.standard_normal((4, 16))
        real_y = rng.integers(0, 3, 4)
        z = rng.standard_normal((4, 8))
        y = rng.integers(0, 3, 4)

        # discriminator update must not move generator parameters
        g_before = self._hash(gen.parameters())
        zero_grads(disc.parameters())
        tape = Tape()
        fake = generator_forward(z, y, gen, None)
        total, _ = discriminator_loss(disc, real, real_y, fake.data, y,
                                      mode="train", tape=tape)
        backward(tape, total)
        adam_step(disc.parameters(), [p.grad for p in disc.parameters()],
                  adam_d)
        assert self._hash(gen.parameters()) == g_before

        # generator update (through frozen D) must not move discriminator
        d_before = self._hash(disc.parameters())
        zero_grads(gen.parameters())
        zero_grads(disc.parameters())
        tape = Tape()
        fake = generator_forward(z, y, gen, tape)
        total, _ = generator_loss(disc, fake, y, mode="train", tape=tape)
        backward(tape, total)
        adam_step(gen.parameters(), [p.grad for p in gen.parameters()],
                  adam_g)
        assert self._hash(disc.parameters()) == d_before


def test_calibration_matches_infer_forward(small_models):
    _, disc = small_models
    x = np.random.default_rng(8).standard_normal((64, 16))
    calibrate_batchnorm(disc, x)
    # after calibration, infer-mode trunk stats equal the data moments
    pre = x @ disc.trunk[0][0].weights.data.T + disc.trunk[0][0].bias.data
    np.testing.assert_allclose(disc.trunk[0][1].running_mean,
                               pre.mean(axis=0), atol=1e-9)
    np.testing.assert_allclose(disc.trunk[0][1].running_var,
                               pre.var(axis=0), atol=1e-9)


def test_composite_gradcheck_small_gan(small_models):
    gen, disc = small_models
    rng = np.random.default_rng(9)
    z = rng.standard_normal((4, 8))
    y = rng.integers(0, 3, 4)
    real = rng.uniform(-1, 1, (4, 16))
    real_y = rng.integers(0, 3, 4)

    def d_fn(tape):
        fake = generator_forward(z, y, gen, None)
        return discriminator_loss(disc, real, real_y, fake.data, y,
                                  mode="train", tape=tape)[0]

    def g_fn(tape):
        fake = generator_forward(z, y, gen, tape)
        return generator_loss(disc, fake, y, mode="train", tape=tape)[0]

    assert grad_check(d_fn, disc.parameters(), eps=1e-5) <= 1e-4
    assert grad_check(g_fn, gen.parameters(), eps=1e-5) <= 1e-4
