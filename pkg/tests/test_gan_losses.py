import math

import numpy as np
import pytest

from bucketgan.gan.losses import LossBreakdown, discriminator_loss, generator_loss
from bucketgan.gan.models import (
    discriminator_forward,
    init_discriminator,
    init_generator,
    generator_forward,
)


def zero_head_disc(num_classes=4, input_dim=12):
    disc = init_discriminator(np.random.default_rng(0), input_dim,
                              num_classes, hidden=(8,), dtype=np.float64)
    disc.head_s.weights.data[:] = 0.0
    disc.head_s.bias.data[:] = 0.0
    disc.head_c.weights.data[:] = 0.0
    disc.head_c.bias.data[:] = 0.0
    return disc


def planted_disc():
    """Two-feature discriminator: feature 0 encodes realness, feature 1 the
    class, with saturating head weights. Infer mode with unit running stats
    keeps the trunk transparent."""
    disc = init_discriminator(np.random.default_rng(1), 2, 2, hidden=(2,),
                              dtype=np.float64)
    dense, bn = disc.trunk[0]
    dense.weights.data[:] = np.eye(2)
    dense.bias.data[:] = 0.0
    bn.gamma.data[:] = 1.0
    bn.beta.data[:] = 0.0
    bn.running_mean[:] = 0.0
    bn.running_var[:] = 1.0
    disc.head_s.weights.data[:] = np.array([[60.0, 0.0]])
    disc.head_s.bias.data[:] = 0.0
    disc.head_c.weights.data[:] = np.array([[0.0, 60.0], [0.0, -60.0]])
    disc.head_c.bias.data[:] = 0.0
    return disc


class TestDiscriminatorLoss:
    def test_indifferent_outputs_are_ln2_and_lnn(self):
        disc = zero_head_disc(num_classes=4)
        rng = np.random.default_rng(2)
        real = rng.standard_normal((5, 12))
        fake = rng.standard_normal((5, 12))
        _, breakdown = discriminator_loss(
            disc, real, rng.integers(0, 4, 5), fake, rng.integers(0, 4, 5),
            mode="infer")
        assert math.isclose(breakdown.l_s, math.log(2), rel_tol=1e-9)
        assert math.isclose(breakdown.l_c, math.log(4), rel_tol=1e-9)

    def test_perfect_discrimination_hits_floor(self):
        disc = planted_disc()
        # feature 0: +1 real / -1 fake; feature 1: +1 class0 / -1 class1
        real = np.array([[1.0, 1.0], [1.0, -1.0]])
        fake = np.array([[-1.0, 1.0], [-1.0, -1.0]])
        total, breakdown = discriminator_loss(
            disc, real, [0, 1], fake, [0, 1], mode="infer")
        assert float(total.data) <= 1e-5
        assert breakdown.l_s <= 1e-5 and breakdown.l_c <= 1e-5

    def test_matches_hand_computed_formula(self):
        # independent reimplementation of the objective from D's raw outputs
        disc = init_discriminator(np.random.default_rng(3), 6, 3,
                                  hidden=(5,), dtype=np.float64)
        rng = np.random.default_rng(4)
        real = rng.standard_normal((4, 6))
        fake = rng.standard_normal((4, 6))
        real_y = np.array([0, 1, 2, 1])
        fake_y = np.array([2, 0, 1, 0])
        _, breakdown = discriminator_loss(disc, real, real_y, fake, fake_y,
                                          mode="infer")

        rs_r, cp_r = discriminator_forward(real, disc, mode="infer")
        rs_f, cp_f = discriminator_forward(fake, disc, mode="infer")
        l_s = -np.mean(np.concatenate([np.log(rs_r.data),
                                       np.log1p(-rs_f.data)]))
        picked = np.concatenate([cp_r.data[np.arange(4), real_y],
                                 cp_f.data[np.arange(4), fake_y]])
        l_c = -np.mean(np.log(picked))
        assert math.isclose(breakdown.l_s, l_s, rel_tol=1e-9)
        assert math.isclose(breakdown.l_c, l_c, rel_tol=1e-9)

    def test_total_is_sum_of_terms(self):
        disc = zero_head_disc()
        rng = np.random.default_rng(5)
        total, breakdown = discriminator_loss(
            disc, rng.standard_normal((3, 12)), [0, 1, 2],
            rng.standard_normal((3, 12)), [1, 2, 3], mode="infer")
        assert math.isclose(float(total.data), breakdown.total, rel_tol=1e-12)


class TestGeneratorLoss:
    def test_fooled_completely_hits_floor(self):
        disc = planted_disc()
        from bucketgan.nn import Value
        fakes = Value(np.array([[1.0, 1.0], [1.0, -1.0]]))  # read as real
        total, breakdown = generator_loss(disc, fakes, [0, 1], mode="infer")
        assert float(total.data) <= 1e-5

    def test_indifferent_discriminator_gives_ln2_plus_lnn(self):
        disc = zero_head_disc(num_classes=4)
        from bucketgan.nn import Value
        fakes = Value(np.random.default_rng(6).standard_normal((5, 12)))
        total, breakdown = generator_loss(disc, fakes, [0, 1, 2, 3, 0],
                                          mode="infer")
        assert math.isclose(float(total.data), math.log(2) + math.log(4),
                            rel_tol=1e-9)

    def test_class_sign_switch_flips_class_term(self):
        disc = init_discriminator(np.random.default_rng(7), 12, 4,
                                  hidden=(6,), dtype=np.float64)
        from bucketgan.nn import Value
        fakes = Value(np.random.default_rng(8).standard_normal((5, 12)))
        labels = [0, 1, 2, 3, 0]
        t_plus, b_plus = generator_loss(disc, fakes, labels, mode="infer",
                                        class_sign=1.0)
        t_minus, b_minus = generator_loss(disc, fakes, labels, mode="infer",
                                          class_sign=-1.0)
        assert math.isclose(float(t_plus.data), b_plus.l_s + b_plus.l_c,
                            rel_tol=1e-9)
        assert math.isclose(float(t_minus.data), b_minus.l_s - b_minus.l_c,
                            rel_tol=1e-9)
        assert math.isclose(b_plus.l_c, b_minus.l_c, rel_tol=1e-12)


def test_breakdown_total():
    b = LossBreakdown(l_s=0.25, l_c=1.5)
    assert b.total == 1.75
