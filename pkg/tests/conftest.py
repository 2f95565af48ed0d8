"""Shared fixtures: small speckle sequences, glyph datasets, and one trained
checkpoint reused by recognition/latency tests (session-scoped; training it
takes ~half a minute)."""

from __future__ import annotations

import numpy as np
import pytest

from bucketgan.data import make_glyph_targets, normalize_dataset, synth_dataset
from bucketgan.gan import TrainConfig, train
from bucketgan.ghost import generate_speckles


@pytest.fixture(scope="session")
def seq784():
    return generate_speckles(1234, 784, 28, 28)


@pytest.fixture(scope="session")
def four_class_targets():
    # index < 60 is the train pool, the rest held out
    return make_glyph_targets("ABCD", per_class=75, seed=99)


@pytest.fixture(scope="session")
def four_class_sets(seq784, four_class_targets):
    train_pool = [t for t in four_class_targets
                  if int(t.source_id.rsplit(":", 1)[1]) < 60]
    test_pool = [t for t in four_class_targets
                 if int(t.source_id.rsplit(":", 1)[1]) >= 60]
    ds_train = normalize_dataset(synth_dataset(train_pool, seq784))
    ds_test = synth_dataset(test_pool, seq784)
    return ds_train, ds_test


@pytest.fixture(scope="session")
def trained_ckpt(four_class_sets):
    ds_train, _ = four_class_sets
    config = TrainConfig(epochs=60, batch_size=60, seed=7)
    return train(config, ds_train)
