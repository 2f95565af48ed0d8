import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bucketgan.errors import DimensionError
from bucketgan.ghost import (
    TargetImage,
    bucket_signal,
    fold_to_array,
    generate_speckles,
    measure_sequence,
    measure_targets,
)
from bucketgan.ghost.speckles import SpeckleSequence


def target(pixels):
    return TargetImage(pixels=np.asarray(pixels, dtype=np.float64))


class TestBucketSignal:
    def test_zero_target(self):
        s = np.ones((3, 3))
        assert bucket_signal(s, target(np.zeros((3, 3)))) == 0.0

    def test_all_ones_pattern_sums_target(self):
        t = target([[0.1, 0.2], [0.3, 0.4]])
        assert bucket_signal(np.ones((2, 2)), t) == pytest.approx(1.0, abs=1e-12)

    def test_two_term_dot_product(self):
        s = np.array([[1.0, 0.0], [0.0, 1.0]])
        t = target([[0.2, 0.3], [0.4, 0.5]])
        assert bucket_signal(s, t) == pytest.approx(0.7, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            bucket_signal(np.ones((2, 3)), target(np.ones((3, 2))))


class TestMeasureSequence:
    @settings(max_examples=25, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**16))
    def test_linearity(self, a, b, seed):
        seq = generate_speckles(11, 16, 4, 4)
        rng = np.random.default_rng(seed)
        t1 = rng.random((4, 4))
        t2 = rng.random((4, 4))
        combined = measure_sequence(seq, target(a * t1 + b * t2))
        separate = a * measure_sequence(seq, target(t1)) \
            + b * measure_sequence(seq, target(t2))
        np.testing.assert_allclose(combined, separate, atol=1e-9)

    def test_canonical_basis_reads_out_target(self):
        # pattern i lights exactly pixel i: measurement = flattened target
        n = 9
        patterns = np.eye(n, dtype=np.float32).reshape(n, 3, 3)
        seq = SpeckleSequence(patterns=patterns, seed=0,
                              distribution="bernoulli:0.5", fingerprint=b"x" * 32)
        t = np.random.default_rng(1).random((3, 3))
        np.testing.assert_array_equal(measure_sequence(seq, target(t)),
                                      t.reshape(-1))

    def test_deterministic(self):
        seq = generate_speckles(5, 49, 7, 7)
        t = target(np.random.default_rng(2).random((7, 7)))
        a = measure_sequence(seq, t)
        b = measure_sequence(seq, t)
        assert np.array_equal(a, b)

    def test_distinct_targets_distinct_measurements(self):
        seq = generate_speckles(8, 784, 28, 28)
        rng = np.random.default_rng(3)
        t1 = (rng.random((28, 28)) > 0.7).astype(float)
        t2 = (rng.random((28, 28)) > 0.7).astype(float)
        assert not np.array_equal(measure_sequence(seq, target(t1)),
                                  measure_sequence(seq, target(t2)))

    def test_orthonormal_basis_reconstructs_exactly(self):
        # independent oracle for the forward model: for orthonormal rows,
        # sum_i B_i * s_i recovers the target to float precision
        rng = np.random.default_rng(4)
        q, _ = np.linalg.qr(rng.normal(size=(16, 16)))
        patterns = q.T.reshape(16, 4, 4)       # rows orthonormal
        seq = SpeckleSequence(patterns=patterns, seed=0,
                              distribution="uniform", fingerprint=b"y" * 32)
        t = rng.random((4, 4))
        buckets = measure_sequence(seq, target(t))
        recon = np.tensordot(buckets, patterns, axes=1)
        np.testing.assert_allclose(recon, t, atol=1e-9)

    def test_measure_targets_matches_singles(self):
        seq = generate_speckles(6, 25, 5, 5)
        rng = np.random.default_rng(5)
        stack = rng.random((4, 5, 5))
        batch = measure_targets(seq, stack)
        for i in range(4):
            np.testing.assert_allclose(
                batch[i], measure_sequence(seq, target(stack[i])), atol=1e-12)

    def test_dim_mismatch(self):
        seq = generate_speckles(5, 16, 4, 4)
        with pytest.raises(DimensionError):
            measure_sequence(seq, target(np.ones((5, 5))))


class TestFold:
    def test_row_major_definition(self):
        v = np.arange(784, dtype=np.float64)
        arr = fold_to_array(v, 28, 28)
        for r, c in ((0, 0), (3, 7), (27, 27)):
            assert arr.values[r, c] == 28 * r + c

    def test_fold_then_flatten_is_identity(self):
        v = np.random.default_rng(0).random(60)
        arr = fold_to_array(v, 6, 10)
        np.testing.assert_array_equal(arr.values.reshape(-1), v)

    def test_physical_scale_shape(self):
        arr = fold_to_array(np.zeros(100), 10, 10)
        assert (arr.rows, arr.cols) == (10, 10)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            fold_to_array(np.zeros(99), 10, 10)
