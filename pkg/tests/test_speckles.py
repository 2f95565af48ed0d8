import numpy as np
import pytest

from bucketgan.errors import FormatError
from bucketgan.ghost import (
    generate_speckles,
    load_speckles,
    parse_distribution,
    pollute_speckles,
    save_speckles,
    turbulence_field,
)


def test_regeneration_is_bit_exact():
    a = generate_speckles(42, 100, 16, 16)
    b = generate_speckles(42, 100, 16, 16)
    assert np.array_equal(a.patterns, b.patterns)
    assert a.fingerprint == b.fingerprint


def test_bernoulli_grand_mean_concentrates():
    # 784*28*28 fair draws: mean is within a few sigma of 0.5
    for seed in (0, 7, 12345):
        seq = generate_speckles(seed, 784, 28, 28)
        assert 0.494 <= float(seq.patterns.mean()) <= 0.506


def test_different_seeds_different_fingerprints():
    a = generate_speckles(1, 10, 8, 8)
    b = generate_speckles(2, 10, 8, 8)
    assert a.fingerprint != b.fingerprint


def test_distributions_differ():
    a = generate_speckles(5, 10, 8, 8, "bernoulli:0.5")
    b = generate_speckles(5, 10, 8, 8, "uniform")
    assert a.fingerprint != b.fingerprint
    assert set(np.unique(a.patterns)) <= {0.0, 1.0}
    assert np.all((b.patterns >= 0) & (b.patterns < 1))


def test_pixels_in_unit_interval():
    seq = generate_speckles(3, 50, 12, 12, "uniform")
    assert np.all(seq.patterns >= 0.0) and np.all(seq.patterns <= 1.0)


def test_parse_distribution():
    assert parse_distribution("bernoulli:0.3") == ("bernoulli", 0.3)
    assert parse_distribution("bernoulli") == ("bernoulli", 0.5)
    assert parse_distribution("uniform") == ("uniform", 0.0)
    with pytest.raises(FormatError):
        parse_distribution("poisson:2")
    with pytest.raises(FormatError):
        parse_distribution("bernoulli:1.5")


def test_invalid_args():
    with pytest.raises(ValueError):
        generate_speckles(0, 0, 8, 8)
    with pytest.raises(ValueError):
        generate_speckles(0, 4, 0, 8)


class TestGspkFile:
    def test_round_trip(self, tmp_path):
        seq = generate_speckles(99, 30, 10, 12, "uniform")
        path = tmp_path / "s.gspk"
        save_speckles(seq, path)
        loaded = load_speckles(path)
        assert np.array_equal(loaded.patterns, seq.patterns)
        assert loaded.fingerprint == seq.fingerprint
        assert loaded.seed == 99
        assert loaded.distribution == "uniform"

    def test_header_regenerates_payload(self, tmp_path):
        seq = generate_speckles(7, 20, 9, 9)
        path = tmp_path / "s.gspk"
        save_speckles(seq, path)
        # verify=True regenerates from the header and compares bit-exactly
        loaded = load_speckles(path, verify=True)
        assert np.array_equal(loaded.patterns, seq.patterns)

    def test_corrupted_payload_detected(self, tmp_path):
        seq = generate_speckles(7, 20, 9, 9)
        path = tmp_path / "s.gspk"
        save_speckles(seq, path)
        raw = bytearray(path.read_bytes())
        raw[-3] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError):
            load_speckles(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "s.gspk"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(FormatError):
            load_speckles(path)

    def test_truncated(self, tmp_path):
        seq = generate_speckles(7, 20, 9, 9)
        path = tmp_path / "s.gspk"
        save_speckles(seq, path)
        path.write_bytes(path.read_bytes()[:40])
        with pytest.raises(FormatError):
            load_speckles(path)

    def test_polluted_sequence_not_saveable(self, tmp_path):
        seq = generate_speckles(7, 20, 9, 9)
        field = turbulence_field(1, (9, 9), 0.1)
        polluted = pollute_speckles(seq, field)
        with pytest.raises(FormatError):
            save_speckles(polluted, tmp_path / "p.gspk")
