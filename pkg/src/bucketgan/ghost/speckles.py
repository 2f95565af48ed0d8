"""Speckle sequence generation, fingerprinting, and the GSPK file format.

A sequence is fully determined by (seed, distribution, count, height, width);
the GSPK file carries the payload anyway so readers can verify that the
header regenerates it bit-exactly.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from bucketgan.errors import FormatError

GSPK_MAGIC = b"GSPK"
GSPK_VERSION = 1

_DIST_TAGS = {"bernoulli": 0, "uniform": 1}
_TAG_NAMES = {v: k for k, v in _DIST_TAGS.items()}


def parse_distribution(spec: str) -> tuple[str, float]:
    """Parse 'bernoulli:0.5' or 'uniform' into (name, p)."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "uniform":
        if arg:
            raise FormatError(f"uniform distribution takes no parameter: {spec!r}")
        return "uniform", 0.0
    if name == "bernoulli":
        p = float(arg) if arg else 0.5
        if not 0.0 < p < 1.0:
            raise FormatError(f"bernoulli p must be in (0, 1), got {p}")
        return "bernoulli", p
    raise FormatError(f"unknown speckle distribution {spec!r}")


@dataclass
class SpeckleSequence:
    """Ordered stack of illumination patterns plus generation metadata."""

    patterns: np.ndarray        # (count, height, width) float32 in [0, 1]
    seed: int
    distribution: str           # canonical, e.g. "bernoulli:0.5"
    fingerprint: bytes = field(repr=False, default=b"")
    polluted: bool = False

    @property
    def count(self) -> int:
        return self.patterns.shape[0]

    @property
    def height(self) -> int:
        return self.patterns.shape[1]

    @property
    def width(self) -> int:
        return self.patterns.shape[2]

    def flat(self) -> np.ndarray:
        """Patterns flattened row-major to (count, height*width), float64."""
        return self.patterns.reshape(self.count, -1).astype(np.float64)


def _canonical_dist(name: str, p: float) -> str:
    return "uniform" if name == "uniform" else f"bernoulli:{p:g}"


def _header_bytes(seed: int, dist: str, count: int, h: int, w: int) -> bytes:
    name, p = parse_distribution(dist)
    return struct.pack("<4sHQBdIHH", GSPK_MAGIC, GSPK_VERSION, seed,
                       _DIST_TAGS[name], p, count, h, w)


def _fingerprint(header: bytes, payload: bytes, polluted: bool) -> bytes:
    h = hashlib.sha256()
    h.update(header)
    h.update(payload)
    if polluted:
        h.update(b"polluted")
    return h.digest()


def generate_speckles(seed: int, count: int, height: int, width: int,
                      distribution: str = "bernoulli:0.5") -> SpeckleSequence:
    """Deterministically draw ``count`` independent patterns.

    Same arguments always give bit-identical patterns (PCG64 stream keyed by
    the seed alone).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if height < 1 or width < 1:
        raise ValueError(f"pattern dims must be >= 1, got {height}x{width}")
    name, p = parse_distribution(distribution)
    rng = np.random.default_rng(seed)
    draws = rng.random((count, height, width))
    if name == "bernoulli":
        patterns = (draws < p).astype(np.float32)
    else:
        patterns = draws.astype(np.float32)
    dist = _canonical_dist(name, p)
    header = _header_bytes(seed, dist, count, height, width)
    fp = _fingerprint(header, patterns.tobytes(), polluted=False)
    return SpeckleSequence(patterns=patterns, seed=seed, distribution=dist,
                           fingerprint=fp)


def save_speckles(seq: SpeckleSequence, path) -> None:
    """Write the GSPK file: header + float32 little-endian payload."""
    if seq.polluted:
        raise FormatError(
            "polluted sequences are not regenerable from a header and "
            "cannot be saved as GSPK"
        )
    header = _header_bytes(seq.seed, seq.distribution, seq.count,
                           seq.height, seq.width)
    payload = seq.patterns.astype("<f4").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)


def load_speckles(path, verify: bool = True) -> SpeckleSequence:
    """Read a GSPK file; with ``verify`` the header is regenerated and the
    payload compared bit-exactly (a failed compare means a corrupt or
    foreign file)."""
    with open(path, "rb") as f:
        raw = f.read()
    hdr_size = struct.calcsize("<4sHQBdIHH")
    if len(raw) < hdr_size:
        raise FormatError("GSPK file truncated before header end")
    magic, version, seed, tag, p, count, h, w = struct.unpack(
        "<4sHQBdIHH", raw[:hdr_size])
    if magic != GSPK_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {GSPK_MAGIC!r}")
    if version != GSPK_VERSION:
        raise FormatError(f"unsupported GSPK version {version}")
    if tag not in _TAG_NAMES:
        raise FormatError(f"unknown distribution tag {tag}")
    dist = _canonical_dist(_TAG_NAMES[tag], p)
    expected = count * h * w * 4
    payload = raw[hdr_size:]
    if len(payload) != expected:
        raise FormatError(
            f"GSPK payload is {len(payload)} bytes, expected {expected}"
        )
    patterns = np.frombuffer(payload, dtype="<f4").reshape(count, h, w)
    if verify:
        regen = generate_speckles(seed, count, h, w, dist)
        if not np.array_equal(regen.patterns, patterns):
            raise FormatError(
                "GSPK payload does not match regeneration from its header"
            )
        return regen
    header = raw[:hdr_size]
    fp = _fingerprint(header, payload, polluted=False)
    return SpeckleSequence(patterns=patterns.copy(), seed=seed,
                           distribution=dist, fingerprint=fp)
