"""GBDS dataset files: labeled bucket arrays with provenance, CRC-checked.

Layout (little-endian):
  magic "GBDS" | version u16 | num_classes u16 | rows u16 | cols u16 |
  count u32 | speckle fingerprint (32 bytes) | norm min/max f64 (NaN pair
  when unnormalized) | noise tag u16 length + utf8 |
  count records of (label u16, rows*cols float32) | CRC-32 u32 of all bytes
  before it.
"""

from __future__ import annotations

import math
import struct
import zlib

import numpy as np

from bucketgan.errors import FormatError
from bucketgan.data.synth import BucketDataset

GBDS_MAGIC = b"GBDS"
GBDS_VERSION = 1

_HEAD = "<4sHHHHI32sdd"


def save_dataset(ds: BucketDataset, path) -> None:
    if len(ds.speckle_fingerprint) != 32:
        raise FormatError(
            f"fingerprint must be 32 bytes, got {len(ds.speckle_fingerprint)}"
        )
    vmin, vmax = ds.norm_stats if ds.norm_stats is not None else (math.nan, math.nan)
    noise = ds.noise_config.encode("utf-8")
    parts = [
        struct.pack(_HEAD, GBDS_MAGIC, GBDS_VERSION, ds.num_classes,
                    ds.rows, ds.cols, len(ds), ds.speckle_fingerprint,
                    vmin, vmax),
        struct.pack("<H", len(noise)),
        noise,
    ]
    arrays = ds.arrays.astype("<f4")
    for i in range(len(ds)):
        parts.append(struct.pack("<H", int(ds.labels[i])))
        parts.append(arrays[i].tobytes())
    body = b"".join(parts)
    with open(path, "wb") as f:
        f.write(body)
        f.write(struct.pack("<I", zlib.crc32(body)))


def load_dataset(path) -> BucketDataset:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < struct.calcsize(_HEAD) + 4:
        raise FormatError("GBDS file truncated")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) != crc:
        raise FormatError("GBDS checksum mismatch (file corrupt)")
    head_size = struct.calcsize(_HEAD)
    magic, version, num_classes, rows, cols, count, fp, vmin, vmax = \
        struct.unpack(_HEAD, body[:head_size])
    if magic != GBDS_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {GBDS_MAGIC!r}")
    if version > GBDS_VERSION:
        raise FormatError(
            f"GBDS version {version} is newer than supported ({GBDS_VERSION})"
        )
    off = head_size
    (noise_len,) = struct.unpack_from("<H", body, off)
    off += 2
    noise = body[off:off + noise_len].decode("utf-8")
    off += noise_len

    rec_size = 2 + rows * cols * 4
    expected = off + count * rec_size
    if len(body) != expected:
        raise FormatError(
            f"GBDS body is {len(body)} bytes, expected {expected}"
        )
    labels = np.empty(count, dtype=np.int64)
    arrays = np.empty((count, rows, cols), dtype=np.float32)
    for i in range(count):
        (labels[i],) = struct.unpack_from("<H", body, off)
        off += 2
        arrays[i] = np.frombuffer(
            body, dtype="<f4", count=rows * cols, offset=off
        ).reshape(rows, cols)
        off += rows * cols * 4
    stats = None if math.isnan(vmin) else (vmin, vmax)
    return BucketDataset(arrays=arrays, labels=labels, num_classes=num_classes,
                         speckle_fingerprint=fp, noise_config=noise,
                         norm_stats=stats)
