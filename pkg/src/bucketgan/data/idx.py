"""IDX ubyte file ingestion (the de facto handwritten-digit format).

Big-endian headers: images are 0x00000803 + count + rows + cols, labels are
0x00000801 + count, followed by raw unsigned bytes. Pixels scale to [0, 1].
"""

from __future__ import annotations

import struct

import numpy as np

from bucketgan.errors import FormatError
from bucketgan.ghost.measure import TargetImage

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def load_idx_images(path) -> list[TargetImage]:
    with open(path, "rb") as f:
        head = f.read(16)
        if len(head) < 16:
            raise FormatError("IDX image file truncated before header end")
        magic, count, rows, cols = struct.unpack(">IIII", head)
        if magic != IMAGES_MAGIC:
            raise FormatError(
                f"bad IDX image magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}"
            )
        payload = f.read()
    expected = count * rows * cols
    if len(payload) != expected:
        raise FormatError(
            f"IDX image payload is {len(payload)} bytes, expected {expected}"
        )
    stack = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)
    scaled = stack.astype(np.float64) / 255.0
    return [TargetImage(pixels=scaled[i]) for i in range(count)]


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        head = f.read(8)
        if len(head) < 8:
            raise FormatError("IDX label file truncated before header end")
        magic, count = struct.unpack(">II", head)
        if magic != LABELS_MAGIC:
            raise FormatError(
                f"bad IDX label magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}"
            )
        payload = f.read()
    if len(payload) != count:
        raise FormatError(
            f"IDX label payload is {len(payload)} bytes, expected {count}"
        )
    return np.frombuffer(payload, dtype=np.uint8).astype(np.int64)


def load_labeled_targets(images_path, labels_path):
    """Load a paired image/label file set; counts must agree."""
    from bucketgan.data.synth import LabeledTarget

    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise FormatError(
            f"image count {len(images)} != label count {len(labels)}"
        )
    out = []
    for i, (img, lab) in enumerate(zip(images, labels)):
        img.label = int(lab)
        out.append(LabeledTarget(image=img, label=int(lab),
                                 source_id=f"{images_path}:{i}"))
    return out


def write_idx_images(stack: np.ndarray, path) -> None:
    """Write (n, rows, cols) pixel data in [0, 1] (or uint8) as IDX."""
    stack = np.asarray(stack)
    if stack.dtype != np.uint8:
        stack = np.clip(np.rint(stack * 255.0), 0, 255).astype(np.uint8)
    n, rows, cols = stack.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGES_MAGIC, n, rows, cols))
        f.write(stack.tobytes())


def write_idx_labels(labels, path) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABELS_MAGIC, labels.size))
        f.write(labels.tobytes())
