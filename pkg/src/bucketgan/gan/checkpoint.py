"""GRCK checkpoint files: full trainable state with CRC validation.

Layout (little-endian):
  magic "GRCK" | version u16 | speckle fingerprint (32 bytes) |
  config JSON block (u32 length + utf8) | parameter/state tensors, each as
  dtype u8 (4=f32, 8=f64) + ndim u8 + dims u32[ndim] + raw data |
  loss history (u32 epochs, 4 x f64 per epoch) | CRC-32 u32.

Tensor order: generator layers (W, b per layer); discriminator trunk
(W, b, gamma, beta, running mean, running var per layer); authenticity head
(W, b); class head (W, b); Adam moments for the generator then the
discriminator parameter lists (m then v per parameter, plus step counts in
the JSON block).
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from io import BytesIO
from typing import Optional

import numpy as np

from bucketgan.errors import FormatError
from bucketgan.nn import AdamState, Param
from bucketgan.gan.losses import LossBreakdown
from bucketgan.gan.models import (
    DiscriminatorParams,
    GeneratorParams,
    init_discriminator,
    init_generator,
)

GRCK_MAGIC = b"GRCK"
GRCK_VERSION = 1

_DTYPES = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


@dataclass
class Checkpoint:
    generator: GeneratorParams
    discriminator: DiscriminatorParams
    adam_g: AdamState
    adam_d: AdamState
    config: "TrainConfig"                       # noqa: F821
    speckle_fingerprint: bytes
    norm_stats: tuple[float, float]
    rows: int
    cols: int
    num_classes: int
    epoch: int = 0
    history: list[tuple[LossBreakdown, LossBreakdown]] = field(
        default_factory=list)


def _write_tensor(buf: BytesIO, arr: np.ndarray) -> None:
    size = arr.dtype.itemsize
    if size not in _DTYPES:
        raise FormatError(f"unsupported tensor dtype {arr.dtype}")
    buf.write(struct.pack("<BB", size, arr.ndim))
    buf.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    buf.write(np.ascontiguousarray(arr, dtype=_DTYPES[size]).tobytes())


def _read_tensor(buf: BytesIO) -> np.ndarray:
    head = buf.read(2)
    if len(head) < 2:
        raise FormatError("checkpoint truncated inside tensor header")
    size, ndim = struct.unpack("<BB", head)
    if size not in _DTYPES:
        raise FormatError(f"unknown tensor dtype tag {size}")
    dims = struct.unpack(f"<{ndim}I", buf.read(4 * ndim))
    count = int(np.prod(dims)) if dims else 1
    raw = buf.read(count * size)
    if len(raw) != count * size:
        raise FormatError("checkpoint truncated inside tensor data")
    return np.frombuffer(raw, dtype=_DTYPES[size]).reshape(dims).copy()


def _all_tensors(ckpt: Checkpoint) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for layer in ckpt.generator.layers:
        out += [layer.weights.data, layer.bias.data]
    for dense, bn in ckpt.discriminator.trunk:
        out += [dense.weights.data, dense.bias.data, bn.gamma.data,
                bn.beta.data, bn.running_mean, bn.running_var]
    for head in (ckpt.discriminator.head_s, ckpt.discriminator.head_c):
        out += [head.weights.data, head.bias.data]
    for state in (ckpt.adam_g, ckpt.adam_d):
        out += list(state.m)
        out += list(state.v)
    return out


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    if not ckpt.speckle_fingerprint or len(ckpt.speckle_fingerprint) != 32:
        raise FormatError("checkpoint requires a 32-byte speckle fingerprint")
    from dataclasses import asdict

    meta = {
        "config": asdict(ckpt.config),
        "rows": ckpt.rows,
        "cols": ckpt.cols,
        "num_classes": ckpt.num_classes,
        "norm_stats": list(ckpt.norm_stats),
        "epoch": ckpt.epoch,
        "adam_g_step": ckpt.adam_g.step,
        "adam_d_step": ckpt.adam_d.step,
    }
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    buf = BytesIO()
    buf.write(struct.pack("<4sH", GRCK_MAGIC, GRCK_VERSION))
    buf.write(ckpt.speckle_fingerprint)
    buf.write(struct.pack("<I", len(blob)))
    buf.write(blob)
    for arr in _all_tensors(ckpt):
        _write_tensor(buf, arr)
    buf.write(struct.pack("<I", len(ckpt.history)))
    for d_loss, g_loss in ckpt.history:
        buf.write(struct.pack("<4d", d_loss.l_s, d_loss.l_c,
                              g_loss.l_s, g_loss.l_c))
    body = buf.getvalue()
    with open(path, "wb") as f:
        f.write(body)
        f.write(struct.pack("<I", zlib.crc32(body)))


def load_checkpoint(path) -> Checkpoint:
    from bucketgan.gan.train import TrainConfig

    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 10:
        raise FormatError("checkpoint file truncated")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) != crc:
        raise FormatError("checkpoint checksum mismatch (file corrupt)")
    buf = BytesIO(body)
    magic, version = struct.unpack("<4sH", buf.read(6))
    if magic != GRCK_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {GRCK_MAGIC!r}")
    if version > GRCK_VERSION:
        raise FormatError(
            f"checkpoint version {version} is newer than supported "
            f"({GRCK_VERSION})"
        )
    fingerprint = buf.read(32)
    if len(fingerprint) != 32 or fingerprint == b"\x00" * 32:
        raise FormatError("checkpoint has no valid speckle fingerprint")
    (blob_len,) = struct.unpack("<I", buf.read(4))
    meta = json.loads(buf.read(blob_len).decode("utf-8"))
    config = TrainConfig(**meta["config"])

    rows, cols = meta["rows"], meta["cols"]
    num_classes = meta["num_classes"]
    input_dim = rows * cols
    rng = np.random.default_rng(0)      # shapes only; data overwritten below
    gen = init_generator(rng, config.noise_dim, num_classes, input_dim,
                         hidden=config.gen_hidden, dtype=config.dtype)
    disc = init_discriminator(rng, input_dim, num_classes,
                              hidden=config.disc_hidden, dtype=config.dtype)
    adam_g = AdamState.for_params(gen.parameters(), lr=config.lr,
                                  beta1=config.beta1, beta2=config.beta2,
                                  epsilon=config.adam_epsilon)
    adam_d = AdamState.for_params(disc.parameters(), lr=config.lr,
                                  beta1=config.beta1, beta2=config.beta2,
                                  epsilon=config.adam_epsilon)
    adam_g.step = meta["adam_g_step"]
    adam_d.step = meta["adam_d_step"]

    ckpt = Checkpoint(
        generator=gen, discriminator=disc, adam_g=adam_g, adam_d=adam_d,
        config=config, speckle_fingerprint=fingerprint,
        norm_stats=tuple(meta["norm_stats"]), rows=rows, cols=cols,
        num_classes=num_classes, epoch=meta["epoch"],
    )
    for arr in _all_tensors(ckpt):
        loaded = _read_tensor(buf)
        if loaded.shape != arr.shape:
            raise FormatError(
                f"tensor shape {loaded.shape} does not match expected "
                f"{arr.shape}"
            )
        arr[...] = loaded
    (n_hist,) = struct.unpack("<I", buf.read(4))
    for _ in range(n_hist):
        ls_d, lc_d, ls_g, lc_g = struct.unpack("<4d", buf.read(32))
        ckpt.history.append((LossBreakdown(ls_d, lc_d),
                             LossBreakdown(ls_g, lc_g)))
    if buf.read(1):
        raise FormatError("trailing bytes after checkpoint history")
    return ckpt
