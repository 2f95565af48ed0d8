"""Procedural handwriting-like glyph targets.

A built-in 5x7 bitmap font is upscaled onto the measurement grid with a
per-character geometry (stroke aspect differs letter to letter, glyphs sit
on a common baseline) and jittered per sample: stroke thickness, small
rotation, one-pixel translation, optional blur, amplitude. That yields
unlimited distinct labeled instances per class without shipping or
downloading a handwriting corpus, at a class separation comparable to
center-normalized handwriting. Everything is deterministic in the seed.
"""

from __future__ import annotations

import numpy as np

from bucketgan.ghost.measure import TargetImage

# Rows top-to-bottom, 5 bits per row.
FONT: dict[str, tuple[str, ...]] = {
    "A": ("00100", "01010", "01010", "10001", "11111", "10001", "10001"),
    "B": ("11110", "10001", "10001", "11110", "10001", "10001", "11110"),
    "C": ("01110", "10001", "10000", "10000", "10000", "10001", "01110"),
    "D": ("11100", "10010", "10001", "10001", "10001", "10010", "11100"),
    "E": ("11111", "10000", "10000", "11110", "10000", "10000", "11111"),
    "F": ("11111", "10000", "10000", "11110", "10000", "10000", "10000"),
    "G": ("01111", "10000", "10000", "10110", "10001", "10001", "01110"),
    "H": ("10001", "10001", "10001", "11111", "10001", "10001", "10001"),
    "I": ("01110", "00100", "00100", "00100", "00100", "00100", "01110"),
    "J": ("00111", "00010", "00010", "00010", "00010", "10010", "01100"),
    "K": ("10001", "10010", "10100", "11000", "10100", "10010", "10001"),
    "L": ("10000", "10000", "10000", "10000", "10000", "10000", "11111"),
    "M": ("10001", "11011", "10101", "10101", "10001", "10001", "10001"),
    "N": ("10001", "10001", "11001", "10101", "10011", "10001", "10001"),
    "O": ("01110", "10001", "10001", "10001", "10001", "10001", "01110"),
    "P": ("11110", "10001", "10001", "11110", "10000", "10000", "10000"),
    "Q": ("01110", "10001", "10001", "10001", "10101", "10010", "01101"),
    "R": ("11110", "10001", "10001", "11110", "10100", "10010", "10001"),
    "S": ("01111", "10000", "10000", "01110", "00001", "00001", "11110"),
    "T": ("11111", "00100", "00100", "00100", "00100", "00100", "00100"),
    "U": ("10001", "10001", "10001", "10001", "10001", "10001", "01110"),
    "V": ("10001", "10001", "10001", "10001", "10001", "01010", "00100"),
    "W": ("10001", "10001", "10001", "10101", "10101", "10101", "01010"),
    "X": ("10001", "10001", "01010", "00100", "01010", "10001", "10001"),
    "Y": ("10001", "10001", "10001", "01010", "00100", "00100", "00100"),
    "Z": ("11111", "00001", "00010", "00100", "01000", "10000", "11111"),
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
}

# Per-character stroke geometry (width scale, height scale): letters differ
# in aspect the way handwritten ones do, which also keeps look-alike pairs
# (C/G, A/H, G/8, D/0) from collapsing onto each other.
STYLE: dict[str, tuple[int, int]] = {
    "A": (2, 3), "B": (2, 2), "C": (3, 3), "D": (3, 2), "E": (3, 3),
    "F": (2, 3), "G": (2, 3), "H": (2, 3), "I": (3, 3), "J": (2, 2),
    "K": (2, 3), "L": (2, 2), "M": (3, 2), "N": (2, 3), "O": (3, 3),
    "P": (2, 2), "Q": (3, 3), "R": (2, 3), "S": (2, 2), "T": (3, 2),
    "U": (2, 3), "V": (3, 2), "W": (3, 2), "X": (2, 3), "Y": (3, 2),
    "Z": (2, 2),
    "0": (2, 3), "1": (2, 3), "2": (3, 2), "3": (2, 2), "4": (3, 3),
    "5": (2, 2), "6": (3, 2), "7": (3, 2), "8": (3, 3), "9": (3, 2),
}

_BASELINE_MARGIN = 5        # baseline rows above the bottom on a 28 grid


def _bitmap(char: str) -> np.ndarray:
    try:
        rows = FONT[char.upper()]
    except KeyError:
        raise KeyError(f"no glyph for character {char!r}") from None
    return np.array([[int(b) for b in row] for row in rows], dtype=np.float64)


def _style(char: str, size: int) -> tuple[int, int]:
    wscale, hscale = STYLE[char.upper()]
    # shrink per axis until the glyph fits small grids
    while wscale > 1 and 5 * wscale > size - 2:
        wscale -= 1
    while hscale > 1 and 7 * hscale > size - 2:
        hscale -= 1
    return wscale, hscale


def _dilate4(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    out[1:, :] = np.maximum(out[1:, :], m[:-1, :])
    out[:-1, :] = np.maximum(out[:-1, :], m[1:, :])
    out[:, 1:] = np.maximum(out[:, 1:], m[:, :-1])
    out[:, :-1] = np.maximum(out[:, :-1], m[:, 1:])
    return out


def _box_blur(m: np.ndarray) -> np.ndarray:
    padded = np.pad(m, 1)
    acc = np.zeros_like(m)
    for dr in range(3):
        for dc in range(3):
            acc += padded[dr:dr + m.shape[0], dc:dc + m.shape[1]]
    return acc / 9.0


def glyph_image(char: str, rng: np.random.Generator | None = None,
                size: int = 28, rot_jitter: float = 7.0) -> np.ndarray:
    """One glyph on a size x size grid; jittered when rng is given."""
    wscale, hscale = _style(char, size)
    block = np.kron(_bitmap(char), np.ones((hscale, wscale)))
    bh, bw = block.shape
    if bh > size or bw > size:
        raise ValueError(f"glyph block {bh}x{bw} does not fit in {size}x{size}")

    if rng is None:
        dy = dx = 0
        angle = 0.0
        blurred = True
        amplitude = 1.0
    else:
        # jitter regime mirrors center-of-mass-normalized handwriting:
        # shifts stay within one pixel, shape variation does the work
        if rng.random() < 0.3:
            block = _dilate4(block)
        angle = float(rng.uniform(-rot_jitter, rot_jitter))
        dy = int(rng.integers(-1, 2))
        dx = int(rng.integers(-1, 2))
        blurred = bool(rng.random() < 0.5)
        amplitude = float(rng.uniform(0.75, 1.0))

    canvas = np.zeros((size, size), dtype=np.float64)
    baseline = size - max(2, (_BASELINE_MARGIN * size) // 28)
    r0 = min(max(baseline - bh, 0), size - bh) + dy
    c0 = (size - bw) // 2 + dx
    rs, cs = max(r0, 0), max(c0, 0)
    re, ce = min(r0 + bh, size), min(c0 + bw, size)
    canvas[rs:re, cs:ce] = block[rs - r0:re - r0, cs - c0:ce - c0]

    if angle != 0.0:
        from bucketgan.data.rotate import rotate_target
        canvas = rotate_target(TargetImage(pixels=canvas), angle).pixels
    if blurred:
        canvas = _box_blur(canvas)
    return np.clip(canvas * amplitude, 0.0, 1.0)


def make_glyph_targets(chars, per_class: int, seed: int, size: int = 28,
                       rot_jitter: float = 7.0):
    """Deterministic labeled glyph instances: class i = chars[i].

    Each sample gets its own generator keyed by (seed, class, index), so any
    subset regenerates identically regardless of batch layout.
    """
    from bucketgan.data.synth import LabeledTarget

    targets = []
    for ci, ch in enumerate(chars):
        for i in range(per_class):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=(seed, ci, i)))
            pixels = glyph_image(ch, rng, size=size, rot_jitter=rot_jitter)
            targets.append(LabeledTarget(
                image=TargetImage(pixels=pixels, label=ci),
                label=ci,
                source_id=f"glyph:{ch}:{i}",
            ))
    return targets
