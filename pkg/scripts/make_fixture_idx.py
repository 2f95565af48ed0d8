#!/usr/bin/env python3
"""Materialize built-in glyph targets as IDX ubyte files.

Useful for exercising the IDX ingestion path without downloading a
handwriting corpus:
    python scripts/make_fixture_idx.py --chars ABCDEFGHIJ --per-class 50 \
        --out-images /tmp/glyphs.idx --out-labels /tmp/glyph-labels.idx
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from bucketgan.data import make_glyph_targets, write_idx_images, write_idx_labels


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chars", default="0123456789")
    parser.add_argument("--per-class", type=int, default=50)
    parser.add_argument("--seed", type=int, default=2002)
    parser.add_argument("--size", type=int, default=28)
    parser.add_argument("--out-images", required=True)
    parser.add_argument("--out-labels", required=True)
    args = parser.parse_args()

    targets = make_glyph_targets(args.chars, args.per_class, args.seed,
                                 size=args.size)
    stack = np.stack([t.image.pixels for t in targets])
    labels = [t.label for t in targets]
    write_idx_images(stack, args.out_images)
    write_idx_labels(labels, args.out_labels)
    print(f"wrote {len(targets)} images to {args.out_images}, "
          f"labels to {args.out_labels}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
