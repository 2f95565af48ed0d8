#!/usr/bin/env python3
"""Run one experiment preset end to end and print its accuracy tables.

Examples:
    python scripts/run_experiment.py letters --out runs/letters
    python scripts/run_experiment.py snr_sweep --epochs 150 --out runs/snr
    python scripts/run_experiment.py attitudes --per-class 100 --out runs/att
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from bucketgan.harness import PRESET_NAMES, make_preset, run_preset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("preset", choices=PRESET_NAMES)
    parser.add_argument("--per-class", type=int)
    parser.add_argument("--test-per-class", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--out", default=None)
    parser.add_argument("--speckle-seed", type=int, default=1001)
    parser.add_argument("--data-seed", type=int, default=2002)
    parser.add_argument("--train-seed", type=int, default=3003)
    args = parser.parse_args()

    overrides = {k: v for k, v in (
        ("train_per_class", args.per_class),
        ("test_per_class", args.test_per_class),
        ("epochs", args.epochs),
        ("batch_size", args.batch_size),
    ) if v is not None}
    preset = make_preset(args.preset, **overrides)

    t0 = time.perf_counter()
    result = run_preset(preset, out_dir=args.out,
                        speckle_seed=args.speckle_seed,
                        data_seed=args.data_seed,
                        train_seed=args.train_seed)
    elapsed = time.perf_counter() - t0

    names = preset.class_names()
    for condition, report in result.reports.items():
        print(f"\n[{condition}] overall {report.overall:.4f} "
              f"({report.mean_latency_s * 1e3:.2f} ms/array)")
        for c, name in enumerate(names):
            print(f"  {name:>12}: {report.per_class_accuracy[c]:.3f} "
                  f"({report.sample_counts[c]} samples)")
    print(f"\ndone in {elapsed / 60:.1f} min"
          + (f"; artifacts in {args.out}" if args.out else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
