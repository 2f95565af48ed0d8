#!/usr/bin/env python3
"""Verify analytic gradients of the full generator and discriminator against
central finite differences (64-bit, batch 4, sampled coordinates)."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from bucketgan.nn import grad_check
from bucketgan.gan.losses import discriminator_loss, generator_loss
from bucketgan.gan.models import (
    generator_forward,
    init_discriminator,
    init_generator,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples-per-param", type=int, default=25)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--classes", type=int, default=10)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.classes
    gen = init_generator(rng, 100, n, 784, dtype=np.float64)
    disc = init_discriminator(rng, 784, n, dtype=np.float64)
    b = 4
    z = rng.standard_normal((b, 100))
    y = rng.integers(0, n, b)
    real = rng.uniform(-1, 1, (b, 784))
    real_y = rng.integers(0, n, b)

    def d_fn(tape):
        fake = generator_forward(z, y, gen, None)
        return discriminator_loss(disc, real, real_y, fake.data, y,
                                  mode="train", tape=tape)[0]

    def g_fn(tape):
        fake = generator_forward(z, y, gen, tape)
        return generator_loss(disc, fake, y, mode="train", tape=tape)[0]

    t0 = time.perf_counter()
    err_d = grad_check(d_fn, disc.parameters(), eps=1e-5,
                       samples_per_param=args.samples_per_param, seed=3)
    err_g = grad_check(g_fn, gen.parameters(), eps=1e-5,
                       samples_per_param=args.samples_per_param, seed=4)
    elapsed = time.perf_counter() - t0
    print(f"discriminator max relative error: {err_d:.3e}")
    print(f"generator     max relative error: {err_g:.3e}")
    print(f"elapsed {elapsed:.1f}s")
    ok = err_d <= 1e-4 and err_g <= 1e-4
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
