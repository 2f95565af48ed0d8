"""Command-line entry point for the full pipeline.

Subcommands: gen-speckles, synth, train, eval, classify, corr, reconstruct,
report. Every run is reproducible from its config and seeds; no randomness
is ever taken from the clock.

Exit codes: 0 success, 1 domain/contract error (e.g. fingerprint mismatch),
2 usage or file-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from bucketgan.errors import ConfigError, FormatError, PipelineError

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_USAGE = 2

# Config-file blocks and the flags they back. Flags win over file values.
CONFIG_BLOCKS = {
    "speckles": {"seed": 1001, "count": 784, "size": "28x28",
                 "dist": "bernoulli:0.5"},
    "dataset": {"images": None, "labels": None, "label_offset": 0,
                "builtin": None, "per_class": 100, "data_seed": 2002,
                "rotate": None, "noise": None, "fold": None},
    "model": {"noise_dim": 100, "gen_hidden": [256, 512, 1024, 1024],
              "disc_hidden": [512, 512, 512], "objective": "acgan"},
    "train": {"epochs": 300, "batch_size": 64, "lr": 2e-4, "beta1": 0.5,
              "beta2": 0.999, "seed": 3003, "precision": "float32",
              "checkpoint_every": 0},
    "output": {"dir": "runs", "emit_images": True},
}


def load_config_file(path) -> dict:
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"config file is not valid JSON: {e}") from e
    for block, values in raw.items():
        if block not in CONFIG_BLOCKS:
            raise ConfigError(f"unknown config block {block!r}")
        for key in values:
            if key not in CONFIG_BLOCKS[block]:
                raise ConfigError(f"unknown config key {block}.{key}")
    return raw


def _cfg(args, block: str, key: str):
    """Flag > config file > documented default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    file_cfg = getattr(args, "_file_config", {})
    if block in file_cfg and key in file_cfg[block]:
        return file_cfg[block][key]
    return CONFIG_BLOCKS[block][key]


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"size must look like 28x28, got {text!r}") from None
    return h, w


def cmd_gen_speckles(args) -> int:
    from bucketgan.ghost import generate_speckles, save_speckles

    h, w = _parse_size(_cfg(args, "speckles", "size"))
    count = _cfg(args, "speckles", "count")
    if count < 1:
        raise ConfigError(f"--count must be >= 1, got {count}")
    seq = generate_speckles(_cfg(args, "speckles", "seed"), count, h, w,
                            _cfg(args, "speckles", "dist"))
    save_speckles(seq, args.out)
    print(f"fingerprint {seq.fingerprint.hex()}")
    print(f"wrote {args.out} ({seq.count} patterns of {h}x{w})")
    return EXIT_OK


def _load_targets(args, grid_size: int):
    from bucketgan.data import load_labeled_targets, make_glyph_targets

    images = _cfg(args, "dataset", "images")
    labels = _cfg(args, "dataset", "labels")
    builtin = _cfg(args, "dataset", "builtin")
    if images and labels:
        targets = load_labeled_targets(images, labels)
        offset = _cfg(args, "dataset", "label_offset")
        if offset:
            for t in targets:
                t.label -= offset
                t.image.label = t.label
        return targets
    if builtin:
        return make_glyph_targets(builtin, _cfg(args, "dataset", "per_class"),
                                  _cfg(args, "dataset", "data_seed"),
                                  size=grid_size)
    raise ConfigError("need either --images/--labels or --builtin CHARS")


def cmd_synth(args) -> int:
    from bucketgan.data import rotate_target, synth_dataset, save_dataset
    from bucketgan.data.synth import AwgnNoise, FixedFieldNoise, LabeledTarget
    from bucketgan.ghost import load_speckles, turbulence_field
    from bucketgan.ghost.measure import TargetImage

    seq = load_speckles(args.speckles)
    targets = _load_targets(args, grid_size=seq.height)

    rotate_spec = _cfg(args, "dataset", "rotate")
    if rotate_spec:
        angles = [float(a) for a in str(rotate_spec).split(",")]
        rotated = []
        for t in targets:
            for angle in angles:
                img = rotate_target(t.image, angle)
                rotated.append(LabeledTarget(
                    image=TargetImage(pixels=img.pixels, label=t.label),
                    label=t.label,
                    source_id=f"{t.source_id}@{angle:+g}"))
        targets = rotated

    fold = _cfg(args, "dataset", "fold")
    fold_shape = _parse_size(fold) if fold else None

    noise = None
    noise_spec = _cfg(args, "dataset", "noise")
    if noise_spec:
        import math

        kind, _, rest = str(noise_spec).partition(":")
        if kind == "turbulent":
            sigma, _, seed = rest.partition(":")
            shape = fold_shape or (math.isqrt(seq.count),) * 2
            noise = FixedFieldNoise(turbulence_field(
                int(seed or 0), shape, float(sigma)))
        elif kind == "awgn":
            snr, _, seed = rest.partition(":")
            noise = AwgnNoise(float(snr), int(seed or 0))
        else:
            raise ConfigError(
                f"noise must be turbulent:SIGMA:SEED or awgn:SNRDB:SEED, "
                f"got {noise_spec!r}")

    ds = synth_dataset(targets, seq, noise=noise, fold=fold_shape)
    save_dataset(ds, args.out)
    print(f"wrote {args.out}: {len(ds)} samples, {ds.num_classes} classes, "
          f"{ds.rows}x{ds.cols}, noise={ds.noise_config}")
    return EXIT_OK


def cmd_train(args) -> int:
    from bucketgan.data import load_dataset, normalize_dataset
    from bucketgan.gan import TrainConfig, save_checkpoint, train
    from bucketgan.harness.artifacts import echo_config

    ds = load_dataset(args.dataset)
    if ds.norm_stats is None:
        ds = normalize_dataset(ds)
    config = TrainConfig(
        epochs=_cfg(args, "train", "epochs"),
        batch_size=_cfg(args, "train", "batch_size"),
        lr=_cfg(args, "train", "lr"),
        beta1=_cfg(args, "train", "beta1"),
        beta2=_cfg(args, "train", "beta2"),
        seed=_cfg(args, "train", "seed"),
        precision=_cfg(args, "train", "precision"),
        noise_dim=_cfg(args, "model", "noise_dim"),
        objective=_cfg(args, "model", "objective"),
        gen_hidden=tuple(_cfg(args, "model", "gen_hidden")),
        disc_hidden=tuple(_cfg(args, "model", "disc_hidden")),
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    every = _cfg(args, "train", "checkpoint_every")
    on_epoch = None
    if every:
        from bucketgan.gan import save_checkpoint as _save

        periodic = out.parent / "checkpoints"
        periodic.mkdir(exist_ok=True)

        def on_epoch(e, snap):
            if e % every == 0:
                _save(snap, periodic / f"epoch_{e:05d}.grck")

    ckpt = train(config, ds, on_epoch=on_epoch)
    save_checkpoint(ckpt, out)
    if args.history:
        with open(args.history, "w") as f:
            f.write("epoch,d_source,d_class,g_source,g_class\n")
            for i, (d, g) in enumerate(ckpt.history, start=1):
                f.write(f"{i},{d.l_s:.6f},{d.l_c:.6f},"
                        f"{g.l_s:.6f},{g.l_c:.6f}\n")
    echo_config(out.parent, {
        "command": "train",
        "dataset": str(args.dataset),
        "train": {k: getattr(config, k) for k in (
            "epochs", "batch_size", "lr", "beta1", "beta2", "seed",
            "precision", "noise_dim", "objective")},
    })
    print(f"wrote {out} after {ckpt.epoch} epochs "
          f"(fingerprint {ckpt.speckle_fingerprint.hex()[:16]}...)")
    return EXIT_OK


def cmd_eval(args) -> int:
    from bucketgan.data import load_dataset
    from bucketgan.gan import load_checkpoint
    from bucketgan.harness import evaluate

    ds = load_dataset(args.dataset)
    ckpt = load_checkpoint(args.checkpoint)
    report = evaluate(ds, ckpt)
    lines = [f"overall accuracy {report.overall:.4f} over "
             f"{report.metadata['samples']} samples, "
             f"{report.mean_latency_s * 1e3:.2f} ms/array"]
    for c, acc in enumerate(report.per_class_accuracy):
        lines.append(f"class {c}: {acc:.4f} ({report.sample_counts[c]} samples)")
    print("\n".join(lines))
    if args.out:
        from bucketgan.harness.artifacts import write_csv_report

        rows = [{
            "preset": "eval", "class": c, "condition": ds.noise_config,
            "samples": int(report.sample_counts[c]),
            "correct": int(report.confusion[c, c]),
            "accuracy": f"{report.per_class_accuracy[c]:.4f}",
        } for c in range(ckpt.num_classes)]
        write_csv_report(rows, args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    from bucketgan.data import load_dataset
    from bucketgan.gan import load_checkpoint
    from bucketgan.harness import classify

    ds = load_dataset(args.dataset)
    ckpt = load_checkpoint(args.checkpoint)
    if not 0 <= args.index < len(ds):
        raise ConfigError(f"--index must be in [0, {len(ds)}), got {args.index}")
    rec = classify(ds.array_at(args.index), ckpt)
    print(json.dumps({
        "index": args.index,
        "label": rec.label,
        "confidence": round(rec.confidence, 6),
        "true_label": int(ds.labels[args.index]),
        "class_probs": [round(float(p), 6) for p in rec.class_probs],
    }))
    return EXIT_OK


def cmd_corr(args) -> int:
    import numpy as np

    from bucketgan.data import load_dataset
    from bucketgan.harness import class_mean_correlation_table
    from bucketgan.harness.artifacts import write_matrix_csv

    ds = load_dataset(args.dataset)
    table = class_mean_correlation_table(ds)
    write_matrix_csv(table, args.out,
                     header=[str(c) for c in range(ds.num_classes)])
    off = table[~np.eye(ds.num_classes, dtype=bool)]
    print(f"wrote {args.out}; off-diagonal range "
          f"[{off.min():.4f}, {off.max():.4f}]")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    import numpy as np

    from bucketgan.data import make_glyph_targets
    from bucketgan.ghost import (
        g2_reconstruct,
        generate_speckles,
        load_speckles,
        measure_sequence,
        pearson,
    )
    from bucketgan.harness.artifacts import write_pgm

    if args.speckles:
        seq = load_speckles(args.speckles)
    else:
        h, w = _parse_size(_cfg(args, "speckles", "size"))
        count = args.measurements or _cfg(args, "speckles", "count")
        seq = generate_speckles(_cfg(args, "speckles", "seed"), count, h, w,
                                _cfg(args, "speckles", "dist"))
    target = make_glyph_targets(args.target, 1, args.target_seed,
                                size=seq.height)[0].image
    buckets = measure_sequence(seq, target)
    image = g2_reconstruct(seq, buckets)
    write_pgm(image, args.out)
    r = pearson(image, target.pixels)
    print(f"wrote {args.out}; pearson(g2, target) = {r:.4f} "
          f"({seq.count} measurements)")
    return EXIT_OK


def cmd_report(args) -> int:
    from bucketgan.harness import make_preset, run_preset

    overrides = {}
    if args.per_class is not None:
        overrides["train_per_class"] = args.per_class
    if args.test_per_class is not None:
        overrides["test_per_class"] = args.test_per_class
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    preset = make_preset(args.preset, **overrides)
    data_paths = None
    images = _cfg(args, "dataset", "images")
    labels = _cfg(args, "dataset", "labels")
    if images and labels:
        data_paths = {"images": images, "labels": labels,
                      "label_offset": _cfg(args, "dataset", "label_offset")}
    result = run_preset(
        preset, out_dir=args.out, data_paths=data_paths,
        speckle_seed=_cfg(args, "speckles", "seed"),
        data_seed=_cfg(args, "dataset", "data_seed"),
        train_seed=_cfg(args, "train", "seed"),
    )
    for condition, report in result.reports.items():
        print(f"{args.preset} [{condition}]: overall {report.overall:.4f}, "
              f"{report.mean_latency_s * 1e3:.2f} ms/array")
    print(f"artifacts in {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bucketgan",
        description="Imaging-free target recognition from ghost-imaging "
                    "bucket-signal arrays.",
    )
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS thread cap (1 = deterministic reference mode)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-speckles", help="generate a speckle sequence file")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--size")
    p.add_argument("--dist")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_speckles)

    p = sub.add_parser("synth", help="synthesize a labeled bucket-array dataset")
    p.add_argument("--speckles", required=True)
    p.add_argument("--images")
    p.add_argument("--labels")
    p.add_argument("--label-offset", dest="label_offset", type=int)
    p.add_argument("--builtin", help="built-in glyph classes, e.g. ABCD")
    p.add_argument("--per-class", dest="per_class", type=int)
    p.add_argument("--data-seed", dest="data_seed", type=int)
    p.add_argument("--rotate", help="comma-separated angles; each target is "
                                    "emitted once per angle")
    p.add_argument("--noise", help="turbulent:SIGMA:SEED or awgn:SNRDB:SEED")
    p.add_argument("--fold", help="explicit fold shape, e.g. 10x10")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the recognizer on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--precision", choices=("float32", "float64"))
    p.add_argument("--objective", choices=("acgan", "source-minus-class"))
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    p.add_argument("--history", help="write per-epoch loss CSV here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", help="optional CSV report path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("classify", help="classify one array from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--index", type=int, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("corr", help="class-mean correlation table")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("reconstruct",
                       help="classic correlation reconstruction sanity image")
    p.add_argument("--speckles", help="GSPK file (else generated from flags)")
    p.add_argument("--measurements", type=int,
                   help="pattern count when generating")
    p.add_argument("--seed", type=int)
    p.add_argument("--size")
    p.add_argument("--dist")
    p.add_argument("--target", default="A", help="built-in glyph character")
    p.add_argument("--target-seed", dest="target_seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("report", help="run a full experiment preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--per-class", dest="per_class", type=int)
    p.add_argument("--test-per-class", dest="test_per_class", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--images")
    p.add_argument("--labels")
    p.add_argument("--label-offset", dest="label_offset", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # BLAS thread caps must land before numpy spins up its pools.
    if "--threads" in argv:
        idx = argv.index("--threads")
        if idx + 1 < len(argv) and argv[idx + 1].isdigit():
            for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS",
                        "MKL_NUM_THREADS"):
                os.environ.setdefault(var, argv[idx + 1])

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads >= 1:
        try:
            import threadpoolctl

            threadpoolctl.threadpool_limits(args.threads)
        except ImportError:
            pass
    try:
        args._file_config = load_config_file(args.config) if args.config else {}
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename or e}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
