"""Experiment presets: the standard recognition protocols as
seed-reproducible jobs.

Each preset fully determines a run (classes, per-class sample counts, epochs,
measurement geometry, noise channel) given seeds. Targets default to the
built-in glyph synthesizer so every preset runs self-contained; IDX data
paths substitute real handwriting when available.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from bucketgan.errors import ConfigError
from bucketgan.data.glyphs import make_glyph_targets
from bucketgan.data.idx import load_labeled_targets
from bucketgan.data.rotate import rotate_target
from bucketgan.data.synth import (
    BucketDataset,
    FixedFieldNoise,
    LabeledTarget,
    normalize_dataset,
    synth_dataset,
    with_awgn,
)
from bucketgan.ghost.measure import TargetImage
from bucketgan.ghost.noise import turbulence_field
from bucketgan.ghost.reconstruct import g2_reconstruct
from bucketgan.ghost.speckles import generate_speckles
from bucketgan.ghost.measure import measure_sequence
from bucketgan.gan.checkpoint import Checkpoint
from bucketgan.gan.train import TrainConfig, train
from bucketgan.harness.artifacts import (
    echo_config,
    write_csv_report,
    write_manifest,
    write_matrix_csv,
    write_pgm,
)
from bucketgan.harness.metrics import (
    AccuracyReport,
    class_mean_correlation_table,
    evaluate,
)

PRESET_NAMES = ("letters", "numbers", "shared_speckles", "attitudes",
                "turbulence", "snr_sweep", "physical_scale")

ATTITUDE_ANGLES = (0.0, 30.0, -30.0, 50.0, -50.0, 60.0, -60.0, 90.0, -90.0, 180.0)
SNR_LEVELS_DB = (14.0, 8.0, 4.0, 2.0, 0.0, -1.0, -3.0, -4.0, -5.0)


@dataclass
class ExperimentPreset:
    name: str
    chars: str
    train_per_class: int
    test_per_class: int
    epochs: int
    pattern_count: int = 784
    grid: int = 28
    distribution: str = "bernoulli:0.5"
    batch_size: int = 64
    rot_jitter: float = 7.0
    angles: Optional[tuple[float, ...]] = None          # attitudes only
    turbulence_sigma_frac: Optional[float] = None       # turbulence only
    snr_levels: Optional[tuple[float, ...]] = None      # snr_sweep only
    checkpoint_epochs: Optional[tuple[int, ...]] = None # physical_scale only

    @property
    def num_classes(self) -> int:
        return len(self.angles) if self.angles else len(self.chars)

    @property
    def fold_side(self) -> int:
        side = math.isqrt(self.pattern_count)
        if side * side != self.pattern_count:
            raise ConfigError(
                f"pattern_count {self.pattern_count} does not fold square"
            )
        return side

    def class_names(self) -> list[str]:
        if self.angles:
            return [f"{self.chars}@{a:+g}deg" for a in self.angles]
        return list(self.chars)


_DEFAULTS: dict[str, dict] = {
    "letters": dict(chars="ABCDEFGHIJ", train_per_class=500,
                    test_per_class=100, epochs=300),
    "numbers": dict(chars="0123456789", train_per_class=500,
                    test_per_class=100, epochs=300),
    "shared_speckles": dict(chars="ABCDEFGHIJ0123456789", train_per_class=200,
                            test_per_class=50, epochs=200),
    "attitudes": dict(chars="A", train_per_class=200, test_per_class=50,
                      epochs=200, angles=ATTITUDE_ANGLES, rot_jitter=2.0),
    "turbulence": dict(chars="XJTU", train_per_class=300, test_per_class=100,
                       epochs=200, turbulence_sigma_frac=0.3),
    "snr_sweep": dict(chars="XJTU", train_per_class=300, test_per_class=100,
                      epochs=200, snr_levels=SNR_LEVELS_DB),
    "physical_scale": dict(chars="LSNZ", train_per_class=200,
                           test_per_class=100, epochs=300,
                           pattern_count=100, checkpoint_epochs=(100, 200, 300)),
}


def make_preset(name: str, **overrides) -> ExperimentPreset:
    if name not in _DEFAULTS:
        raise ConfigError(
            f"unknown preset {name!r}; choose one of {PRESET_NAMES}"
        )
    kwargs = dict(_DEFAULTS[name])
    kwargs.update(overrides)
    return ExperimentPreset(name=name, **kwargs)


@dataclass
class PresetResult:
    preset: ExperimentPreset
    reports: dict[str, AccuracyReport]
    checkpoint: Checkpoint
    out_dir: Optional[Path] = None
    extras: dict = field(default_factory=dict)

    @property
    def primary(self) -> AccuracyReport:
        if self.preset.name == "turbulence":
            return self.reports["turbulent"]
        if self.preset.name == "snr_sweep":
            return self.reports[f"awgn:{self.preset.snr_levels[0]:g}dB"]
        if self.preset.name == "physical_scale":
            last = self.preset.checkpoint_epochs[-1]
            return self.reports[f"epoch:{last}"]
        return self.reports["clean"]


def _glyph_split_targets(preset: ExperimentPreset, seed: int
                         ) -> tuple[list[LabeledTarget], list[LabeledTarget]]:
    """Disjoint train/test glyph instances (index ranges never overlap)."""
    total = preset.train_per_class + preset.test_per_class
    if preset.angles:
        base = make_glyph_targets(preset.chars[0] * 1, total, seed,
                                  size=preset.grid,
                                  rot_jitter=preset.rot_jitter)
        train, test = [], []
        for ci, angle in enumerate(preset.angles):
            for i, t in enumerate(base):
                rotated = rotate_target(t.image, angle)
                lt = LabeledTarget(
                    image=TargetImage(pixels=rotated.pixels, label=ci),
                    label=ci,
                    source_id=f"{t.source_id}@{angle:+g}",
                )
                (train if i < preset.train_per_class else test).append(lt)
        return train, test
    targets = make_glyph_targets(preset.chars, total, seed, size=preset.grid,
                                 rot_jitter=preset.rot_jitter)
    train, test = [], []
    for t in targets:
        idx = int(t.source_id.rsplit(":", 1)[1])
        (train if idx < preset.train_per_class else test).append(t)
    return train, test


def _idx_split_targets(preset: ExperimentPreset, data_paths: dict
                       ) -> tuple[list[LabeledTarget], list[LabeledTarget]]:
    offset = int(data_paths.get("label_offset", 0))
    per_class_needed = preset.train_per_class + preset.test_per_class
    targets = load_labeled_targets(data_paths["images"], data_paths["labels"])
    by_class: dict[int, list[LabeledTarget]] = {}
    for t in targets:
        c = t.label - offset
        if 0 <= c < preset.num_classes:
            t.label = c
            t.image.label = c
            by_class.setdefault(c, []).append(t)
    train, test = [], []
    for c in range(preset.num_classes):
        members = by_class.get(c, [])
        if len(members) < per_class_needed:
            raise ConfigError(
                f"class {c} has {len(members)} samples, preset needs "
                f"{per_class_needed}"
            )
        train.extend(members[:preset.train_per_class])
        test.extend(members[preset.train_per_class:per_class_needed])
    return train, test


def run_preset(preset: ExperimentPreset, out_dir=None,
               data_paths: Optional[dict] = None,
               speckle_seed: int = 1001, data_seed: int = 2002,
               train_seed: int = 3003, noise_seed: int = 4004) -> PresetResult:
    """Synthesize, train, and evaluate one preset; emit tables and images."""
    side = preset.fold_side
    seq = generate_speckles(speckle_seed, preset.pattern_count,
                            preset.grid, preset.grid, preset.distribution)
    if data_paths:
        train_targets, test_targets = _idx_split_targets(preset, data_paths)
    else:
        train_targets, test_targets = _glyph_split_targets(preset, data_seed)

    train_clean = synth_dataset(train_targets, seq,
                                num_classes=preset.num_classes)
    test_clean = synth_dataset(test_targets, seq,
                               num_classes=preset.num_classes)

    config = TrainConfig(epochs=preset.epochs, batch_size=preset.batch_size,
                         seed=train_seed)
    reports: dict[str, AccuracyReport] = {}
    extras: dict = {}

    if preset.name == "turbulence":
        sigma = preset.turbulence_sigma_frac * float(train_clean.arrays.std())
        field_ = turbulence_field(noise_seed, (side, side), sigma)
        noise = FixedFieldNoise(field_)
        train_noisy = synth_dataset(train_targets, seq, noise=noise,
                                    num_classes=preset.num_classes)
        test_noisy = synth_dataset(test_targets, seq, noise=noise,
                                   num_classes=preset.num_classes)
        ckpt = train(config, normalize_dataset(train_noisy))
        reports["turbulent"] = evaluate(test_noisy, ckpt)
        clean_ckpt = train(config, normalize_dataset(train_clean))
        reports["clean"] = evaluate(test_clean, clean_ckpt)
        extras["sigma"] = sigma
    elif preset.name == "snr_sweep":
        ckpt = train(config, normalize_dataset(train_clean))
        reports["clean"] = evaluate(test_clean, ckpt)
        for level in preset.snr_levels:
            noisy = with_awgn(test_clean, level, noise_seed)
            reports[f"awgn:{level:g}dB"] = evaluate(noisy, ckpt)
    elif preset.name == "physical_scale":
        snapshots: dict[int, Checkpoint] = {}
        ckpt = train(config, normalize_dataset(train_clean),
                     on_epoch=lambda e, snap: snapshots.__setitem__(e, snap),
                     callback_epochs=set(preset.checkpoint_epochs))
        for e in preset.checkpoint_epochs:
            reports[f"epoch:{e}"] = evaluate(test_clean, snapshots[e])
    else:
        ckpt = train(config, normalize_dataset(train_clean))
        reports["clean"] = evaluate(test_clean, ckpt)

    result = PresetResult(preset=preset, reports=reports, checkpoint=ckpt,
                          extras=extras)
    if out_dir is not None:
        result.out_dir = Path(out_dir)
        _emit_artifacts(result, seq, train_clean, test_clean,
                        speckle_seed=speckle_seed)
    return result


def _emit_artifacts(result: PresetResult, seq, train_clean: BucketDataset,
                    test_clean: BucketDataset, speckle_seed: int) -> None:
    preset = result.preset
    out = result.out_dir
    tables = out / "tables"
    images = out / "images"
    out.mkdir(parents=True, exist_ok=True)

    names = preset.class_names()
    rows = []
    for condition, report in result.reports.items():
        for c in range(preset.num_classes):
            correct = int(report.confusion[c, c])
            samples = int(report.sample_counts[c])
            rows.append({
                "preset": preset.name,
                "class": names[c],
                "condition": condition,
                "samples": samples,
                "correct": correct,
                "accuracy": f"{correct / samples:.4f}" if samples else "nan",
            })
    write_csv_report(rows, tables / "recognition.csv")

    corr = class_mean_correlation_table(train_clean)
    write_matrix_csv(corr, tables / "class_mean_correlation.csv", header=names)

    # Figure analogs: one bucket array per class, one speckle pattern, and a
    # classic correlation reconstruction of a held-out target.
    for c in range(preset.num_classes):
        i = int(np.flatnonzero(train_clean.labels == c)[0])
        write_pgm(train_clean.arrays[i],
                  images / f"bucket_array_{names[c]}.pgm".replace("@", "_"))
    write_pgm(seq.patterns[0], images / "speckle_example.pgm")

    recon_seq = generate_speckles(speckle_seed + 1, 10 * preset.grid ** 2,
                                  preset.grid, preset.grid,
                                  preset.distribution)
    target = TargetImage(pixels=_first_test_target(test_clean, preset))
    buckets = measure_sequence(recon_seq, target)
    write_pgm(g2_reconstruct(recon_seq, buckets), images / "g2_reconstruction.pgm")
    write_pgm(target.pixels, images / "g2_reference_target.pgm")

    echo = echo_config(out, {
        "preset": asdict(preset),
        "train_config": asdict(result.checkpoint.config),
        "speckle_fingerprint": result.checkpoint.speckle_fingerprint.hex(),
        "extras": {k: repr(v) for k, v in result.extras.items()},
    })
    outputs = [p for p in out.rglob("*") if p.is_file() and p.name != "run_manifest.txt"]
    write_manifest(out, inputs={"speckle_fingerprint": seq.fingerprint.hex()},
                   outputs=outputs)


def _first_test_target(test_clean: BucketDataset, preset: ExperimentPreset):
    # The g2 figure wants a raw image; rebuild the first test glyph.
    if preset.angles:
        base = make_glyph_targets(preset.chars[0], 1, 0, size=preset.grid,
                                  rot_jitter=preset.rot_jitter)
        return base[0].image.pixels
    return make_glyph_targets(preset.chars[0], 1, 0,
                              size=preset.grid)[0].image.pixels


def preset_to_json(preset: ExperimentPreset) -> str:
    return json.dumps(asdict(preset), indent=2, sort_keys=True)
