"""Inference, metrics, and runnable experiment presets."""

from bucketgan.harness.metrics import (
    Recognition,
    AccuracyReport,
    classify,
    evaluate,
    class_mean_correlation_table,
)
from bucketgan.harness.presets import (
    ExperimentPreset,
    PRESET_NAMES,
    make_preset,
    run_preset,
)
from bucketgan.harness.artifacts import write_csv_report, write_pgm

__all__ = [
    "Recognition",
    "AccuracyReport",
    "classify",
    "evaluate",
    "class_mean_correlation_table",
    "ExperimentPreset",
    "PRESET_NAMES",
    "make_preset",
    "run_preset",
    "write_csv_report",
    "write_pgm",
]
