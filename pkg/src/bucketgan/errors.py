"""Exception hierarchy shared across the pipeline.

Contract errors (wrong data fed to a correct pipeline) are distinct from
format errors (broken or foreign files) so the CLI can map them to stable
exit codes: contract -> 1, format/usage -> 2.
"""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(PipelineError):
    """Operand shapes are inconsistent (matrix dims, grid sizes, fold shapes)."""


class LabelError(PipelineError):
    """A class label is outside [0, num_classes)."""


class TapeError(PipelineError):
    """Backward called on an empty or already-consumed tape."""


class DegenerateDataError(PipelineError):
    """Input is degenerate for the requested statistic (zero variance,
    constant dataset, batch too small, zero-mean ensemble, all-zero signal)."""


class NumericsError(PipelineError):
    """A non-finite value appeared where the contract requires finite output."""


class FingerprintMismatchError(PipelineError):
    """Dataset/array and checkpoint were produced under different speckle
    sequences; recognition is only defined under the training-time sequence."""


class FormatError(PipelineError):
    """A file failed its magic/version/checksum/structure validation."""


class ConfigError(PipelineError):
    """A run configuration is invalid (unknown keys, out-of-range values)."""
