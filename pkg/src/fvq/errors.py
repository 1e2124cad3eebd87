"""Exception types raised across the package.

Every error carries a human-readable message; CLI handlers add file/line
context before printing.
"""


class FvqError(Exception):
    """Base class for all package errors."""


# --- video ingest ---

class MalformedHeader(FvqError):
    """Stream does not start with a valid YUV4MPEG2 header."""


class TruncatedFrame(FvqError):
    """Frame payload ended before the declared frame size."""


class UnsupportedFormat(FvqError):
    """Chroma subsampling or bit depth outside the supported subset."""


class SizeMismatch(FvqError):
    """Raw stream length is not a multiple of the implied frame size."""


# --- frame / feature math ---

class DimensionMismatch(FvqError):
    """Operands have incompatible shapes."""


class NonPositiveSigma(FvqError):
    """Gaussian standard deviation must be > 0."""


class FrameTooSmall(FvqError):
    """Frame below the minimum size for the requested operation."""


class TooFewFrames(FvqError):
    """Sequence too short for a temporal feature."""


class DegenerateSamples(FvqError):
    """Sample set unusable for a distribution fit (zero variance or too few)."""


# --- regression ---

class TooFewRows(FvqError):
    """Not enough rows to fit statistics or a model."""


class DegenerateProblem(FvqError):
    """Training problem has no usable signal (e.g. constant targets)."""


class NonFiniteLoss(FvqError):
    """Training loss became NaN or infinite."""


class VersionMismatch(FvqError):
    """Model file written by an unsupported format version."""


class CorruptModel(FvqError):
    """Model file unreadable or structurally invalid."""


class FeatureNameMismatch(FvqError):
    """Feature CSV columns do not match the model's expected names/order."""


# --- evaluation ---

class ZeroVariance(FvqError):
    """Correlation undefined: one input has zero variance."""


class LengthMismatch(FvqError):
    """Correlation inputs differ in length or are too short."""


class TooFewEntries(FvqError):
    """Dataset too small for the requested split protocol."""


class ConfigError(FvqError):
    """Run configuration inconsistent with the requested operation."""
