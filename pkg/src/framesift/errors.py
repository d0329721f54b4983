"""Exception hierarchy shared across the toolkit."""


class FramesiftError(Exception):
    """Base class for all toolkit errors."""


class EmptySequence(FramesiftError):
    """A frame source contained no decodable frames."""


class DimensionMismatch(FramesiftError):
    """Frames in one sequence (or a frame pair) disagree on width/height."""


class DecodeError(FramesiftError):
    """An image file could not be decoded; carries the offending filename."""

    def __init__(self, filename: str, reason: str = ""):
        self.filename = filename
        msg = f"cannot decode {filename!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class ParseError(FramesiftError):
    """A text record was structurally malformed; carries file and line number."""

    def __init__(self, path: str, line_no: int, reason: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}")


class RangeError(FramesiftError):
    """A numeric field was outside its allowed range."""


class InvalidFraction(FramesiftError):
    """A sampling fraction fell outside (0, 1]."""


class SequenceTooShort(FramesiftError):
    """An operation needing at least two frames got fewer."""


class EmptyBudget(FramesiftError):
    """The requested fraction selects zero frames."""


class InvalidThreshold(FramesiftError):
    """An IoU match threshold fell outside (0, 1)."""


class NoGroundTruth(FramesiftError):
    """No ground-truth boxes exist for the requested class (or any class)."""


class NoSamples(FramesiftError):
    """Quantile extraction was asked to run on zero retained samples."""


class MissingPredictions(FramesiftError):
    """An experiment combination has no prediction file."""


class NothingToExport(FramesiftError):
    """A review session has no reviewed frames to export."""
