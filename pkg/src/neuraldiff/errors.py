"""Exception types shared across the package."""


class RoundRangeError(ValueError):
    """Round count outside the supported range of a cipher."""


class ShapeError(ValueError):
    """Bit-length or array-shape mismatch."""


class FormatError(ValueError):
    """Malformed dataset or prediction file."""


class TruncationError(FormatError):
    """File or stream shorter than its header declares."""


class PredictionRangeError(ValueError):
    """Prediction value outside [0, 1]."""


class AlignmentError(ValueError):
    """Dataset and prediction files disagree on sample count."""
