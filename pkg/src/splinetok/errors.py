"""Exception types shared across the package.

All inherit from ValueError so callers that don't care about the exact
failure mode can catch a single base class.
"""


class SplinetokError(ValueError):
    pass


class DegreeError(SplinetokError):
    """Spline degree incompatible with the basis count (requires 0 <= P < N)."""


class DomainError(SplinetokError):
    """Parameter value outside the curve domain [0, 1]."""


class ShapeError(SplinetokError):
    """Array shape or token layout inconsistent with the configuration."""


class ParseError(SplinetokError):
    """Malformed input file; message carries the offending location."""


class EmptyDatasetError(SplinetokError):
    """No usable samples in the dataset."""


class DofMismatchError(SplinetokError):
    """Config, stats, and data disagree on the number of action dimensions."""


class VocabError(SplinetokError):
    """Token index outside [0, vocab_size - 1]."""
