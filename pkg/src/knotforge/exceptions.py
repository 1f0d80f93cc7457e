"""Exception types raised across the package."""


class KnotforgeError(Exception):
    """Base class for all package errors."""


class InvariantError(KnotforgeError, ValueError):
    """A component or link violates its structural invariants."""


class DegenerateEmbeddingError(KnotforgeError):
    """The embedding has zero thickness (touching or self-intersecting tube)."""


class DegenerateHullError(KnotforgeError):
    """The point set does not span three dimensions.

    Attributes
    ----------
    rank : int
        Affine rank of the offending point set (0 to 2).
    """

    def __init__(self, message, rank):
        super().__init__(message)
        self.rank = rank


class MeshError(KnotforgeError):
    """A triangle mesh is open, inconsistently oriented or malformed."""


class AnnealError(KnotforgeError):
    """Annealing could not proceed (non-convergent overlap repair)."""


class SearchError(KnotforgeError):
    """A parameter search failed to bracket a minimum."""


class FormatError(KnotforgeError, ValueError):
    """A file could not be parsed.

    Attributes
    ----------
    line : int or None
        1-based line number where parsing failed.
    """

    def __init__(self, message, line=None):
        self.message = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
