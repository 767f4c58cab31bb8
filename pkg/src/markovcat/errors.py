"""Exception hierarchy shared by all backends."""


class MarkovCatError(Exception):
    """Base class for all library errors."""


class TypeMismatch(MarkovCatError, ValueError):
    """Domains/codomains, shapes, or backends do not line up."""


class NormalizationError(MarkovCatError, ValueError):
    """A kernel column does not sum (or max) to one in its semiring."""

    def __init__(self, column, total, message=None):
        self.column = column
        self.total = total
        super().__init__(message or f"column {column} is not normalized (total {total})")


class EntryError(MarkovCatError, ValueError):
    """An entry lies outside the scalar set of the semiring."""


class MarginalMismatch(MarkovCatError, ValueError):
    """Two joints were required to share a marginal but do not."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__("shared marginals differ")


class NotDeterministic(MarkovCatError, ValueError):
    """A statistic or connector was required to be deterministic."""


class SizeBoundExceeded(MarkovCatError, ValueError):
    """A construction would exceed its configured size bound."""


class MatrixError(MarkovCatError, ValueError):
    """A real matrix is not symmetric or not positive semidefinite."""


class FormatError(MarkovCatError, ValueError):
    """A kernel or Gaussian document is malformed."""
