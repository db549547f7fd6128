"""Exception types shared across the package."""


class TruncqError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(TruncqError, ValueError):
    """Malformed argument: bad shape, non-finite entry, out-of-range index."""


class Unsupported(TruncqError, ValueError):
    """Requested a parameter combination the implementation does not cover."""


class NumericalFailure(TruncqError, RuntimeError):
    """An iterative numerical routine failed to converge."""


class Infeasible(TruncqError, RuntimeError):
    """The constraint set of an optimization problem is empty."""


class CombinatorialBlowup(TruncqError, RuntimeError):
    """Exact enumeration was requested but the support count exceeds the cap."""


class TrivialNullSpace(TruncqError, RuntimeError):
    """Null-space based check requested for a matrix with trivial kernel."""


class DeltaOutOfRange(TruncqError, ValueError):
    """An isometry constant violates the hypothesis of the constant formulas."""


class BetaOutOfRange(TruncqError, ValueError):
    """beta must lie in (0, 1) for the bound formulas."""


class WhichMismatch(TruncqError, ValueError):
    """Selected bound variant is incompatible with the norm exponents."""
