"""Exception hierarchy. The CLI maps these onto exit codes."""


class TikregError(Exception):
    """Base class for all package errors."""


class InvalidInputError(TikregError, ValueError):
    """Bad dimensions, empty inputs, out-of-range parameters."""


class DomainError(InvalidInputError):
    """Closed-form evaluator called outside its domain (e.g. eps <= 0)."""


class NumericFailure(TikregError, ArithmeticError):
    """A numerical routine failed (non-convergence, bad pivot, non-finite data)."""


class NotPSDError(NumericFailure):
    """Matrix has a clearly negative eigenvalue."""


class DegenerateSpectrumError(NumericFailure):
    """Eigenvalues too close for the simple-eigenvalue perturbation formula."""
