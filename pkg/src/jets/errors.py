"""Exception hierarchy shared across the package.

Every domain error carries a stable ``category`` string so the CLI can emit
machine-readable diagnostics and scripts can dispatch on it.
"""

from __future__ import annotations


class JetsError(Exception):
    """Base class for all domain errors raised by this package."""

    category = "error"


class SignatureMismatchError(JetsError):
    category = "signature-mismatch"


class EvaluationError(JetsError):
    """A required generator has no assigned value during evaluation."""

    category = "evaluation"


class NonLinearSystemError(JetsError):
    """Operation requires a system that is affine in the jet variables."""

    category = "nonlinear-system"


class EmptyProjectionError(JetsError):
    """Projection would return the whole lower jet space (no equations)."""

    category = "empty-projection"


class InconsistentAtPointError(JetsError):
    """An equation reduces to a nonzero constant at the expansion point."""

    category = "inconsistent-at-point"


class InconsistentSeedError(JetsError):
    """Seed coefficients violate (or do not cover) the system equations."""

    category = "inconsistent-seed"


class InconsistentOrderError(JetsError):
    """The affine solve at some series order is unsolvable.

    This signals missing integrability conditions: run completion first.
    """

    category = "inconsistent-order"

    def __init__(self, order: int, message: str | None = None):
        self.order = order
        super().__init__(message or f"no solution for the coefficients of order {order}; "
                         "the system is not formally integrable at this order "
                         "(complete it first)")


class MaxIterationsExceededError(JetsError):
    category = "max-iterations-exceeded"

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class DeltaSingularUnresolvedError(JetsError):
    """Coordinate retries could not restore a sharp class count."""

    category = "delta-singular-unresolved"

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class ParseError(JetsError):
    category = "parse"

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")
