"""Exception taxonomy shared across the package.

Every failure mode maps onto one of three semantic families so the CLI can
translate them into stable exit codes: bad inputs (``ParameterError`` and its
subclasses), numerical non-convergence (``ConvergenceError``), and failed
validation runs (``ValidationFailure``).
"""

from __future__ import annotations

__all__ = [
    "ParameterError",
    "SingularityError",
    "DegenerateSinrError",
    "InterferenceStormError",
    "ConvergenceError",
    "ValidationFailure",
]


class ParameterError(ValueError):
    """An input lies outside the supported parameter domain."""


class SingularityError(ParameterError):
    """The non-regularized path-loss model was evaluated at zero separation.

    Raised for ``g(d) = 1/(eps + d^eta)`` when ``d = 0`` and ``eps = 0``.
    """


class DegenerateSinrError(ParameterError):
    """SINR denominator is exactly zero (no noise and no weighted interference)."""


class InterferenceStormError(ParameterError):
    """Infinite-network interference diverges (path-loss exponent <= 2)."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature failed to meet its tolerances within the
    allowed number of subdivisions."""


class ValidationFailure(RuntimeError):
    """One or more validation checks failed."""
