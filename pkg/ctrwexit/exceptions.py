"""Custom exception classes for ctrwexit.

This module defines the exception hierarchy shared by the probabilistic
models, the numerical solvers, the Monte Carlo oracle and the CLI.
"""

from __future__ import annotations

from typing import Any


class CTRWError(Exception):
    """Base exception for all ctrwexit errors.

    Provides structured error information so callers (and the CLI) can
    report what went wrong without parsing the message.

    Attributes:
        details: Free-form diagnostic values attached by the raiser

    Example:
        >>> try:
        ...     invert(f, t=-1.0)
        ... except CTRWError as e:
        ...     print(f"Error: {e} ({e.details})")
    """

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        self.details = dict(details) if details else {}
        super().__init__(message)


class ModelError(CTRWError):
    """Raised when a waiting-time or jump law is invalid.

    This can occur when:
    - A rate, shape or scale parameter is not positive
    - A tabulated density is negative or does not integrate to one
    - A formula needs a mean that does not exist (heavy-tailed jumps)

    Resolution:
        Check the model parameters; for heavy-tailed laws use a route that
        does not need the mean.
    """

    def __init__(
        self, message: str, parameter: str | None = None, details: dict[str, Any] | None = None
    ):
        self.parameter = parameter
        super().__init__(message, details)


class DomainError(CTRWError, ValueError):
    """Raised when an argument lies outside the domain of an operation.

    This can occur when:
    - A position x is outside [0, b]
    - An inversion time t is not positive
    - A transform is evaluated on its branch cut or at a pole
    """

    def __init__(
        self, message: str, value: object = None, details: dict[str, Any] | None = None
    ):
        self.value = value
        super().__init__(message, details)


class RegimeError(CTRWError):
    """Raised when an operation is called for the wrong jump regime.

    This can occur when:
    - A favorable-regime formula receives negative jumps
    - A closed form is requested for a model it was not derived for
    - The zero-drift correction is applied with nonzero drift

    Resolution:
        Use the solver of the matching regime, or the general
        integral-equation route.
    """

    def __init__(
        self,
        message: str,
        regime: str | None = None,
        required: str | None = None,
        details: dict[str, Any] | None = None,
    ):
        self.regime = regime
        self.required = required
        super().__init__(message, details)


class UnsupportedOperationError(CTRWError):
    """Raised when a model or input does not support an operation.

    This can occur when:
    - A custom waiting-time law does not provide a sampler
    - A rational transform has a pole of multiplicity greater than two
    """

    def __init__(
        self, message: str, operation: str | None = None, details: dict[str, Any] | None = None
    ):
        self.operation = operation
        super().__init__(message, details)


class CoverageError(CTRWError):
    """Raised when a renewal solution does not cover the requested time.

    Resolution:
        Solve the renewal equation with a horizon of at least r plus the
        evaluation window.
    """

    def __init__(
        self,
        message: str,
        horizon: float | None = None,
        required: float | None = None,
        details: dict[str, Any] | None = None,
    ):
        self.horizon = horizon
        self.required = required
        super().__init__(message, details)


class NumericalFailureError(CTRWError):
    """Base exception for failed inversions and solves.

    Attributes:
        method: Name of the numerical method that failed
        diagnostics: Method-specific values (contour nodes, residuals, ...)
    """

    def __init__(
        self,
        message: str,
        method: str | None = None,
        diagnostics: dict[str, Any] | None = None,
    ):
        self.method = method
        self.diagnostics = dict(diagnostics) if diagnostics else {}
        super().__init__(message, self.diagnostics)


class SingularityError(NumericalFailureError):
    """Raised when a transform denominator vanishes at an evaluation point.

    This can occur when:
    - 1 - ψ̂(sv)ĥ(s) is within 1e-12 of zero
    - A rational transform is evaluated at one of its poles

    Resolution:
        Move the evaluation point (or the inversion contour) away from the
        singularity.
    """

    def __init__(
        self,
        message: str,
        point: complex | None = None,
        method: str | None = None,
        diagnostics: dict[str, Any] | None = None,
    ):
        self.point = point
        super().__init__(message, method, diagnostics)


class DiscretizationError(NumericalFailureError):
    """Raised when the Nyström system is singular or badly conditioned.

    This can occur when:
    - The grid is too coarse for the kernel
    - The integral operator has an eigenvalue at one (no unique solution)

    Resolution:
        Refine the grid or check that the process leaves (0, b) almost surely.
    """

    def __init__(
        self,
        message: str,
        condition_number: float | None = None,
        method: str | None = "nystrom",
        diagnostics: dict[str, Any] | None = None,
    ):
        self.condition_number = condition_number
        super().__init__(message, method, diagnostics)


class SimulationError(CTRWError):
    """Raised when Monte Carlo paths fail to exit within the event budget.

    Resolution:
        Raise the event budget, or use a truncation barrier for b = ∞ runs.
    """

    def __init__(
        self, message: str, events: int | None = None, details: dict[str, Any] | None = None
    ):
        self.events = events
        super().__init__(message, details)


class ConfigError(CTRWError):
    """Raised when a run configuration or result CSV cannot be parsed.

    This can occur when:
    - A line is not of the form key=value
    - A key is unknown or a value does not parse
    - The requested method does not apply to the regime/model pair

    Resolution:
        Fix the reported line, or run 'ctrwexit --help' for the key list.
    """

    def __init__(
        self,
        message: str,
        key: str | None = None,
        line_number: int | None = None,
        details: dict[str, Any] | None = None,
    ):
        self.key = key
        self.line_number = line_number
        super().__init__(message, details)
