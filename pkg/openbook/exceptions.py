"""
Exception classes for openbook.

This module defines the exceptions raised by the typed public API when an
input violates a precondition: wrong dimensions, points off the manifold,
inversion targets outside the attainable range, and so on. Traced kernels
never raise; validation happens on concrete values only.
"""

from typing import Any


class OpenBookException(Exception):
    """Base exception class for all openbook-specific exceptions."""

    code = "error"

    def __init__(self, message: str = "An error occurred"):
        self.message = message
        super().__init__(message)


class DimensionMismatch(OpenBookException):
    """Raised when an array or argument list has the wrong length."""

    code = "dimension_mismatch"

    def __init__(self, expected: int, actual: int, what: str = "dimension"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} mismatch: expected {expected}, got {actual}")


class DimensionTooLarge(OpenBookException):
    """Raised when a wedge evaluation would exceed the supported form degree."""

    code = "dimension_too_large"

    def __init__(self, degree: int, limit: int = 7):
        self.degree = degree
        self.limit = limit
        super().__init__(
            f"dimension too large: total degree {degree} exceeds limit {limit}"
        )


class OutOfRangeError(OpenBookException):
    """
    Raised when an inversion target lies outside the range of the function.

    Attributes:
        target: The offending target value.
        lower: Smallest attainable value.
        upper: Supremum of the attainable values.
    """

    code = "out_of_range"

    def __init__(
        self, target: float, lower: float, upper: float, what: str = "target"
    ):
        self.target = target
        self.lower = lower
        self.upper = upper
        super().__init__(
            f"{what} {target!r} outside attainable range [{lower!r}, {upper!r})"
        )


class ConstraintViolation(OpenBookException):
    """Raised when a point does not satisfy its manifold constraints."""

    code = "constraint_violation"

    def __init__(self, residual: float, tolerance: float, what: str = "point"):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"{what} violates constraints: residual {residual:.3e} > {tolerance:.1e}"
        )


class RankDeficiency(OpenBookException):
    """Raised when constraint differentials are linearly dependent."""

    code = "rank_deficiency"

    def __init__(self, rank: int, expected: int):
        self.rank = rank
        self.expected = expected
        super().__init__(f"constraint Jacobian has rank {rank}, expected {expected}")


class OnBindingError(OpenBookException):
    """Raised when the fibration angle is requested on the binding (z0 = 0)."""

    code = "on_binding"

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(f"point lies on the binding: |z0| = {modulus:.3e}")


class SingularOrbitError(OpenBookException):
    """Raised when |z0| >= 1, where no page coordinates exist."""

    code = "singular_orbit"

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(f"point lies on a singular orbit: |z0| = {modulus!r} >= 1")


class PageDomainError(OpenBookException):
    """Raised when page coordinates leave the open unit disk bundle."""

    code = "page_domain"

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"momentum norm {radius!r} outside the open unit disk")


class NotOrthogonalError(OpenBookException):
    """Raised when a matrix passed as a rotation is not orthogonal."""

    code = "not_orthogonal"

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"matrix is not orthogonal: |A^T A - 1| = {residual:.3e}")


class ModelMismatch(OpenBookException):
    """Raised when a torus point is given in a model the operation cannot read."""

    code = "model_mismatch"

    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected a {expected!r} torus point, got {actual!r}")


class TemplateException(OpenBookException):
    """Exception for report template rendering errors."""

    code = "template"

    def __init__(self, message: str, template_name: str | None = None):
        self.template_name = template_name
        super().__init__(message)


class ConfigurationException(OpenBookException):
    """Exception for invalid run configuration (CLI usage errors)."""

    code = "configuration"

    def __init__(self, message: str, errors: dict[str, Any] | None = None):
        self.errors = errors or {}
        super().__init__(message)


def out_of_range(
    target: float, lower: float, upper: float, what: str = "target"
) -> OutOfRangeError:
    """Create an out-of-range error for a monotone inversion target."""
    return OutOfRangeError(float(target), float(lower), float(upper), what)


def off_manifold(residual: float, tolerance: float, what: str) -> ConstraintViolation:
    """Create a constraint violation for a named kind of point."""
    return ConstraintViolation(float(residual), float(tolerance), what)
