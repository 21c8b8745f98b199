"""Input validation helpers and exception types."""
import numbers

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class OutOfDomainError(InvalidInputError):
    """Raised when a formula is evaluated outside the range where it holds."""


class ConsistencyError(RuntimeError):
    """Raised when an internal invariant fails (a bug or a bad tolerance)."""


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidInputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive_float(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise InvalidInputError(f"{name} must be positive and finite, got {value}")
    return value


def check_points(points, d=None):
    """Return `points` as a finite float array of shape ``(n, d)``."""
    points = np.array(points, dtype=float)
    if points.ndim == 1:
        if d is None:
            raise InvalidInputError("a stacked configuration needs the dimension d")
        if points.size % d:
            raise InvalidInputError(f"length {points.size} is not a multiple of d={d}")
        points = points.reshape(-1, d)
    if points.ndim != 2 or points.shape[1] < 1:
        raise InvalidInputError(f"expected an (n, d) array, got shape {points.shape}")
    if d is not None and points.shape[1] != d:
        raise InvalidInputError(f"expected d={d} columns, got {points.shape[1]}")
    if not np.all(np.isfinite(points)):
        raise InvalidInputError("configuration has non-finite coordinates")
    return points
