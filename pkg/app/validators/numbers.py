"""Helpers for validating numeric arguments of public operations."""

from __future__ import annotations

import math

from app.utils.errors import InvalidArgumentError


def require_finite(name: str, value: float) -> float:
    """Return the value as float, rejecting NaN and infinities."""
    try:
        number = float(value)
    except (TypeError, ValueError) as err:
        raise InvalidArgumentError(f"{name} must be a real number, got {value!r}.") from err
    if not math.isfinite(number):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}.")
    return number


def require_positive(name: str, value: float) -> float:
    """Return the value when it is finite and strictly positive."""
    number = require_finite(name, value)
    if number <= 0:
        raise InvalidArgumentError(f"{name} must be > 0, got {value!r}.")
    return number


def require_int_at_least(name: str, value: int, minimum: int) -> int:
    """Return the value when it is an integer not below the minimum."""
    if isinstance(value, bool) or int(value) != value:
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}.")
    if value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value!r}.")
    return int(value)
