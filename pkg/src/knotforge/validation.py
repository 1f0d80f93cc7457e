"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import InvariantError


def check_points(points, min_points=1, name="points"):
    """Return ``points`` as a float64 array of shape (n, 3).

    Raises
    ------
    InvariantError
        If the array is not (n, 3), has fewer than ``min_points`` rows or
        contains non-finite values.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvariantError(f"{name} must have shape (n, 3), got {arr.shape}")
    if arr.shape[0] < min_points:
        raise InvariantError(f"{name} needs at least {min_points} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError(f"{name} contains non-finite coordinates")
    return arr


def check_vector(vec, name="vector"):
    """Return a nonzero 3-vector normalized to unit length."""
    v = np.asarray(vec, dtype=np.float64).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvariantError(f"{name} must be a finite 3-vector")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise InvariantError(f"{name} must be nonzero")
    return v / norm


def check_positive(value, name, allow_zero=False):
    """Return ``value`` as float after checking it is finite and positive."""
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise InvariantError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise InvariantError(f"{name} must be {bound}, got {value!r}")
    return float(value)


def check_count(value, name, minimum=1):
    """Return ``value`` as int after checking it is an integer >= ``minimum``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvariantError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvariantError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def as_link(obj):
    """Coerce a Link, Component or (n, 3) array into a Link."""
    from .core import Component, Link

    if isinstance(obj, Link):
        return obj
    if isinstance(obj, Component):
        return Link((obj,))
    return Link((Component(obj),))
