"""Input validation helpers, in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import ConfigurationError


def check_vector(v, *, dim=None, name="vector"):
    """Return ``v`` as a finite 1-D float array, optionally of length ``dim``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ConfigurationError(f"{name} must be non-empty")
    if dim is not None and arr.shape[0] != dim:
        raise ConfigurationError(
            f"{name} has dimension {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains NaN or Inf")
    return arr


def check_matrix(M, *, square=False, name="matrix"):
    """Return ``M`` as a finite 2-D float array."""
    arr = np.asarray(M, dtype=float)
    if arr.ndim == 0 and square:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise ConfigurationError(f"{name} must be a non-empty 2-D array")
    if square and arr.shape[0] != arr.shape[1]:
        raise ConfigurationError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains NaN or Inf")
    return arr


def check_positive(value, name, *, strict=True, integer=False):
    if integer:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    elif isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{name} must be a number, got {value!r}")
    if not np.isfinite(value):
        raise ConfigurationError(f"{name} must be finite")
    if (strict and value <= 0) or (not strict and value < 0):
        raise ConfigurationError(f"{name} must be positive, got {value!r}")
    return value


def check_curvature_pair(mu, L):
    """Validate a strong-convexity/Lipschitz pair ``0 < mu <= L``."""
    check_positive(mu, "mu")
    check_positive(L, "L")
    if mu > L:
        raise ConfigurationError(f"need mu <= L, got mu={mu!r}, L={L!r}")
    return float(mu), float(L)
