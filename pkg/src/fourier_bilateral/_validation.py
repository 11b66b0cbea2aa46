"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import ValidationError


def check_positive(value, name, *, integer=False):
    if integer:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise ValidationError(f"{name} must be an integer, got {value!r}")
        value = int(value)
    else:
        if isinstance(value, bool) or not isinstance(value, numbers.Real):
            raise ValidationError(f"{name} must be a real number, got {value!r}")
        value = float(value)
        if not np.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value!r}")
    if value <= 0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    return value


def check_tolerance(eps):
    """Validate a kernel error tolerance and return it as a float."""
    return check_positive(eps, "eps")


def check_image(img, R=255, *, name="image"):
    """Return ``img`` as a 2-D float64 array with pixels in ``[0, R]``.

    Raises
    ------
    ValidationError
        If the array is not 2-D, is empty, or holds non-finite or
        out-of-range values.
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.number) or np.iscomplexobj(arr):
        raise ValidationError(f"{name} must hold real numbers, got dtype {arr.dtype}")
    arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite pixels")
    lo, hi = arr.min(), arr.max()
    if lo < 0 or hi > R:
        raise ValidationError(f"{name} pixels must lie in [0, {R}], got [{lo}, {hi}]")
    return arr


def check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
