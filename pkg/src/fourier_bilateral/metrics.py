"""Image comparison metrics and the pixelwise filtering-error bound."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_same_shape
from .exceptions import ValidationError

PEAK = 255.0

CSV_HEADER = "mse,psnr_db,max_abs_err,prop1_bound,bound_satisfied"


def psnr(mse, peak=PEAK):
    """``10 log10(peak^2 / mse)``; ``inf`` when ``mse`` is zero."""
    if mse < 0:
        raise ValidationError(f"mse must be >= 0, got {mse}")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def compare_images(a, b):
    """Return ``(mse, psnr_db, max_abs_err)`` between two images."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    check_same_shape(a, b)
    diff = a - b
    mse = float(np.mean(diff * diff))
    return mse, psnr(mse), float(np.max(np.abs(diff)))


def prop1_bound(eps, R, omega0=1.0):
    """Pixelwise error bound ``2 R eps / (omega0 - eps)`` for kernel error ``eps``."""
    if not 0 <= eps < omega0:
        raise ValidationError(f"bound requires 0 <= eps < omega0={omega0}, got eps={eps}")
    return 2.0 * R * eps / (omega0 - eps)


def sup_norm_bound(b, approx, spatial):
    """Pixelwise bound driven by the worst-case kernel deviation.

    With ``delta = max |phi - phi_hat|`` on the lattice, ``W`` the total
    spatial weight and ``D0 = omega(0) phi(0)`` the smallest possible
    denominator, the output error of the fast filter is at most
    ``2 R delta W / (D0 - delta W)``.  Requires a nonnegative kernel;
    returns ``inf`` when ``delta W >= D0``.
    """
    if np.any(b.values < 0):
        raise ValidationError("bound requires a nonnegative range kernel")
    delta = float(np.max(np.abs(b.values - approx.evaluate(b.lattice))))
    W = float(np.sum(spatial.taps)) ** 2
    D0 = spatial.center ** 2 * b.center
    if delta * W >= D0:
        return math.inf
    return 2.0 * b.R * delta * W / (D0 - delta * W)


def kernel_error(b, approx):
    """Sum of squared differences between kernel samples and the series on ``-R..R``."""
    if b.R != approx.R:
        raise ValidationError(f"R mismatch: samples R={b.R}, approximation R={approx.R}")
    d = b.values - approx.evaluate(b.lattice)
    return float(d @ d)


def _fmt(x):
    return "inf" if math.isinf(x) else repr(float(x))


@dataclass(frozen=True)
class ComparisonResult:
    mse: float
    psnr_db: float
    max_abs_err: float
    prop1_bound: float
    bound_satisfied: bool

    def to_csv_row(self):
        return ",".join([_fmt(self.mse), _fmt(self.psnr_db), _fmt(self.max_abs_err),
                         _fmt(self.prop1_bound), str(self.bound_satisfied).lower()])


def compare_filters(reference, approximate, kernel_err, R=255, omega0=1.0):
    """Compare a fast output against the brute-force reference.

    ``kernel_err`` is the achieved residual of the fitted range kernel,
    which is what the bound is stated in.
    """
    mse, p, mx = compare_images(reference, approximate)
    bound = prop1_bound(kernel_err, R, omega0)
    return ComparisonResult(mse, p, mx, bound, mx <= bound)
