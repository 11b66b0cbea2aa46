"""Brute-force and Fourier-accelerated bilateral filtering.

Both paths share the truncated spatial window and the border policy, so
their outputs are directly comparable.  With the ``zero`` policy pixels
outside the frame contribute nothing to either the numerator or the
denominator; with ``symmetric`` and ``replicate`` the image is extended
before filtering.
"""

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_image
from .approx import FourierApproximation
from .exceptions import ValidationError
from .kernels import RangeKernelSamples, SpatialKernel

# Fast-path denominators at or below this fall back to the input pixel.
DENOMINATOR_FLOOR = 1e-12


class BorderPolicy(str, enum.Enum):
    SYMMETRIC = "symmetric"
    REPLICATE = "replicate"
    ZERO = "zero"

    @classmethod
    def coerce(cls, value):
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(p.value for p in cls)
            raise ValidationError(f"border must be one of {choices}, got {value!r}") from None


_NP_MODE = {
    BorderPolicy.SYMMETRIC: "symmetric",
    BorderPolicy.REPLICATE: "edge",
    BorderPolicy.ZERO: "constant",
}


@dataclass
class FilterDiagnostics:
    """Per-call counters and stage timings (seconds)."""

    fallback_pixels: int = 0
    n_convolutions: int = 0
    timings: dict = field(default_factory=dict)


def pad_image(img, radius, border="symmetric"):
    """Extend ``img`` by ``radius`` pixels on every side."""
    border = BorderPolicy.coerce(border)
    return np.pad(img, radius, mode=_NP_MODE[border])


def _correlate_axis(padded, taps, axis, n_out):
    out = np.zeros(padded.shape[:axis] + (n_out,) + padded.shape[axis + 1:])
    for j, w in enumerate(taps):
        sl = [slice(None)] * padded.ndim
        sl[axis] = slice(j, j + n_out)
        out += w * padded[tuple(sl)]
    return out


def convolve_separable(img, kernel, border="symmetric"):
    """Convolve a 2-D array with the separable spatial kernel.

    Rows are filtered first, then columns.  The taps are symmetric, so
    correlation and convolution coincide.  No normalization is applied.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D array, got shape {arr.shape}")
    if not isinstance(kernel, SpatialKernel):
        raise ValidationError(f"expected SpatialKernel, got {type(kernel).__name__}")
    H, W = arr.shape
    padded = pad_image(arr, kernel.radius, border)
    rows = _correlate_axis(padded, kernel.taps, 1, W)
    return _correlate_axis(rows, kernel.taps, 0, H)


def _range_table(range_kernel, R):
    if isinstance(range_kernel, FourierApproximation):
        range_kernel = range_kernel.to_samples()
    if not isinstance(range_kernel, RangeKernelSamples):
        raise ValidationError(
            "range kernel must be RangeKernelSamples or FourierApproximation, "
            f"got {type(range_kernel).__name__}")
    if range_kernel.R != R:
        raise ValidationError(f"range kernel built for R={range_kernel.R}, image uses R={R}")
    return range_kernel.values


def brute_bilateral(img, kernel, range_kernel, border="symmetric", *, R=None,
                    return_diagnostics=False):
    """Direct evaluation of the bilateral filter.

    ``range_kernel`` is either sampled kernel values or a fitted cosine
    series (evaluated on the integer lattice).  Intensity differences are
    rounded to the nearest integer for the table lookup.  Pixels whose
    denominator is not positive keep their input value and are counted
    in the diagnostics.
    """
    border = BorderPolicy.coerce(border)
    if R is None:
        R = range_kernel.R
    f = check_image(img, R)
    table = _range_table(range_kernel, R)
    H, W = f.shape
    r = kernel.radius
    padded = pad_image(f, r, border)
    valid = np.pad(np.ones_like(f), r, mode="constant") if border is BorderPolicy.ZERO else None
    w2d = kernel.weights_2d()

    num = np.zeros_like(f)
    den = np.zeros_like(f)
    for dy in range(2 * r + 1):
        for dx in range(2 * r + 1):
            nb = padded[dy:dy + H, dx:dx + W]
            diff = np.rint(nb - f).astype(np.int64)
            w = w2d[dy, dx] * table[diff + R]
            if valid is not None:
                w = w * valid[dy:dy + H, dx:dx + W]
            num += w * nb
            den += w

    bad = den <= 0
    out = np.where(bad, f, num / np.where(bad, 1.0, den))
    if return_diagnostics:
        return out, FilterDiagnostics(fallback_pixels=int(np.count_nonzero(bad)))
    return out


def fast_bilateral(img, kernel, approx, border="symmetric", *, n_jobs=1,
                   return_diagnostics=False):
    """Bilateral filter with the range kernel replaced by a cosine series.

    With ``phi_hat(t) = sum_k c_k cos(nu k t)``, the identity
    ``cos(a - b) = cos a cos b + sin a sin b`` turns both sums of the
    filter into spatial convolutions of modulated images:

        num = sum_k c_k [C_k G(C_k f) + S_k G(S_k f)]
        den = sum_k c_k [C_k G(C_k)   + S_k G(S_k)]

    where ``C_k = cos(nu k f)``, ``S_k = sin(nu k f)`` and ``G`` is the
    truncated Gaussian convolution.  This takes ``4K - 2`` convolutions.
    Terms are accumulated in ascending ``k`` regardless of ``n_jobs``.
    """
    if not isinstance(approx, FourierApproximation):
        raise ValidationError(f"expected FourierApproximation, got {type(approx).__name__}")
    border = BorderPolicy.coerce(border)
    f = check_image(img, approx.R)
    diag = FilterDiagnostics()
    t0 = time.perf_counter()

    def conv(a):
        return convolve_separable(a, kernel, border)

    aux = [None]
    for k in range(1, approx.K):
        phase = (approx.nu * k) * f
        aux.append((np.cos(phase), np.sin(phase)))
    t1 = time.perf_counter()

    def term(k):
        if k == 0:
            return conv(f), conv(np.ones_like(f)), 2
        C, S = aux[k]
        t_num = C * conv(C * f) + S * conv(S * f)
        t_den = C * conv(C) + S * conv(S)
        return t_num, t_den, 4

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            terms = list(pool.map(term, range(approx.K)))
    else:
        terms = [term(k) for k in range(approx.K)]
    t2 = time.perf_counter()

    num = np.zeros_like(f)
    den = np.zeros_like(f)
    for c, (t_num, t_den, n_conv) in zip(approx.coefficients, terms):
        num += c * t_num
        den += c * t_den
        diag.n_convolutions += n_conv

    bad = den <= DENOMINATOR_FLOOR
    out = np.where(bad, f, num / np.where(bad, 1.0, den))
    t3 = time.perf_counter()
    diag.fallback_pixels = int(np.count_nonzero(bad))
    diag.timings = {"auxiliary_images": t1 - t0, "convolutions": t2 - t1,
                    "combination": t3 - t2}
    if return_diagnostics:
        return out, diag
    return out
