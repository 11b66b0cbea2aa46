"""Synthetic 8-bit test images."""

import numpy as np

from .exceptions import ValidationError


def random_image(shape, seed=0, R=255):
    """Uniform random integer pixels in ``0..R``."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, R + 1, size=shape).astype(np.float64)


def piecewise_image(shape, seed=0, noise=10.0, n_blocks=6, R=255):
    """Random rectangles on a smooth ramp plus Gaussian noise, rounded to integers.

    Gives the filter both flat regions and sharp edges to work on.
    """
    if len(shape) != 2 or min(shape) < 1:
        raise ValidationError(f"bad image shape {shape!r}")
    rng = np.random.default_rng(seed)
    H, W = shape
    yy, xx = np.mgrid[0:H, 0:W]
    img = 0.25 * R * (xx / max(W - 1, 1) + yy / max(H - 1, 1))
    for _ in range(n_blocks):
        y0, x0 = rng.integers(0, H), rng.integers(0, W)
        h, w = rng.integers(1, H + 1), rng.integers(1, W + 1)
        img[y0:y0 + h, x0:x0 + w] = rng.uniform(0, R)
    img = img + rng.normal(0.0, noise, size=shape)
    return np.clip(np.rint(img), 0, R)


def parse_synthetic(spec, seed=0):
    """Build an image from ``synthetic:<W>x<H>`` or ``random:<W>x<H>``."""
    kind, _, size = spec.partition(":")
    try:
        w, h = (int(v) for v in size.lower().split("x"))
    except ValueError:
        raise ValidationError(f"bad synthetic image spec {spec!r}") from None
    if kind == "synthetic":
        return piecewise_image((h, w), seed)
    if kind == "random":
        return random_image((h, w), seed)
    raise ValidationError(f"unknown synthetic image kind {kind!r}")
