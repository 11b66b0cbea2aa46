"""Spatial and range kernels sampled on their discrete domains.

The range kernel acts on intensity differences, which for an image with
values in ``[0, R]`` are the integers ``-R..R``.  All range kernels are
symmetric, so only the half ``0..R`` is evaluated and then mirrored.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive
from .exceptions import ParseError, ValidationError

RANGE_KINDS = ("gaussian", "exponential", "cauchy", "tabulated")

_SYMMETRY_TOL = 1e-12


def _readonly(arr):
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _half_profile(kind, sigma, R):
    t = np.arange(R + 1, dtype=np.float64)
    if kind == "gaussian":
        return np.exp(-(t * t) / (2.0 * sigma * sigma))
    if kind == "exponential":
        return np.exp(-t / sigma)
    if kind == "cauchy":
        return 1.0 / (1.0 + (t * t) / (sigma * sigma))
    raise ValidationError(f"unknown range kernel kind {kind!r}")


@dataclass(frozen=True)
class RangeKernelSpec:
    """Description of a range kernel over the lattice ``-R..R``.

    Use the ``gaussian``/``exponential``/``cauchy``/``tabulated``
    constructors rather than building one field by field.
    """

    kind: str
    R: int = 255
    sigma: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in RANGE_KINDS:
            raise ValidationError(
                f"kind must be one of {RANGE_KINDS}, got {self.kind!r}")
        R = check_positive(self.R, "R", integer=True)
        object.__setattr__(self, "R", R)
        if self.kind == "tabulated":
            if self.samples is None:
                raise ValidationError("tabulated kernel requires samples")
            s = np.asarray(self.samples, dtype=np.float64)
            if s.ndim != 1 or s.size != 2 * R + 1:
                raise ValidationError(
                    f"tabulated kernel needs {2 * R + 1} samples, got shape {s.shape}")
            if not np.all(np.isfinite(s)):
                raise ValidationError("tabulated kernel contains non-finite samples")
            if np.max(np.abs(s - s[::-1])) > _SYMMETRY_TOL:
                raise ValidationError("tabulated kernel is not symmetric")
            if s[R] <= 0 or s[R] < s.max():
                raise ValidationError(
                    "tabulated kernel must attain a positive maximum at t = 0")
            object.__setattr__(self, "samples", _readonly(s))
        else:
            object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))

    @classmethod
    def gaussian(cls, sigma, R=255):
        return cls("gaussian", R, sigma)

    @classmethod
    def exponential(cls, sigma, R=255):
        return cls("exponential", R, sigma)

    @classmethod
    def cauchy(cls, sigma, R=255):
        return cls("cauchy", R, sigma)

    @classmethod
    def tabulated(cls, samples):
        s = np.asarray(samples, dtype=np.float64)
        if s.ndim != 1 or s.size < 3 or s.size % 2 == 0:
            raise ValidationError(
                f"tabulated kernel needs an odd number (>= 3) of samples, got {s.size}")
        return cls("tabulated", (s.size - 1) // 2, samples=s)


@dataclass(frozen=True)
class RangeKernelSamples:
    """Kernel values on ``-R..R``; ``values[i]`` is the kernel at ``i - R``."""

    R: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size != 2 * self.R + 1:
            raise ValidationError(
                f"expected {2 * self.R + 1} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("kernel samples must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def lattice(self):
        """Integer offsets ``-R..R`` matching ``values``."""
        return np.arange(-self.R, self.R + 1)

    @property
    def center(self):
        return float(self.values[self.R])

    def __len__(self):
        return self.values.size

    def __call__(self, t):
        """Look up the kernel at integer offsets ``t`` (array-like)."""
        idx = np.asarray(t, dtype=np.int64) + self.R
        if np.any((idx < 0) | (idx > 2 * self.R)):
            raise ValidationError(f"offset outside [-{self.R}, {self.R}]")
        return self.values[idx]


def sample_range_kernel(spec):
    """Sample a range kernel on the integer lattice ``-R..R``.

    Parametric kernels are evaluated on ``0..R`` and mirrored, so the
    result is exactly symmetric.  Tabulated samples are returned as given.
    """
    if not isinstance(spec, RangeKernelSpec):
        raise ValidationError(f"expected RangeKernelSpec, got {type(spec).__name__}")
    if spec.kind == "tabulated":
        return RangeKernelSamples(spec.R, spec.samples)
    half = _half_profile(spec.kind, spec.sigma, spec.R)
    return RangeKernelSamples(spec.R, np.concatenate([half[:0:-1], half]))


def gaussian_range_samples(sigma, R=255):
    """Shortcut for the samples of a Gaussian range kernel."""
    return sample_range_kernel(RangeKernelSpec.gaussian(sigma, R))


def load_tabulated_kernel(path):
    """Read a tabulated range kernel: one value per line, ``2R+1`` lines."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(f"not a number: {text!r}", lineno) from None
    if not values:
        raise ParseError(f"{path}: no kernel samples")
    return RangeKernelSpec.tabulated(values)


def save_tabulated_kernel(path, samples):
    values = samples.values if isinstance(samples, RangeKernelSamples) else samples
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{float(v)!r}\n")


@dataclass(frozen=True)
class SpatialKernel:
    """Separable Gaussian spatial kernel truncated at radius ``ceil(3 theta)``.

    ``taps`` are unnormalized, so the center weight is exactly 1.
    """

    theta: float
    radius: int
    taps: np.ndarray = field(repr=False)

    @property
    def center(self):
        return float(self.taps[self.radius])

    @property
    def size(self):
        return 2 * self.radius + 1

    def weights_2d(self):
        """Full 2-D window as the outer product of the 1-D taps."""
        return np.outer(self.taps, self.taps)


def build_spatial_kernel(theta):
    theta = check_positive(theta, "theta")
    radius = math.ceil(3.0 * theta)
    j = np.arange(radius + 1, dtype=np.float64)
    half = np.exp(-(j * j) / (2.0 * theta * theta))
    taps = np.concatenate([half[:0:-1], half])
    return SpatialKernel(theta, radius, _readonly(taps))
