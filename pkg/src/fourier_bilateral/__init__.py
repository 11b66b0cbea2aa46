"""Fast bilateral filtering with an optimized cosine-series range kernel."""

from .approx import (FourierApproximation, OptimizationReport, design_matrix,
                     evaluate_approximation, fit_coefficients, fit_fixed_period,
                     min_error_over_period, optimize_parameters, period_error_curve)
from .estimators import CosineKernelRegressor, FourierBilateralFilter
from .exceptions import (LUTBuildError, NumericError, ParseError, ToleranceUnreachableError,
                         UnsupportedFormatError, ValidationError)
from .filtering import BorderPolicy, brute_bilateral, convolve_separable, fast_bilateral
from .kernels import (RangeKernelSamples, RangeKernelSpec, SpatialKernel,
                      build_spatial_kernel, gaussian_range_samples, sample_range_kernel)
from .lut import LookupTable, build_lut, load_lut, query_lut, save_lut
from .metrics import ComparisonResult, compare_images, kernel_error, prop1_bound, psnr
from .pgm import read_pgm, write_pgm

__version__ = "0.1.0"
