"""scikit-learn compatible wrappers.

``FourierBilateralFilter`` is a transformer: ``fit`` selects and fits the
range-kernel approximation (no image is needed for that), ``transform``
filters one 2-D image or a stack of them.
"""

import time

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_image, check_positive
from .approx import fit_fixed_period, min_error_over_period, optimize_parameters
from .exceptions import ValidationError
from .filtering import BorderPolicy, brute_bilateral, fast_bilateral
from .kernels import (RangeKernelSamples, RangeKernelSpec, build_spatial_kernel,
                      sample_range_kernel)
from .lut import LookupTable, load_lut, query_lut

METHODS = ("fast", "brute", "fbf")


def _range_samples(kernel, sigma, R):
    if isinstance(kernel, RangeKernelSamples):
        return kernel
    if isinstance(kernel, RangeKernelSpec):
        return sample_range_kernel(kernel)
    return sample_range_kernel(RangeKernelSpec(kernel, R, sigma))


class FourierBilateralFilter(TransformerMixin, BaseEstimator):
    """Bilateral filter with an optimized cosine-series range kernel.

    Parameters
    ----------
    sigma : float
        Range kernel width (intensity units).
    theta : float
        Spatial Gaussian standard deviation (pixels).
    eps : float
        Tolerance on the kernel residual; drives the order/period search.
        Ignored when ``n_terms`` is given (except for ``method="fbf"``
        without ``n_terms``, where it picks the order to match).
    n_terms, period : int, optional
        Fix the order ``K`` (and optionally the half-period ``T``) instead
        of searching.  Without ``period`` the best ``T`` for that ``K`` is
        used.
    method : {"fast", "brute", "fbf"}
        ``fast`` uses the optimized period, ``fbf`` fixes ``T = R``,
        ``brute`` evaluates the exact filter.
    border : {"symmetric", "replicate", "zero"}
    kernel : str or RangeKernelSpec or RangeKernelSamples
        Range kernel family, or an explicit kernel.
    dynamic_range : int
        Largest intensity ``R``.
    t_max : int, optional
        Largest half-period scanned (default ``10 R``).
    lut : LookupTable or path, optional
        Read ``(K, T)`` from a lookup table instead of searching.
    n_jobs : int
        Worker threads; results do not depend on it.

    Attributes
    ----------
    approximation_ : FourierApproximation or None
    report_ : OptimizationReport or None
        Set when the order came from the tolerance search.
    range_samples_ : RangeKernelSamples
    spatial_kernel_ : SpatialKernel
    kernel_error_ : float
        Achieved residual of ``approximation_`` (0 for ``brute``).
    """

    def __init__(self, sigma=30.0, theta=5.0, eps=0.1, n_terms=None, period=None,
                 method="fast", border="symmetric", kernel="gaussian",
                 dynamic_range=255, t_max=None, lut=None, n_jobs=1):
        self.sigma = sigma
        self.theta = theta
        self.eps = eps
        self.n_terms = n_terms
        self.period = period
        self.method = method
        self.border = border
        self.kernel = kernel
        self.dynamic_range = dynamic_range
        self.t_max = t_max
        self.lut = lut
        self.n_jobs = n_jobs

    def _select_order(self, b):
        """Return (K, T or None, report or None)."""
        if self.n_terms is not None:
            return check_positive(self.n_terms, "n_terms", integer=True), self.period, None
        if self.lut is not None:
            table = self.lut if isinstance(self.lut, LookupTable) else load_lut(self.lut)
            if table.R != b.R:
                raise ValidationError(f"lookup table built for R={table.R}, need R={b.R}")
            K, T = query_lut(table, self.sigma, self.eps)
            return K, T, None
        report = optimize_parameters(b, self.eps, T_max=self.t_max, n_jobs=self.n_jobs)
        return report.K_star, report.T_star, report

    def fit(self, X=None, y=None):
        """Fit the range-kernel approximation; ``X`` is not used."""
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        BorderPolicy.coerce(self.border)
        R = check_positive(self.dynamic_range, "dynamic_range", integer=True)
        t0 = time.perf_counter()
        self.spatial_kernel_ = build_spatial_kernel(self.theta)
        self.range_samples_ = b = _range_samples(self.kernel, self.sigma, R)
        self.report_ = None
        self.approximation_ = None
        self.kernel_error_ = 0.0
        if self.method != "brute":
            K, T, report = self._select_order(b)
            if self.method == "fbf":
                T = b.R
            elif T is None:
                T, _ = min_error_over_period(K, b, self.t_max, self.n_jobs)
            if report is not None and (report.K_star, report.T_star) == (K, T):
                approx = report.approximation
            else:
                approx = fit_fixed_period(b, K, T)
            self.report_ = report
            self.approximation_ = approx
            resid = b.values - approx.evaluate(b.lattice)
            self.kernel_error_ = float(resid @ resid)
        self.fit_time_ = time.perf_counter() - t0
        return self

    def _filter_one(self, img):
        if self.method == "brute":
            return brute_bilateral(img, self.spatial_kernel_, self.range_samples_, self.border)
        out, diag = fast_bilateral(img, self.spatial_kernel_, self.approximation_,
                                   self.border, n_jobs=self.n_jobs,
                                   return_diagnostics=True)
        self.last_diagnostics_ = diag
        return out

    def transform(self, X):
        """Filter a 2-D image or a ``(n, H, W)`` stack of images."""
        check_is_fitted(self, "spatial_kernel_")
        arr = np.asarray(X)
        R = self.range_samples_.R
        if arr.ndim == 2:
            return self._filter_one(check_image(arr, R))
        if arr.ndim == 3:
            return np.stack([self._filter_one(check_image(a, R)) for a in arr])
        raise ValidationError(f"expected a 2-D image or 3-D stack, got shape {arr.shape}")


class CosineKernelRegressor(RegressorMixin, BaseEstimator):
    """Cosine-series fit of a symmetric function sampled on ``-R..R``.

    ``fit(t, y)`` takes the lattice offsets and the kernel values; the
    order and half-period are searched for when not given.
    """

    def __init__(self, n_terms=None, period=None, eps=1e-3, t_max=None):
        self.n_terms = n_terms
        self.period = period
        self.eps = eps
        self.t_max = t_max

    def fit(self, X, y):
        t = np.asarray(X).reshape(-1)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if t.size != y.size or t.size % 2 == 0:
            raise ValidationError("need an odd number of samples matching the offsets")
        R = (t.size - 1) // 2
        if not np.array_equal(t, np.arange(-R, R + 1)):
            raise ValidationError("offsets must be the integer lattice -R..R in order")
        b = RangeKernelSamples(R, y)
        if self.n_terms is None:
            rep = optimize_parameters(b, self.eps, T_max=self.t_max)
            approx = rep.approximation
        else:
            T = self.period
            if T is None:
                T, _ = min_error_over_period(self.n_terms, b, self.t_max)
            approx = fit_fixed_period(b, self.n_terms, T)
        self.approximation_ = approx
        self.coef_ = np.array(approx.coefficients)
        self.n_terms_, self.period_ = approx.K, approx.T
        return self

    def predict(self, X):
        check_is_fitted(self, "approximation_")
        return self.approximation_.evaluate(np.asarray(X).reshape(-1))


__all__ = ["FourierBilateralFilter", "CosineKernelRegressor"]
