"""Least-squares cosine-series approximation of a range kernel.

A symmetric range kernel sampled on ``t = -R..R`` is approximated by

    phi_hat(t) = sum_{k=0}^{K-1} c_k cos(nu k t),    nu = 2 pi / (2T + 1).

For fixed order ``K`` and half-period ``T`` the coefficients minimize the
residual sum of squares over the lattice; the residual is ``E(K, T)``.
:func:`optimize_parameters` searches for the smallest ``K`` (and its best
``T``) whose residual meets a tolerance.
"""

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive, check_tolerance
from .exceptions import NumericError, ToleranceUnreachableError, ValidationError
from .kernels import RangeKernelSamples

# Singular values below RANK_RTOL * (largest column norm) are treated as zero.
RANK_RTOL = 1e-10
# Fixed batch size for the period scan; results must not depend on threading.
_T_CHUNK = 128


def default_t_max(R):
    return 10 * R


def default_k_max(R):
    return 2 * R + 1


def _phase_index(K, T, R):
    # (t * k) mod (2T+1) keeps the cosine argument within one period.
    t = np.arange(-R, R + 1, dtype=np.int64)
    k = np.arange(K, dtype=np.int64)
    return np.mod(np.outer(t, k), 2 * T + 1)


def _check_order(K, T, R):
    K = check_positive(K, "K", integer=True)
    T = check_positive(T, "T", integer=True)
    R = check_positive(R, "R", integer=True)
    if K > 2 * R + 1:
        raise ValidationError(f"K={K} exceeds 2R+1={2 * R + 1}")
    return K, T, R


def design_matrix(K, T, R):
    """Cosine design matrix of shape ``(2R+1, K)``.

    Row ``i`` corresponds to ``t = i - R`` and column ``j`` to frequency
    index ``j``, so the first column is all ones.
    """
    K, T, R = _check_order(K, T, R)
    nu = 2.0 * math.pi / (2 * T + 1)
    return np.cos(nu * _phase_index(K, T, R))


def _design_stack(K, Ts, R):
    return np.stack([np.cos((2.0 * math.pi / (2 * T + 1)) * _phase_index(K, T, R))
                     for T in Ts])


def _svd_one(A):
    try:
        return np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails on heavily aliased designs; the transpose converges
        U, s, Vt = np.linalg.svd(A.T, full_matrices=False)
        return Vt.T, s, U.T


def _svd_stack(A):
    try:
        return np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError:
        parts = [_svd_one(a) for a in A]
        return tuple(np.stack(p) for p in zip(*parts))


def _lstsq_stack(A, b):
    """Minimum-norm least squares for a stack of design matrices.

    Returns coefficients of shape ``(n, K)`` and residuals ``||A c - b||^2``
    of shape ``(n,)``.
    """
    U, s, Vt = _svd_stack(A)
    col_max = np.sqrt(np.max(np.einsum("nik,nik->nk", A, A), axis=1))
    keep = s > RANK_RTOL * col_max[:, None]
    Utb = np.einsum("nik,i->nk", U, b)
    y = np.where(keep, Utb / np.where(keep, s, 1.0), 0.0)
    c = np.einsum("nkj,nk->nj", Vt, y)
    resid = np.einsum("nik,nk->ni", A, c) - b
    E = np.einsum("ni,ni->n", resid, resid)
    return c, E


def fit_coefficients(A, b):
    """Least-squares coefficients ``c`` and residual ``E = ||A c - b||^2``.

    Rank-deficient systems return the minimum-norm solution.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b.values if isinstance(b, RangeKernelSamples) else b,
                   dtype=np.float64)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ValidationError(
            f"design matrix {A.shape} does not match sample vector {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NumericError("non-finite entries in least-squares input")
    c, E = _lstsq_stack(A[None], b)
    return c[0], float(E[0])


@dataclass(frozen=True)
class FourierApproximation:
    """Fitted cosine series: order ``K``, half-period ``T``, coefficients."""

    K: int
    T: int
    coefficients: np.ndarray = field(repr=False)
    R: int = 255

    def __post_init__(self):
        _check_order(self.K, self.T, self.R)
        c = np.array(self.coefficients, dtype=np.float64)
        if c.shape != (self.K,):
            raise ValidationError(f"expected {self.K} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def nu(self):
        return 2.0 * math.pi / (2 * self.T + 1)

    @property
    def n_convolutions(self):
        """Spatial convolutions needed by the fast filter."""
        return 4 * self.K - 2

    def evaluate(self, t):
        """Evaluate the series at ``t`` (scalar or array)."""
        arr = np.asarray(t)
        k = np.arange(self.K)
        if np.issubdtype(arr.dtype, np.integer):
            phase = np.mod(arr[..., None].astype(np.int64) * k, 2 * self.T + 1)
        else:
            phase = arr[..., None].astype(np.float64) * k
        out = np.cos(self.nu * phase) @ self.coefficients
        return float(out) if np.ndim(t) == 0 else out

    __call__ = evaluate

    def to_samples(self):
        """The approximation sampled on ``-R..R``."""
        return RangeKernelSamples(self.R, self.evaluate(np.arange(-self.R, self.R + 1)))


def evaluate_approximation(approx, t):
    return approx.evaluate(t)


def fit_fixed_period(b, K, T):
    """Least-squares fit at a given order and half-period.

    With ``T = R`` this is the fixed-period baseline.
    """
    A = design_matrix(K, T, b.R)
    c, _ = fit_coefficients(A, b.values)
    return FourierApproximation(int(K), int(T), c, b.R)


def period_error_curve(K, b, T_max, n_jobs=1):
    """``E(K, T)`` for ``T = 1..T_max`` as a float array (index ``T - 1``)."""
    K, T_max, R = _check_order(K, T_max, b.R)
    starts = range(1, T_max + 1, _T_CHUNK)

    def chunk(T0):
        Ts = range(T0, min(T0 + _T_CHUNK, T_max + 1))
        return _lstsq_stack(_design_stack(K, Ts, R), b.values)[1]

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(T0) for T0 in starts]
    return np.concatenate(parts)


def min_error_over_period(K, b, T_max=None, n_jobs=1):
    """Exhaustive scan of ``T`` in ``1..T_max``; ties go to the smaller ``T``."""
    if T_max is None:
        T_max = default_t_max(b.R)
    curve = period_error_curve(K, b, T_max, n_jobs)
    i = int(np.argmin(curve))
    return i + 1, float(curve[i])


def count_local_minima(curve):
    """Number of strict interior local minima along a 1-D error curve."""
    c = np.asarray(curve)
    if c.size < 3:
        return 0
    return int(np.count_nonzero((c[1:-1] < c[:-2]) & (c[1:-1] < c[2:])))


@dataclass
class OptimizationReport:
    """Outcome of the order/period search for one tolerance."""

    K_star: int
    T_star: int
    coefficients: np.ndarray
    achieved_error: float
    per_K_errors: dict
    eps: float
    T_max: int
    R: int
    local_minima: dict = field(default_factory=dict)
    surface: dict | None = field(default=None, repr=False)

    @property
    def approximation(self):
        return FourierApproximation(self.K_star, self.T_star, self.coefficients, self.R)

    @property
    def converged(self):
        return self.achieved_error <= self.eps

    def to_text(self):
        out = io.StringIO()
        out.write(f"R = {self.R}\n")
        out.write(f"eps = {self.eps!r}\n")
        out.write(f"T_max = {self.T_max}\n")
        out.write(f"K* = {self.K_star}\n")
        out.write(f"T* = {self.T_star}\n")
        out.write(f"achieved_error = {self.achieved_error!r}\n")
        out.write("coefficients = " + " ".join(repr(float(c)) for c in self.coefficients) + "\n")
        out.write("K,best_T,e(K),local_minima\n")
        for K in sorted(self.per_K_errors):
            T, e = self.per_K_errors[K]
            out.write(f"{K},{T},{e!r},{self.local_minima.get(K, '')}\n")
        return out.getvalue()

    def surface_rows(self):
        """``(K, T, E)`` rows of the recorded error surface."""
        if self.surface is None:
            raise ValidationError("report was built without keep_surface=True")
        for K in sorted(self.surface):
            for T, E in enumerate(self.surface[K], 1):
                yield K, T, float(E)


def write_surface_csv(path, report):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("K,T,E\n")
        for K, T, E in report.surface_rows():
            fh.write(f"{K},{T},{E!r}\n")


def _finish(b, K, T, eps, T_max, per_K, minima, surface):
    c, E = fit_coefficients(design_matrix(K, T, b.R), b.values)
    return OptimizationReport(K, T, c, E, eps=eps, T_max=T_max, R=b.R,
                              per_K_errors=per_K, local_minima=minima,
                              surface=surface)


def optimize_parameters_multi(b, eps_values, T_max=None, K_max=None, n_jobs=1,
                              keep_surface=False):
    """Run the order/period search for several tolerances at once.

    Every tolerance sees the same sequence of period scans, so the result
    for each entry is identical to a standalone :func:`optimize_parameters`
    call; the scans are simply shared up to the tightest tolerance.
    """
    if not isinstance(b, RangeKernelSamples):
        raise ValidationError(f"expected RangeKernelSamples, got {type(b).__name__}")
    eps_values = [check_tolerance(e) for e in eps_values]
    R = b.R
    T_max = default_t_max(R) if T_max is None else check_positive(T_max, "T_max", integer=True)
    K_max = default_k_max(R) if K_max is None else check_positive(K_max, "K_max", integer=True)
    if K_max > 2 * R + 1:
        raise ValidationError(f"K_max={K_max} exceeds 2R+1={2 * R + 1}")

    per_K, minima = {}, {}
    surface = {} if keep_surface else None
    results = [None] * len(eps_values)
    pending = list(range(len(eps_values)))
    K = 0
    while pending:
        K += 1
        # beyond T_max + 1 terms every period has only aliased columns left,
        # so e(K) can no longer decrease
        if K > K_max or K > T_max + 1:
            break
        curve = period_error_curve(K, b, T_max, n_jobs)
        i = int(np.argmin(curve))
        per_K[K] = (i + 1, float(curve[i]))
        minima[K] = count_local_minima(curve)
        if surface is not None:
            surface[K] = curve
        still = []
        for idx in pending:
            eps = eps_values[idx]
            e, T_star = math.inf, None
            for T, e0 in enumerate(curve.tolist(), 1):
                # acceptance rule: e0 <= min(e, eps); exact ties keep the earlier T
                if e0 <= min(e, eps) and e0 < e:
                    T_star, e = T, e0
            if T_star is None:
                still.append(idx)
            else:
                results[idx] = (K, T_star)
        pending = still

    reports = []
    for idx, eps in enumerate(eps_values):
        if results[idx] is None:
            K_best = min(per_K, key=lambda k: (per_K[k][1], k))
            best = _finish(b, K_best, per_K[K_best][0], eps, T_max,
                           dict(per_K), dict(minima), surface)
            raise ToleranceUnreachableError(
                f"tolerance {eps!r} unreachable within K_max={K_max}, T_max={T_max} "
                f"(best e(K)={best.achieved_error!r} at K={best.K_star}, T={best.T_star})",
                best)
        K_star, T_star = results[idx]
        per = {k: v for k, v in per_K.items() if k <= K_star}
        mins = {k: v for k, v in minima.items() if k <= K_star}
        surf = None if surface is None else {k: v for k, v in surface.items() if k <= K_star}
        reports.append(_finish(b, K_star, T_star, eps, T_max, per, mins, surf))
    return reports


def optimize_parameters(b, eps, T_max=None, K_max=None, n_jobs=1, keep_surface=False):
    """Smallest order whose best-period residual is at most ``eps``.

    Parameters
    ----------
    b : RangeKernelSamples
        Target kernel samples.
    eps : float
        Tolerance on the residual sum of squares.
    T_max : int, optional
        Largest half-period scanned (default ``10 R``).
    K_max : int, optional
        Largest order tried (default ``2R + 1``).
    n_jobs : int
        Worker threads for the period scan; output does not depend on it.
    keep_surface : bool
        Keep every ``E(K, T)`` curve on the report (for CSV export).

    Raises
    ------
    ToleranceUnreachableError
        If no order up to ``K_max`` meets ``eps``; ``.report`` holds the
        best fit found.
    """
    return optimize_parameters_multi(b, [eps], T_max, K_max, n_jobs, keep_surface)[0]
