"""Offline table of optimal (order, half-period) over a (sigma, eps) grid.

The tolerance axis is stored as ``log10(1/eps)``.  Off-grid queries use
bilinear interpolation; the order is rounded up and the period to the
nearest integer.  Coefficients are not stored and must be re-fitted with
:func:`fourier_bilateral.approx.fit_fixed_period`.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive
from .approx import optimize_parameters_multi
from .exceptions import LUTBuildError, ParseError, ToleranceUnreachableError, ValidationError
from .kernels import RangeKernelSpec, sample_range_kernel

# Absorbs rounding noise before taking the ceiling of an interpolated order.
_CEIL_SLACK = 1e-9


def _strictly_ascending(values, name):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError(f"{name} needs at least 2 entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    if np.any(np.diff(arr) <= 0):
        raise ValidationError(f"{name} must be strictly ascending, got {arr.tolist()}")
    arr.setflags(write=False)
    return arr


def _int_table(values, shape, name):
    arr = np.asarray(values)
    if arr.shape != shape:
        raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValidationError(f"{name} must hold integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 1):
        raise ValidationError(f"{name} entries must be positive")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LookupTable:
    """``K_table[i, j]`` and ``T_table[i, j]`` belong to ``sigma_grid[i]``
    and ``logeps_grid[j]``."""

    sigma_grid: np.ndarray
    logeps_grid: np.ndarray
    K_table: np.ndarray = field(repr=False)
    T_table: np.ndarray = field(repr=False)
    R: int = 255

    def __post_init__(self):
        object.__setattr__(self, "R", check_positive(self.R, "R", integer=True))
        sig = _strictly_ascending(self.sigma_grid, "sigma grid")
        if sig[0] <= 0:
            raise ValidationError("sigma grid entries must be > 0")
        leps = _strictly_ascending(self.logeps_grid, "log10(1/eps) grid")
        shape = (sig.size, leps.size)
        object.__setattr__(self, "sigma_grid", sig)
        object.__setattr__(self, "logeps_grid", leps)
        object.__setattr__(self, "K_table", _int_table(self.K_table, shape, "K table"))
        object.__setattr__(self, "T_table", _int_table(self.T_table, shape, "T table"))

    @property
    def eps_grid(self):
        return 10.0 ** (-self.logeps_grid)

    def __eq__(self, other):
        if not isinstance(other, LookupTable):
            return NotImplemented
        return (self.R == other.R
                and np.array_equal(self.sigma_grid, other.sigma_grid)
                and np.array_equal(self.logeps_grid, other.logeps_grid)
                and np.array_equal(self.K_table, other.K_table)
                and np.array_equal(self.T_table, other.T_table))

    __hash__ = None


def build_lut(sigma_grid, eps_grid, R=255, T_max=None, K_max=None, n_jobs=1,
              kind="gaussian"):
    """Fill a table by running the order/period search at every grid node.

    All tolerances for one sigma share a single search, so each node holds
    exactly what :func:`optimize_parameters` returns for that (sigma, eps).
    Rows are processed in parallel when ``n_jobs > 1``.
    """
    eps = np.asarray(eps_grid, dtype=np.float64)
    if eps.ndim != 1 or np.any(~np.isfinite(eps)) or np.any((eps <= 0) | (eps >= 1)):
        raise ValidationError(f"eps values must lie in (0, 1), got {eps_grid!r}")
    eps_sorted = np.sort(eps)[::-1]
    logeps = _strictly_ascending([-math.log10(e) for e in eps_sorted], "log10(1/eps) grid")
    sig = _strictly_ascending(sigma_grid, "sigma grid")
    if sig[0] <= 0:
        raise ValidationError("sigma grid entries must be > 0")

    def row(s):
        b = sample_range_kernel(RangeKernelSpec(kind, R, float(s)))
        try:
            reports = optimize_parameters_multi(b, eps_sorted.tolist(), T_max, K_max)
        except ToleranceUnreachableError as exc:
            raise LUTBuildError(f"cell sigma={s!r} failed: {exc}", sigma=float(s)) from exc
        return [r.K_star for r in reports], [r.T_star for r in reports]

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(row, sig))
    else:
        rows = [row(s) for s in sig]
    K = np.array([r[0] for r in rows], dtype=np.int64)
    T = np.array([r[1] for r in rows], dtype=np.int64)
    return LookupTable(sig, logeps, K, T, R)


def _bracket(grid, x, name):
    if not grid[0] <= x <= grid[-1]:
        raise ValidationError(f"{name}={x!r} outside table range [{grid[0]}, {grid[-1]}]")
    i = int(np.searchsorted(grid, x, side="right")) - 1
    i = min(i, grid.size - 2)
    u = (x - grid[i]) / (grid[i + 1] - grid[i])
    return i, u


def interpolate(table, sigma, eps):
    """Bilinear interpolation of (K, T) as floats."""
    sigma = check_positive(sigma, "sigma")
    eps = check_positive(eps, "eps")
    i, u = _bracket(table.sigma_grid, sigma, "sigma")
    j, v = _bracket(table.logeps_grid, -math.log10(eps), "log10(1/eps)")

    def lerp(Z):
        Z = Z.astype(np.float64)
        return ((1 - u) * (1 - v) * Z[i, j] + u * (1 - v) * Z[i + 1, j]
                + (1 - u) * v * Z[i, j + 1] + u * v * Z[i + 1, j + 1])

    return lerp(table.K_table), lerp(table.T_table)


def query_lut(table, sigma, eps):
    """Interpolated ``(K, T)``; ``K`` is rounded up, ``T`` to nearest.

    Raises
    ------
    ValidationError
        If the query lies outside the grid (no extrapolation).
    """
    k, t = interpolate(table, sigma, eps)
    return int(math.ceil(k - _CEIL_SLACK)), max(1, int(math.floor(t + 0.5)))


def trend_violations(table):
    """Cells breaking the expected trends along sigma at fixed eps.

    The order is expected to be non-increasing and the period
    non-decreasing as sigma grows.  Returned as a list of strings for
    reporting; violations are not errors.
    """
    out = []
    for j, le in enumerate(table.logeps_grid):
        for i in range(table.sigma_grid.size - 1):
            s0, s1 = table.sigma_grid[i], table.sigma_grid[i + 1]
            if table.K_table[i + 1, j] > table.K_table[i, j]:
                out.append(f"K increases from sigma={s0:g} to {s1:g} at log10(1/eps)={le:g}")
            if table.T_table[i + 1, j] < table.T_table[i, j]:
                out.append(f"T decreases from sigma={s0:g} to {s1:g} at log10(1/eps)={le:g}")
    return out


def _fmt_row(tag, values):
    return tag + " " + " ".join(str(v) for v in values) + "\n"


def save_lut(table, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"R {table.R}\n")
        fh.write(_fmt_row("sigma", [repr(float(v)) for v in table.sigma_grid]))
        fh.write(_fmt_row("logeps", [repr(float(v)) for v in table.logeps_grid]))
        for r in table.K_table:
            fh.write(_fmt_row("K", r.tolist()))
        for r in table.T_table:
            fh.write(_fmt_row("T", r.tolist()))


def _parse_values(parts, conv, lineno, what):
    try:
        return [conv(p) for p in parts]
    except ValueError:
        raise ParseError(f"invalid {what} entry in {parts!r}", lineno) from None


def load_lut(path):
    """Read a table written by :func:`save_lut`."""
    with open(path, encoding="utf-8") as fh:
        lines = [(n, ln.split()) for n, ln in enumerate(fh, 1)]
    lines = [(n, p) for n, p in lines if p]
    if not lines:
        raise ParseError(f"{path}: empty lookup table file")

    def expect(idx, tag):
        if idx >= len(lines):
            raise ParseError(f"missing '{tag}' line", lines[-1][0] + 1)
        n, parts = lines[idx]
        if parts[0] != tag:
            raise ParseError(f"expected '{tag}', got {parts[0]!r}", n)
        if len(parts) < 2:
            raise ParseError(f"'{tag}' line has no values", n)
        return n, parts[1:]

    n, vals = expect(0, "R")
    if len(vals) != 1:
        raise ParseError("R line must hold one integer", n)
    R = _parse_values(vals, int, n, "R")[0]
    n, vals = expect(1, "sigma")
    sigma = _parse_values(vals, float, n, "sigma")
    n, vals = expect(2, "logeps")
    logeps = _parse_values(vals, float, n, "logeps")

    tables = {}
    idx = 3
    for tag in ("K", "T"):
        rows = []
        for _ in sigma:
            n, vals = expect(idx, tag)
            if len(vals) != len(logeps):
                raise ParseError(f"'{tag}' row has {len(vals)} entries, expected {len(logeps)}", n)
            rows.append(_parse_values(vals, int, n, tag))
            idx += 1
        tables[tag] = rows
    if idx != len(lines):
        raise ParseError("unexpected trailing content", lines[idx][0])
    try:
        return LookupTable(np.array(sigma), np.array(logeps),
                           np.array(tables["K"], dtype=np.int64),
                           np.array(tables["T"], dtype=np.int64), R)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None
