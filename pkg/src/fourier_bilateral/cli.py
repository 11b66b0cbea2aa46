"""Command-line interface: ``fourier-bilateral <command> [options]``.

Commands: optimize, build-lut, query-lut, filter, compare.  Timings go to
stderr; results go to stdout or the requested files.
"""

import argparse
import logging
import sys
import time

import numpy as np

from . import approx as approx_mod
from .datasets import parse_synthetic
from .exceptions import (LUTBuildError, ParseError, ToleranceUnreachableError,
                         ValidationError)
from .filtering import BorderPolicy, brute_bilateral, fast_bilateral
from .kernels import (RangeKernelSpec, build_spatial_kernel, load_tabulated_kernel,
                      sample_range_kernel)
from .lut import build_lut, load_lut, query_lut, save_lut, trend_violations
from .metrics import CSV_HEADER, compare_filters
from .pgm import read_pgm, write_pgm

log = logging.getLogger("fourier_bilateral")


def _float_list(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _range_kernel(args):
    kind = args.kernel
    if kind.startswith("table:"):
        spec = load_tabulated_kernel(kind[len("table:"):])
        if spec.R != args.range:
            raise ValidationError(f"table has R={spec.R}, but --range is {args.range}")
        return sample_range_kernel(spec)
    if args.sigma is None:
        raise ValidationError(f"--sigma is required for the {kind} kernel")
    return sample_range_kernel(RangeKernelSpec(kind, args.range, args.sigma))


def _load_image(args):
    src = args.input
    if src.startswith(("synthetic:", "random:")):
        return parse_synthetic(src, args.seed)
    return read_pgm(src)


def _stage(name, seconds):
    print(f"[time] {name}: {seconds * 1e3:.1f} ms", file=sys.stderr)


def _select_approximation(args, b):
    """Pick (approximation, report) from --K/--T, --lut or --eps."""
    method = getattr(args, "method", "fast")
    report = None
    if args.K is not None:
        K = args.K
        if method == "fbf":
            T = b.R
        elif args.T is not None:
            T = args.T
        else:
            T, _ = approx_mod.min_error_over_period(K, b, args.tmax, args.threads)
        return approx_mod.fit_fixed_period(b, K, T), None
    if getattr(args, "lut", None):
        K, T = query_lut(load_lut(args.lut), args.sigma, args.eps)
        log.info("lookup table gives K=%d T=%d", K, T)
    else:
        report = approx_mod.optimize_parameters(b, args.eps, T_max=args.tmax,
                                                n_jobs=args.threads)
        K, T = report.K_star, report.T_star
    if method == "fbf":
        T = b.R
    if report is not None and (K, T) == (report.K_star, report.T_star):
        return report.approximation, report
    return approx_mod.fit_fixed_period(b, K, T), report


def cmd_optimize(args):
    b = _range_kernel(args)
    t0 = time.perf_counter()
    try:
        report = approx_mod.optimize_parameters(
            b, args.eps, T_max=args.tmax, K_max=args.kmax, n_jobs=args.threads,
            keep_surface=bool(args.dump_surface))
        status = 0
    except ToleranceUnreachableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report, status = exc.report, 1
    _stage("fit", time.perf_counter() - t0)
    sys.stdout.write(report.to_text())
    if args.dump_surface:
        approx_mod.write_surface_csv(args.dump_surface, report)
    return status


def cmd_build_lut(args):
    t0 = time.perf_counter()
    table = build_lut(args.sigmas, args.epsilons, R=args.range, T_max=args.tmax,
                      n_jobs=args.threads)
    _stage("build", time.perf_counter() - t0)
    save_lut(table, args.out)
    for msg in trend_violations(table):
        print(f"note: {msg}", file=sys.stderr)
    return 0


def cmd_query_lut(args):
    K, T = query_lut(load_lut(args.lut), args.sigma, args.eps)
    print(f"K={K} T={T}")
    return 0


def _run_filter(args, img, spatial, b):
    """Return (output, approximation or None)."""
    if args.method == "brute":
        t0 = time.perf_counter()
        out = brute_bilateral(img, spatial, b, args.border)
        _stage("brute", time.perf_counter() - t0)
        return out, None
    t0 = time.perf_counter()
    fitted, _ = _select_approximation(args, b)
    _stage("fit", time.perf_counter() - t0)
    out, diag = fast_bilateral(img, spatial, fitted, args.border, n_jobs=args.threads,
                               return_diagnostics=True)
    for name, sec in diag.timings.items():
        _stage(name, sec)
    if diag.fallback_pixels:
        print(f"note: {diag.fallback_pixels} pixels fell back to input "
              "(non-positive denominator)", file=sys.stderr)
    print(f"K={fitted.K} T={fitted.T} convolutions={diag.n_convolutions}", file=sys.stderr)
    return out, fitted


def cmd_filter(args):
    img = _load_image(args)
    spatial = build_spatial_kernel(args.theta)
    b = _range_kernel(args)
    out, _ = _run_filter(args, img, spatial, b)
    clipped = np.clip(out, 0, args.range)
    n = int(np.count_nonzero(clipped != out))
    if n:
        print(f"note: clamped {n} pixels to [0, {args.range}]", file=sys.stderr)
    write_pgm(clipped, args.out)
    return 0


def cmd_compare(args):
    if args.method == "brute":
        raise ValidationError("compare needs --method fast or fbf")
    img = _load_image(args)
    spatial = build_spatial_kernel(args.theta)
    b = _range_kernel(args)
    t0 = time.perf_counter()
    ref = brute_bilateral(img, spatial, b, args.border)
    _stage("brute", time.perf_counter() - t0)
    out, fitted = _run_filter(args, img, spatial, b)
    resid = b.values - fitted.evaluate(b.lattice)
    result = compare_filters(ref, out, float(resid @ resid), R=b.R)
    row = result.to_csv_row()
    print(CSV_HEADER)
    print(row)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n" + row + "\n")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--border", choices=[p.value for p in BorderPolicy],
                        default="symmetric")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for synthetic:/random: input images")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--range", type=_positive_int, default=255,
                        help="dynamic range R (default 255)")
    common.add_argument("--tmax", type=_positive_int, default=None,
                        help="largest half-period scanned (default 10R)")
    common.add_argument("-v", "--verbose", action="store_true")

    kernel = argparse.ArgumentParser(add_help=False)
    kernel.add_argument("--sigma", type=float)
    kernel.add_argument("--kernel", default="gaussian",
                        help="gaussian, exponential, cauchy or table:<path>")

    parser = argparse.ArgumentParser(prog="fourier-bilateral", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", parents=[common, kernel],
                       help="find the smallest order and best period for a tolerance")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kmax", type=_positive_int, default=None)
    p.add_argument("--dump-surface", metavar="CSV")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("build-lut", parents=[common], help="build a (sigma, eps) lookup table")
    p.add_argument("--sigmas", type=_float_list, required=True)
    p.add_argument("--epsilons", type=_float_list, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_lut)

    p = sub.add_parser("query-lut", parents=[common], help="interpolate (K, T) from a table")
    p.add_argument("--lut", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_query_lut)

    for name, func in (("filter", cmd_filter), ("compare", cmd_compare)):
        p = sub.add_parser(name, parents=[common, kernel])
        p.add_argument("--in", dest="input", required=True,
                       help="P5 PGM path, or synthetic:WxH / random:WxH")
        p.add_argument("--theta", type=float, required=True)
        sel = p.add_mutually_exclusive_group()
        sel.add_argument("--eps", type=float)
        sel.add_argument("--K", type=_positive_int)
        p.add_argument("--T", type=_positive_int)
        p.add_argument("--method", choices=["fast", "brute", "fbf"], default="fast")
        p.add_argument("--lut")
        if name == "filter":
            p.add_argument("--out", required=True)
        else:
            p.add_argument("--report", metavar="CSV")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command in ("filter", "compare"):
        if args.T is not None and args.K is None:
            parser.error("--T requires --K")
        if args.method != "brute" and args.K is None and args.eps is None:
            parser.error("one of --eps or --K is required")
    try:
        return args.func(args)
    except (ValidationError, ParseError, LUTBuildError, ToleranceUnreachableError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
