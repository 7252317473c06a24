"""Command-line front end.

Subcommands: generate, check-net, integrate, convergence, thin-demo.
Data goes to stdout (or --out) as CSV; warnings and summaries go to stderr.
Exit codes: 0 success, 1 net check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import math
import sys
from fractions import Fraction

import numpy as np

from .estimators import Variant, estimate, fit_slope, fmt, run_convergence
from .integrands import INTEGRAND_NAMES, get_integrand
from .nets import NetSizeError, is_tmd_net, log2_size, strict_t
from .scramble import MASK64, ScrambleConfig, scramble_block
from .sobol import ORDERS, PointMatrix, SequenceConfig, block, radical_inverse

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SKIP_WARNING = ("warning: --skip/--stride drop or thin points; the retained points are "
                "generally not a digital net and RQMC accuracy can degrade sharply")
_DECLARED_SLOPES = {Variant.KEEP_FIRST: -1.5, Variant.DROP_FIRST: -1.0, Variant.OFFSET: -1.0}


class UsageError(Exception):
    pass


def thin_demo(stride: int, coord: int = 1, n_total: int = 1 << 20, bins: int = 32,
              order: str = "natural") -> np.ndarray:
    """Histogram counts of one coordinate of every ``stride``-th point.

    Keeps the points with 0-based indices ``stride * i`` for
    ``0 <= i < n_total // stride`` and bins coordinate ``coord`` (1 or 2)
    into ``bins`` equal cells of [0, 1).
    """
    values = thinned_values(stride, coord, n_total, order)
    cells = (values.astype(np.float64) / 2.0 ** 32 * bins).astype(np.int64)
    return np.bincount(np.minimum(cells, bins - 1), minlength=bins)


def thinned_values(stride: int, coord: int, n_total: int, order: str = "natural") -> np.ndarray:
    if stride < 2:
        raise ValueError("thinning needs stride >= 2")
    if coord not in (1, 2):
        raise ValueError("coord must be 1 or 2")
    log2_size(n_total)
    count = n_total // stride
    if count < 1:
        raise ValueError(f"stride {stride} leaves no points out of {n_total}")
    idx = np.arange(count, dtype=np.uint64) * np.uint64(stride)
    if coord == 1 and order == "natural":
        return radical_inverse(idx)
    pm = block(0, n_total, SequenceConfig(coord, order=order))
    return pm.values[idx.astype(np.int64), coord - 1]


def dyadic_hull(values: np.ndarray, precision: int = 32) -> tuple[Fraction, Fraction]:
    """Smallest interval [c/2^k, (c+1)/2^k) holding every value."""
    lo, hi = int(values.min()), int(values.max())
    k = precision - (lo ^ hi).bit_length()
    c = lo >> (precision - k)
    return Fraction(c, 1 << k), Fraction(c + 1, 1 << k)


def _short(q: Fraction) -> str:
    return format(float(q), "g")


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmcnet",
        description="Sobol' points, nested uniform scrambling, net checks and "
                    "drop-first convergence experiments.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def points_flags(p, n_default=None):
        p.add_argument("--d", type=_positive, default=2,
                       help="dimension (default: 2)")
        p.add_argument("--n", type=_positive, default=n_default, required=n_default is None,
                       help="number of points")
        p.add_argument("--skip", type=_nonneg, default=0,
                       help="points to drop before collecting (default: 0); demonstration only")
        p.add_argument("--order", choices=ORDERS, default="natural",
                       help="index order of the sequence (default: natural)")
        p.add_argument("--scramble", action="store_true",
                       help="apply a nested uniform scramble")
        p.add_argument("--seed", type=_u64, default=1,
                       help="scramble seed, unsigned 64-bit (default: 1)")
        p.add_argument("--replicate", type=_nonneg, default=0,
                       help="scramble replicate index under --seed (default: 0)")
        p.add_argument("--out", default="-", help="output file (default: stdout)")

    p = sub.add_parser("generate", help="write Sobol' points as CSV",
                       description="Write points as CSV with columns x1..xd. Values are "
                                   "decimal fractions in [0,1) with 17 significant digits, "
                                   "or numerator/2^precision with --exact.")
    points_flags(p)
    p.add_argument("--stride", type=_positive, default=1,
                   help="keep every stride-th point (default: 1, no thinning); demonstration only")
    p.add_argument("--exact", action="store_true",
                   help="print exact rationals numerator/2^precision")

    p = sub.add_parser("check-net", help="check the (t,m,d)-net property",
                       description="Check whether n = 2^m points form a (t,m,d)-net in base 2. "
                                   "Without --t, report the strict t-value. Exit 0 pass, "
                                   "1 fail, 2 invalid input.")
    points_flags(p)
    p.add_argument("--t", type=_nonneg, default=None,
                   help="quality parameter t to check (default: report strict t)")

    p = sub.add_parser("integrate", help="estimate the mean of a test integrand",
                       description="One estimate per replicate, as CSV. Unscrambled unless "
                                   "--scramble is given; the offset variant is never scrambled.")
    p.add_argument("--fn", choices=INTEGRAND_NAMES, required=True, help="integrand name")
    p.add_argument("--d", type=_positive, default=None,
                   help="dimension (default: 3; wingweight is always 10)")
    p.add_argument("--n", type=_positive, required=True, help="number of points, a power of 2")
    p.add_argument("--variant", type=_variant, default=Variant.KEEP_FIRST,
                   help="keep-first | drop-first | offset (default: keep-first)")
    p.add_argument("--scramble", action="store_true", help="apply a nested uniform scramble")
    p.add_argument("--seed", type=_u64, default=1, help="scramble seed (default: 1)")
    p.add_argument("--replicates", type=_positive, default=1,
                   help="number of scramble replicates (default: 1)")
    p.add_argument("--out", default="-", help="output file (default: stdout)")

    p = sub.add_parser("convergence", help="replicated error versus n",
                       description="RMSE (known mean) or replicate SD (unknown mean) for "
                                   "n = 2^m, m-min <= m <= m-max. Slopes go to stderr.")
    p.add_argument("--fn", choices=INTEGRAND_NAMES, required=True, help="integrand name")
    p.add_argument("--d", type=_positive, default=None,
                   help="dimension (default: 3; wingweight is always 10)")
    p.add_argument("--m-min", type=_nonneg, default=5, help="smallest log2(n) (default: 5)")
    p.add_argument("--m-max", type=_nonneg, default=13, help="largest log2(n) (default: 13)")
    p.add_argument("--replicates", type=_positive, default=10,
                   help="independent scrambles per n, at least 2 (default: 10)")
    p.add_argument("--seed", type=_u64, default=1, help="scramble seed (default: 1)")
    p.add_argument("--variant", type=_variant, action="append", default=None,
                   help="repeatable; default: keep-first and drop-first")
    p.add_argument("--raw", action="store_true", help="emit per-replicate estimates")
    p.add_argument("--out", default="-", help="output file (default: stdout)")

    p = sub.add_parser("thin-demo", help="histogram of a thinned Sobol' coordinate",
                       description="Keep points with 0-based index stride*i, i < n/stride, "
                                   "and histogram one coordinate over [0,1).")
    p.add_argument("--stride", type=_positive, required=True,
                   help="thinning interval, at least 2")
    p.add_argument("--coord", type=int, choices=(1, 2), default=1,
                   help="coordinate to histogram (default: 1)")
    p.add_argument("--n", type=_positive, default=1 << 20,
                   help="points generated before thinning, a power of 2 (default: 2^20)")
    p.add_argument("--bins", type=_positive, default=32, help="histogram cells (default: 32)")
    p.add_argument("--order", choices=ORDERS, default="natural",
                   help="index order of the sequence (default: natural)")
    p.add_argument("--out", default="-", help="output file (default: stdout)")
    return parser


@contextlib.contextmanager
def _output(path: str, stdout):
    if path == "-":
        yield stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _collect(args) -> PointMatrix:
    seq = SequenceConfig(args.d, order=args.order)
    stride = getattr(args, "stride", 1)
    pm = block(args.skip, (args.n - 1) * stride + 1, seq)
    if stride > 1:
        pm = PointMatrix(pm.values[::stride], pm.precision, args.skip, pm.order)
    if args.scramble:
        pm = scramble_block(pm, ScrambleConfig(args.seed, args.replicate))
    return pm


def _cmd_generate(args, out, err) -> int:
    pm = _collect(args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(1, pm.d + 1)])
    if args.exact:
        denom = f"/2^{pm.precision}"
        for row in pm.values:
            w.writerow([f"{int(v)}{denom}" for v in row])
    else:
        for row in pm.to_float():
            w.writerow([fmt(v) for v in row])
    return EXIT_OK


def _cmd_check_net(args, out, err) -> int:
    m = log2_size(args.n)
    if args.t is not None and args.t > m:
        raise UsageError(f"--t {args.t} exceeds m={m}")
    pm = _collect(args)
    if args.t is None:
        st = strict_t(pm)
        out.write(f"strict t={st.t} m={st.m} d={st.d}\n")
        return EXIT_OK
    verdict = is_tmd_net(pm, args.t)
    out.write(f"{verdict}\n")
    return EXIT_OK if verdict.is_net else EXIT_FAIL


def _integrand(args):
    if args.fn == "wingweight":
        if args.d not in (None, 10):
            raise UsageError("wingweight is 10-dimensional; drop --d or pass --d 10")
        return get_integrand("wingweight")
    return get_integrand(args.fn, args.d or 3)


def _cmd_integrate(args, out, err) -> int:
    f = _integrand(args)
    variant = args.variant
    if args.n & (args.n - 1):
        raise UsageError(f"--n {args.n} must be a power of 2")
    if variant is Variant.OFFSET and args.scramble:
        raise UsageError("the offset variant uses unscrambled points; drop --scramble")
    if not args.scramble and args.replicates > 1:
        raise UsageError("--replicates needs --scramble")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["integrand", "d", "n", "variant", "replicate", "estimate", "seed"])
    for r in range(args.replicates):
        cfg = ScrambleConfig(args.seed, r) if args.scramble else None
        est = estimate(variant, f, args.n, cfg)
        w.writerow([f.name, f.dimension, args.n, variant.value, r, fmt(est),
                    args.seed if args.scramble else ""])
    return EXIT_OK


def _cmd_convergence(args, out, err) -> int:
    f = _integrand(args)
    if args.m_min > args.m_max:
        raise UsageError("--m-min exceeds --m-max")
    if args.replicates < 2:
        raise UsageError("--replicates must be at least 2")
    variants = args.variant or [Variant.KEEP_FIRST, Variant.DROP_FIRST]
    variants = list(dict.fromkeys(variants))
    table = run_convergence(f, variants, range(args.m_min, args.m_max + 1),
                            args.replicates, args.seed)
    out.write(table.to_csv(raw=args.raw))
    if args.m_max - args.m_min >= 2:
        for v in variants:
            try:
                rep = fit_slope(table, v, _DECLARED_SLOPES[v])
            except ValueError as exc:
                err.write(f"# {v.value}: {exc}\n")
                continue
            err.write(f"# {v.value}: ls_slope={rep.ls_slope:.4f} "
                      f"anchored_deviation={rep.anchored_deviation:.4f} "
                      f"(declared slope {rep.declared_slope:g})\n")
    return EXIT_OK


def _cmd_thin_demo(args, out, err) -> int:
    if args.stride < 2:
        raise UsageError("--stride must be at least 2")
    log2_size(args.n)
    values = thinned_values(args.stride, args.coord, args.n, args.order)
    counts = thin_demo(args.stride, args.coord, args.n, args.bins, args.order)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["bin", "low", "high", "count"])
    for b, c in enumerate(counts):
        w.writerow([b, fmt(b / args.bins), fmt((b + 1) / args.bins), int(c)])
    lo, hi = dyadic_hull(values)
    ratio = math.inf if counts.min() == 0 else counts.max() / counts.min()
    err.write(f"retained {values.size} of {args.n} points; coordinate {args.coord} "
              f"range ⊂ [{_short(lo)},{_short(hi)}); max/min bin ratio {ratio:g}\n")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "check-net": _cmd_check_net,
    "integrate": _cmd_integrate,
    "convergence": _cmd_convergence,
    "thin-demo": _cmd_thin_demo,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "skip", 0) or getattr(args, "stride", 1) > 1:
        stderr.write(SKIP_WARNING + "\n")
    try:
        with _output(args.out, stdout) as out:
            return _COMMANDS[args.command](args, out, stderr)
    except (UsageError, NetSizeError, ValueError, KeyError, OverflowError) as exc:
        stderr.write(f"qmcnet {args.command}: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


def run_captured(argv: list[str]) -> tuple[int, str, str]:
    """Run the CLI and return (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out):
        code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()
