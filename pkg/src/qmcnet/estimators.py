"""Keep-first, drop-first and offset estimators plus convergence experiments.

With 0-based indices, keep-first averages f over points 0..n-1 and
drop-first over points 1..n. Both are computed from one scrambled stream
per replicate, so for every replicate

    drop_first = keep_first + (f(x_n) - f(x_0)) / n

holds up to rounding. Sums use ``math.fsum`` so each estimate is the
correctly rounded mean of the evaluated values.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .integrands import Integrand
from .scramble import ScrambleConfig, scramble_block
from .sobol import SequenceConfig, block


class Variant(str, enum.Enum):
    KEEP_FIRST = "keep-first"
    DROP_FIRST = "drop-first"
    OFFSET = "offset"

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, Variant):
            return value
        try:
            return cls(value.replace("_", "-"))
        except ValueError:
            raise ValueError(
                f"unknown variant {value!r}; choose from "
                f"{', '.join(v.value for v in cls)}") from None


def _log2_n(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n={n} must be a power of 2")
    return n.bit_length() - 1


def offset_points(n: int, seq: SequenceConfig) -> np.ndarray:
    """First ``n`` unscrambled points shifted by 1/(2n) in every coordinate."""
    _log2_n(n)
    pm = block(0, n, seq)
    shift = (1 << pm.precision) // (2 * n)
    if shift == 0:
        raise ValueError(f"n={n} too large for {pm.precision}-bit points")
    shifted = pm.values.astype(object) + shift
    if any(v >= 1 << pm.precision for v in shifted.ravel()):
        raise ValueError("offset pushes a coordinate to 1 or beyond")
    return (pm.values + np.uint64(shift)).astype(np.float64) / float(1 << pm.precision)


def sample_points(variant: Variant, n: int, d: int,
                  cfg: ScrambleConfig | None = None,
                  seq: SequenceConfig | None = None) -> np.ndarray:
    """The ``n`` points a variant averages over, as floats of shape (n, d)."""
    variant = Variant.parse(variant)
    _log2_n(n)
    seq = seq or SequenceConfig(d)
    if variant is Variant.OFFSET:
        return offset_points(n, seq)
    start = 1 if variant is Variant.DROP_FIRST else 0
    pm = block(start, n, seq)
    if cfg is not None:
        pm = scramble_block(pm, cfg)
    return pm.to_float()


def estimate(variant, f: Integrand, n: int, cfg: ScrambleConfig | None = None,
             seq: SequenceConfig | None = None) -> float:
    """One estimate of the mean of ``f`` from ``n`` points.

    ``cfg=None`` leaves the points unscrambled. The offset variant never
    scrambles.
    """
    x = sample_points(variant, n, f.dimension, cfg, seq)
    return math.fsum(np.asarray(f(x), dtype=np.float64)) / n


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    variant: Variant
    estimates: tuple[float, ...]
    value: float
    metric: str


@dataclass
class ConvergenceTable:
    integrand: str
    d: int
    seed: int
    replicates: int
    true_mean: float | None
    rows: list[ConvergenceRow] = field(default_factory=list)

    @property
    def metric(self) -> str:
        return "rmse" if self.true_mean is not None else "sd"

    def series(self, variant) -> tuple[np.ndarray, np.ndarray]:
        variant = Variant.parse(variant)
        rows = [r for r in self.rows if r.variant is variant]
        return (np.array([r.n for r in rows], dtype=np.float64),
                np.array([r.value for r in rows], dtype=np.float64))

    def to_csv(self, raw: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if raw:
            w.writerow(["integrand", "d", "n", "variant", "replicate", "estimate", "seed"])
            for r in self.rows:
                for rep, est in enumerate(r.estimates):
                    w.writerow([self.integrand, self.d, r.n, r.variant.value, rep,
                                fmt(est), self.seed])
        else:
            w.writerow(["integrand", "d", "n", "variant", "metric", "value",
                        "replicates", "seed"])
            for r in self.rows:
                w.writerow([self.integrand, self.d, r.n, r.variant.value, r.metric,
                            fmt(r.value), self.replicates, self.seed])
        return buf.getvalue()


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def error_metric(estimates: Sequence[float], true_mean: float | None) -> tuple[float, str]:
    est = np.asarray(estimates, dtype=np.float64)
    if true_mean is not None:
        return math.sqrt(math.fsum((est - true_mean) ** 2) / est.size), "rmse"
    return float(np.std(est, ddof=1)), "sd"


def run_convergence(f: Integrand, variants: Iterable = (Variant.KEEP_FIRST, Variant.DROP_FIRST),
                    m_range: Iterable[int] = range(5, 14), replicates: int = 10,
                    seed: int = 1, seq: SequenceConfig | None = None) -> ConvergenceTable:
    """Replicated error of each variant for n = 2**m over ``m_range``.

    Replicate ``r`` scrambles with ``ScrambleConfig(seed, replicate=r)``.
    One stream of ``2**max(m) + 1`` scrambled points per replicate serves
    every ``n``, so keep-first and drop-first always share points.
    """
    variants = [Variant.parse(v) for v in variants]
    ms = sorted(set(m_range))
    if replicates < 2:
        raise ValueError("need at least 2 replicates to measure spread")
    if not ms or ms[0] < 0:
        raise ValueError("m_range must hold non-negative integers")
    seq = seq or SequenceConfig(f.dimension)
    if ms[-1] >= seq.precision:
        raise ValueError(f"m={ms[-1]} exceeds the {seq.precision}-bit index range")
    n_max = 1 << ms[-1]

    values = None
    if Variant.KEEP_FIRST in variants or Variant.DROP_FIRST in variants:
        base = block(0, n_max + 1, seq)
        values = np.empty((replicates, n_max + 1))
        for r in range(replicates):
            pm = scramble_block(base, ScrambleConfig(seed, replicate=r))
            values[r] = f(pm.to_float())

    table = ConvergenceTable(f.name, f.dimension, seed, replicates, f.true_mean)
    for m in ms:
        n = 1 << m
        for variant in variants:
            if variant is Variant.OFFSET:
                # deterministic: every replicate gives the same value
                est = [estimate(Variant.OFFSET, f, n, seq=seq)] * replicates
            else:
                lo = 1 if variant is Variant.DROP_FIRST else 0
                est = [math.fsum(values[r, lo:lo + n]) / n for r in range(replicates)]
            value, metric = error_metric(est, f.true_mean)
            table.rows.append(ConvergenceRow(n, variant, tuple(est), value, metric))
    return table


@dataclass(frozen=True)
class SlopeReport:
    ls_slope: float
    ls_intercept: float
    declared_slope: float
    anchored_deviation: float


def fit_slope(table: ConvergenceTable, variant, declared_slope: float) -> SlopeReport:
    """Least-squares slope of log2(error) on log2(n), plus the largest gap to
    a line of ``declared_slope`` through the smallest-n point."""
    ns, errs = table.series(variant)
    return fit_power_law(ns, errs, declared_slope)


def fit_power_law(ns, errs, declared_slope: float) -> SlopeReport:
    ns = np.asarray(ns, dtype=np.float64)
    errs = np.asarray(errs, dtype=np.float64)
    if ns.size < 3:
        raise ValueError(f"need at least 3 points to fit a slope, got {ns.size}")
    if np.any(errs <= 0):
        raise ValueError("errors must be positive to fit on a log scale")
    x, y = np.log2(ns), np.log2(errs)
    slope, intercept = np.polyfit(x, y, 1)
    anchored = y[0] + declared_slope * (x - x[0])
    return SlopeReport(float(slope), float(intercept), float(declared_slope),
                       float(np.max(np.abs(y - anchored))))


def reference_curve(ns, anchor_n: float, anchor_value: float, slope: float,
                    log_power: float = 0.0) -> np.ndarray:
    """``anchor_value * (n/anchor_n)**slope * (log n / log anchor_n)**log_power``.

    ``log_power=1`` with ``slope=-1.5`` gives the log(n)/n^{3/2} reference.
    """
    ns = np.asarray(ns, dtype=np.float64)
    curve = anchor_value * (ns / anchor_n) ** slope
    if log_power:
        curve = curve * (np.log(ns) / math.log(anchor_n)) ** log_power
    return curve
