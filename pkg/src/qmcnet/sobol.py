"""Unscrambled Sobol' points as exact fixed-point fractions.

Indices are 0-based throughout: index 0 is the origin, the point often
written u_1 in 1-based notation.

Coordinates are stored as unsigned integer numerators over
``2**precision`` so that digit queries never touch floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .direction_numbers import BIT_PRECISION, DirectionTable, default_table, generating_matrix

Order = Literal["natural", "gray"]
ORDERS = ("natural", "gray")
MAX_PRECISION = 63


@dataclass(frozen=True)
class DigitalPoint:
    coords: tuple[int, ...]
    precision: int

    def __post_init__(self):
        limit = 1 << self.precision
        for c in self.coords:
            if not 0 <= c < limit:
                raise ValueError(f"numerator {c} outside [0, 2^{self.precision})")

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, 1 << self.precision) for c in self.coords)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(c / (1 << self.precision) for c in self.coords)

    def digits(self, j: int, k: int) -> int:
        """Leading ``k`` binary digits of coordinate ``j`` (0-based) as an integer."""
        return self.coords[j] >> (self.precision - k)


@dataclass(frozen=True, eq=False)
class PointMatrix:
    """``n`` points in [0,1)^d held as an (n, d) uint64 array of numerators."""

    values: np.ndarray
    precision: int
    start_index: int = 0
    order: Order = "natural"

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.uint64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("a point matrix needs shape (n, d) with n, d >= 1")
        if not 1 <= self.precision <= MAX_PRECISION:
            raise ValueError(f"precision must lie in 1..{MAX_PRECISION}")
        if np.any(values >> np.uint64(self.precision)):
            raise ValueError(f"numerators must lie below 2^{self.precision}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> DigitalPoint:
        return DigitalPoint(tuple(int(c) for c in self.values[i]), self.precision)

    def __iter__(self):
        return (self[i] for i in range(self.n))

    def __eq__(self, other):
        if not isinstance(other, PointMatrix):
            return NotImplemented
        return (self.precision == other.precision
                and self.values.shape == other.values.shape
                and bool(np.array_equal(self.values, other.values)))

    def to_float(self) -> np.ndarray:
        """Float64 copy; exact whenever ``precision <= 53``."""
        return self.values.astype(np.float64) / float(1 << self.precision)

    def digits(self, k: int) -> np.ndarray:
        """Leading ``k`` digits of every coordinate, shape (n, d)."""
        if not 0 <= k <= self.precision:
            raise ValueError(f"k={k} outside 0..{self.precision}")
        return self.values >> np.uint64(self.precision - k)

    def rows(self, start: int, stop: int) -> "PointMatrix":
        return PointMatrix(self.values[start:stop], self.precision,
                           self.start_index + start, self.order)

    def first_dims(self, d: int) -> "PointMatrix":
        return PointMatrix(self.values[:, :d], self.precision,
                           self.start_index, self.order)


@dataclass(frozen=True)
class SequenceConfig:
    d: int
    table: DirectionTable | None = None
    order: Order = "natural"
    precision: int = BIT_PRECISION
    _columns: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if not 1 <= self.precision <= MAX_PRECISION:
            raise ValueError(f"precision must lie in 1..{MAX_PRECISION}")
        table = self.table
        if table is None:
            table = default_table(self.d)
            object.__setattr__(self, "table", table)
        elif self.d > table.max_dimension:
            raise ValueError(
                f"d={self.d} exceeds the table's {table.max_dimension} dimensions")
        cols = [generating_matrix(table.entry(j), self.precision)
                for j in range(1, self.d + 1)]
        cols = np.array(cols, dtype=np.uint64)
        cols.setflags(write=False)
        object.__setattr__(self, "_columns", cols)

    @property
    def columns(self) -> np.ndarray:
        """Generating-matrix columns, shape (d, precision)."""
        return self._columns


def gray_code(i):
    return i ^ (i >> 1)


def _check_range(start: int, count: int, precision: int) -> None:
    if start < 0:
        raise ValueError(f"index must be non-negative, got {start}")
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if start + count > (1 << precision):
        raise OverflowError(
            f"indices up to {start + count - 1} exceed the 2^{precision} "
            f"points available at this precision")


def _generate(indices: np.ndarray, cfg: SequenceConfig) -> np.ndarray:
    if cfg.order == "gray":
        indices = indices ^ (indices >> np.uint64(1))
    out = np.zeros((indices.shape[0], cfg.d), dtype=np.uint64)
    top = int(indices.max()).bit_length()
    cols = cfg._columns
    one = np.uint64(1)
    for b in range(top):
        # XOR in column b wherever bit b of the index is set
        sel = ((indices >> np.uint64(b)) & one).astype(bool)
        out[sel] ^= cols[:, b]
    return out


def point(i: int, cfg: SequenceConfig) -> DigitalPoint:
    """The Sobol' point with 0-based index ``i``."""
    _check_range(i, 1, cfg.precision)
    values = _generate(np.array([i], dtype=np.uint64), cfg)
    return DigitalPoint(tuple(int(c) for c in values[0]), cfg.precision)


def block(start: int, count: int, cfg: SequenceConfig) -> PointMatrix:
    """Points with indices ``start, ..., start + count - 1``.

    Blocks with ``start`` a multiple of ``2**m`` and ``count == 2**m`` are
    (t, m, d)-nets.
    """
    _check_range(start, count, cfg.precision)
    indices = np.arange(start, start + count, dtype=np.uint64)
    return PointMatrix(_generate(indices, cfg), cfg.precision, start, cfg.order)


def sobol(n: int, d: int, *, skip: int = 0, order: Order = "natural") -> np.ndarray:
    """Convenience: ``n`` unscrambled points as floats, after skipping ``skip``."""
    return block(skip, n, SequenceConfig(d, order=order)).to_float()


def radical_inverse(indices, precision: int = BIT_PRECISION) -> np.ndarray:
    """Base-2 radical inverse of each index, as numerators over 2**precision."""
    idx = np.asarray(indices, dtype=np.uint64)
    if idx.size and int(idx.max()) >= 1 << precision:
        raise OverflowError(f"index exceeds 2^{precision}")
    out = np.zeros_like(idx)
    one = np.uint64(1)
    for b in range(precision):
        out |= ((idx >> np.uint64(b)) & one) << np.uint64(precision - 1 - b)
    return out


def van_der_corput(i: int, precision: int = BIT_PRECISION) -> Fraction:
    """Base-2 radical inverse of ``i`` as an exact fraction."""
    if i < 0:
        raise ValueError("index must be non-negative")
    if i >= 1 << precision:
        raise OverflowError(f"index {i} exceeds 2^{precision}")
    num = int(bin(i)[:1:-1].ljust(precision, "0"), 2)
    return Fraction(num, 1 << precision)
