"""Exact (t, m, d)-net checks in base 2 by elementary-interval counting.

An elementary interval is a product of dyadic cells
``[c_j / 2**k_j, (c_j + 1) / 2**k_j)``. Membership is decided on the
leading ``k_j`` digits of each fixed-point coordinate, so points on a
lower cell boundary are counted inside and no float rounding enters.

Each shape ``k`` is checked with one bucketing pass: the leading digits
of all coordinates are packed into a single cell index and counted with
``np.bincount``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .sobol import PointMatrix


class NetSizeError(ValueError):
    """The point count is not a power of two, so the net property is undefined."""


@dataclass(frozen=True)
class IntervalSpec:
    k: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "c", tuple(int(v) for v in self.c))
        if len(self.k) != len(self.c):
            raise ValueError("k and c must have the same length")
        for kj, cj in zip(self.k, self.c):
            if kj < 0 or not 0 <= cj < (1 << kj):
                raise ValueError(f"need k_j >= 0 and 0 <= c_j < 2^k_j, got k={self.k} c={self.c}")

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def level(self) -> int:
        return sum(self.k)

    @property
    def volume(self) -> float:
        return 2.0 ** -self.level

    def bounds(self) -> list[tuple[float, float]]:
        return [(cj / 2 ** kj, (cj + 1) / 2 ** kj) for kj, cj in zip(self.k, self.c)]

    def __str__(self) -> str:
        return f"k=({','.join(map(str, self.k))}) c=({','.join(map(str, self.c))})"


@dataclass(frozen=True)
class NetVerdict:
    is_net: bool
    t_checked: int
    m: int
    witness: IntervalSpec | None = None
    count: int | None = None
    expected: int | None = None

    def __str__(self) -> str:
        if self.is_net:
            return f"PASS t={self.t_checked} m={self.m}"
        return f"FAIL {self.witness} count={self.count} expected={self.expected}"


@dataclass(frozen=True)
class StrictT:
    t: int
    m: int
    d: int


def count_in_interval(pm: PointMatrix, iv: IntervalSpec) -> int:
    if iv.d != pm.d:
        raise ValueError(f"interval has {iv.d} dimensions, points have {pm.d}")
    if max(iv.k, default=0) > pm.precision:
        raise ValueError(f"k_j exceeds the point precision {pm.precision}")
    inside = np.ones(pm.n, dtype=bool)
    for j, (kj, cj) in enumerate(zip(iv.k, iv.c)):
        inside &= (pm.values[:, j] >> np.uint64(pm.precision - kj)) == np.uint64(cj)
    return int(inside.sum())


def enumerate_shapes(m: int, t: int, d: int) -> list[tuple[int, ...]]:
    """All ``k`` with ``|k| = m - t``, in decreasing lexicographic order."""
    if d < 1:
        raise ValueError("d must be positive")
    if not 0 <= t <= m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first, *rest)

    shapes = list(compositions(m - t, d))
    assert len(shapes) == comb(m - t + d - 1, d - 1)
    return shapes


def witness_order(shapes: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    # most cube-like shapes first; ties keep decreasing lexicographic order
    return sorted(shapes, key=max)


def log2_size(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise NetSizeError(f"net property undefined for n={n}; n must be a power of 2")
    return n.bit_length() - 1


class _DigitCache:
    """Leading digits of every coordinate, computed once per depth."""

    def __init__(self, pm: PointMatrix, dtype=np.int32):
        self.pm = pm
        self.dtype = dtype
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def __call__(self, j: int, k: int) -> np.ndarray:
        key = (j, k)
        if key not in self._cache:
            col = self.pm.values[:, j] >> np.uint64(self.pm.precision - k)
            self._cache[key] = col.astype(self.dtype)
        return self._cache[key]

    def cell_index(self, shape: tuple[int, ...]) -> np.ndarray:
        idx = np.zeros(self.pm.n, dtype=self.dtype)
        for j, kj in enumerate(shape):
            if kj:
                np.left_shift(idx, kj, out=idx)
                np.bitwise_or(idx, self(j, kj), out=idx)
        return idx


def _digit_cache(pm: PointMatrix, level: int) -> _DigitCache:
    return _DigitCache(pm, np.int32 if level <= 30 else np.int64)


def _check_level(pm: PointMatrix, m: int, t: int, digits: _DigitCache) -> NetVerdict:
    level = m - t
    if level > pm.precision:
        raise ValueError(f"cells at level {level} are finer than the point precision")
    expected = 1 << t
    for shape in witness_order(enumerate_shapes(m, t, pm.d)):
        idx = digits.cell_index(shape)
        counts = np.bincount(idx, minlength=1 << level)
        bad = counts != expected
        if bad.any():
            # cell index packs c_1 in the top bits, so argmax gives the lexicographically first c
            cell = int(np.argmax(bad))
            c = []
            for kj in reversed(shape):
                c.append(cell & ((1 << kj) - 1))
                cell >>= kj
            witness = IntervalSpec(shape, tuple(reversed(c)))
            return NetVerdict(False, t, m, witness, int(counts[np.argmax(bad)]), expected)
    return NetVerdict(True, t, m)


def is_tmd_net(pm: PointMatrix, t: int) -> NetVerdict:
    """Check whether ``pm`` is a (t, m, d)-net in base 2 with ``n = 2**m``.

    On failure the witness is the first unbalanced interval when shapes are
    taken most cube-like first (smallest ``max(k)``), ties in decreasing
    lexicographic order of ``k``, then cells in increasing order of ``c``.
    """
    m = log2_size(pm.n)
    if not 0 <= t <= m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")
    return _check_level(pm, m, t, _digit_cache(pm, m - t))


def strict_t(pm: PointMatrix) -> StrictT:
    """Smallest ``t`` for which ``pm`` is a (t, m, d)-net."""
    m = log2_size(pm.n)
    digits = _digit_cache(pm, m)
    for t in range(max(0, m - pm.precision), m + 1):
        if _check_level(pm, m, t, digits).is_net:
            return StrictT(t, m, pm.d)
    raise AssertionError("the whole-cube check at t=m cannot fail")
