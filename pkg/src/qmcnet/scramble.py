"""Nested uniform scrambling of base-2 digital points.

Digit ``k`` of each scrambled coordinate is the input digit XOR one
permutation bit. That bit is a keyed pseudorandom function of the
coordinate's leading ``k - 1`` input digits, so points sharing a leading
digit string receive identical flips down to that depth. This is the
nested structure; no permutation tree is ever stored.

Keyed function (fixed, so output is reproducible on any platform):

* ``mix`` is the SplitMix64 finalizer, a bijection on 64-bit words.
* the dimension key is ``mix(mix(mix(seed ^ SEED_TAG) ^ replicate) ^ dim)``
  with ``dim`` 1-based.
* the flip at depth ``k`` (1-based) for leading digits ``p`` is the top bit
  of ``mix(mix(key ^ (k << 56 | p)))``.
* digits beyond the input precision are scrambled zeros; their flips
  depend on the whole input coordinate ``u``, so all of them come from
  the top bits of ``mix(mix(key ^ (2**63 | u)))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sobol import DigitalPoint, PointMatrix

MASK64 = (1 << 64) - 1
SEED_TAG = 0x9E3779B97F4A7C15
_TAIL_TAG = 1 << 63
_DEPTH_SHIFT = 56


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def dimension_key(seed: int, replicate: int, dim: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if replicate < 0 or dim < 1:
        raise ValueError("replicate must be >= 0 and dim >= 1")
    return mix64(mix64(mix64(seed ^ SEED_TAG) ^ replicate) ^ dim)


@dataclass(frozen=True)
class ScrambleKey:
    """Identity of one permutation bit.

    ``digit_path`` holds the input digits above the one being permuted,
    most significant first, as a string of '0'/'1'.
    """

    seed: int
    replicate: int
    dimension: int
    digit_path: str

    def bit(self, in_precision: int = 32, out_precision: int = 53) -> int:
        key = dimension_key(self.seed, self.replicate, self.dimension)
        depth = len(self.digit_path) + 1
        if depth > out_precision:
            raise ValueError(f"depth {depth} exceeds output precision {out_precision}")
        if depth <= in_precision:
            p = int(self.digit_path, 2) if self.digit_path else 0
            return mix64(mix64(key ^ (depth << _DEPTH_SHIFT | p))) >> 63
        head, tail = self.digit_path[:in_precision], self.digit_path[in_precision:]
        if tail.strip("0"):
            raise ValueError("digits past the input precision are zero by construction")
        u = int(head, 2)
        word = mix64(mix64(key ^ (_TAIL_TAG | u)))
        return (word >> (63 - (depth - in_precision - 1))) & 1


@dataclass(frozen=True)
class ScrambleConfig:
    seed: int
    replicate: int = 0
    out_precision: int = 53
    in_precision: int = 32

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.replicate < 0:
            raise ValueError("replicate must be non-negative")
        # leading-digit paths must stay clear of the depth field at bit 56
        if not 1 <= self.in_precision <= _DEPTH_SHIFT:
            raise ValueError(f"in_precision must lie in 1..{_DEPTH_SHIFT}")
        if not self.in_precision <= self.out_precision <= 63:
            raise ValueError("need in_precision <= out_precision <= 63")

    def keys(self, d: int) -> np.ndarray:
        return np.array([dimension_key(self.seed, self.replicate, j)
                         for j in range(1, d + 1)], dtype=np.uint64)


def scramble_values(values: np.ndarray, keys: np.ndarray,
                    in_precision: int = 32, out_precision: int = 53) -> np.ndarray:
    """Scramble raw numerators.

    ``keys`` broadcasts against ``values``; pass one key per column for an
    ordinary point set, or a full array to scramble under many keys at once.
    """
    u = np.asarray(values, dtype=np.uint64)
    keys = np.broadcast_to(np.asarray(keys, dtype=np.uint64), u.shape)
    flips = np.zeros(u.shape, dtype=np.uint64)
    for depth in range(1, in_precision + 1):
        prefix = u >> np.uint64(in_precision - depth + 1)
        h = _mix64_array(_mix64_array(keys ^ (np.uint64(depth << _DEPTH_SHIFT) | prefix)))
        flips |= (h >> np.uint64(63)) << np.uint64(in_precision - depth)
    out = u ^ flips
    extra = out_precision - in_precision
    if extra:
        h = _mix64_array(_mix64_array(keys ^ (np.uint64(_TAIL_TAG) | u)))
        out = (out << np.uint64(extra)) | (h >> np.uint64(64 - extra))
    return out


def scramble_point(u: DigitalPoint, cfg: ScrambleConfig) -> DigitalPoint:
    if u.precision != cfg.in_precision:
        raise ValueError(
            f"point precision {u.precision} does not match in_precision "
            f"{cfg.in_precision}")
    values = np.array([u.coords], dtype=np.uint64)
    out = scramble_values(values, cfg.keys(u.d), cfg.in_precision, cfg.out_precision)
    return DigitalPoint(tuple(int(c) for c in out[0]), cfg.out_precision)


def scramble_block(pm: PointMatrix, cfg: ScrambleConfig) -> PointMatrix:
    """Scramble every point of ``pm`` under the key space of ``cfg``.

    The result depends only on point values, so the same point appearing
    at two indices (or in two overlapping blocks) scrambles identically.
    """
    if pm.precision != cfg.in_precision:
        raise ValueError(
            f"block precision {pm.precision} does not match in_precision "
            f"{cfg.in_precision}")
    out = scramble_values(pm.values, cfg.keys(pm.d), cfg.in_precision, cfg.out_precision)
    return PointMatrix(out, cfg.out_precision, pm.start_index, pm.order)
