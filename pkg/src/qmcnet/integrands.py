"""Test integrands on the unit cube.

All functions accept a single point of shape (d,) or a batch of shape
(n, d) and return a float or an (n,) array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

E = math.e


@dataclass(frozen=True)
class Integrand:
    name: str
    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    true_mean: float | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dimension:
            raise ValueError(
                f"{self.name} expects {self.dimension} coordinates, got {x.shape[-1]}")
        return self.evaluate(x)


def g0(x):
    """Sum of centered exponentials, additive with mean 0."""
    x = np.asarray(x, dtype=np.float64)
    return np.sum(np.exp(x) - E + 1.0, axis=-1)


def g1(x):
    """Squared coordinate sum: interactions of order two, mean d/3 + d(d-1)/4."""
    x = np.asarray(x, dtype=np.float64)
    return np.sum(x, axis=-1) ** 2


def g2(x):
    """Product of centered exponentials; purely d-dimensional, mean 0."""
    x = np.asarray(x, dtype=np.float64)
    return np.prod(np.exp(x) - E + 1.0, axis=-1)


def g1_mean(d: int) -> float:
    return d / 3 + d * (d - 1) / 4


@dataclass(frozen=True)
class RangeTable:
    rows: tuple[tuple[str, float, float], ...]

    def __post_init__(self):
        for name, low, high in self.rows:
            if not low < high:
                raise ValueError(f"{name}: empty range [{low}, {high}]")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r[0] for r in self.rows)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [(low, high) for _, low, high in self.rows]

    def __len__(self):
        return len(self.rows)


# Sweep is in degrees; wing_weight converts it.
WING_WEIGHT_RANGES = RangeTable((
    ("S_w", 150.0, 200.0),      # wing area, ft^2
    ("W_fw", 220.0, 300.0),     # fuel weight in the wing, lb
    ("A", 6.0, 10.0),           # aspect ratio
    ("Lambda", -10.0, 10.0),    # quarter-chord sweep, degrees
    ("q", 16.0, 45.0),          # dynamic pressure at cruise, lb/ft^2
    ("lambda", 0.5, 1.0),       # taper ratio
    ("t_c", 0.08, 0.18),        # aerofoil thickness to chord ratio
    ("N_z", 2.5, 6.0),          # ultimate load factor
    ("W_dg", 1700.0, 2500.0),   # flight design gross weight, lb
    ("W_p", 0.025, 0.08),       # paint weight, lb/ft^2
))


def map_to_ranges(u, ranges: Sequence[tuple[float, float]]) -> np.ndarray:
    """Affine map of unit-cube coordinates onto per-coordinate [low, high]."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape[-1] != len(ranges):
        raise ValueError(f"point has {u.shape[-1]} coordinates, got {len(ranges)} ranges")
    low = np.array([r[0] for r in ranges], dtype=np.float64)
    high = np.array([r[1] for r in ranges], dtype=np.float64)
    return low + u * (high - low)


def wing_weight(u, rt: RangeTable = WING_WEIGHT_RANGES):
    """Wing weight in pounds for unit-cube inputs ordered as in ``rt``.

    The load-factor term uses N_z, the ultimate load factor.
    """
    z = map_to_ranges(u, rt.bounds)
    sw, wfw, a, sweep, q, taper, tc, nz, wdg, wp = np.moveaxis(z, -1, 0)
    cos_sweep = np.cos(np.deg2rad(sweep))
    return (0.036 * sw ** 0.758 * wfw ** 0.0035
            * (a / cos_sweep ** 2) ** 0.6
            * q ** 0.006 * taper ** 0.04
            * (100.0 * tc / cos_sweep) ** -0.3
            * (nz * wdg) ** 0.49
            + sw * wp)


INTEGRAND_NAMES = ("g0", "g1", "g2", "wingweight")


def get_integrand(name: str, d: int | None = None) -> Integrand:
    """Look up an integrand by registry name.

    ``d`` is required for g0, g1 and g2; the wing weight function is always
    10-dimensional.
    """
    if name == "wingweight":
        if d not in (None, 10):
            raise ValueError("the wing weight function is 10-dimensional")
        return Integrand("wingweight", 10, wing_weight, None)
    if name not in INTEGRAND_NAMES:
        raise KeyError(f"unknown integrand {name!r}; choose from {', '.join(INTEGRAND_NAMES)}")
    if d is None or d < 1:
        raise ValueError(f"{name} needs a positive dimension")
    if name == "g0":
        return Integrand("g0", d, g0, 0.0)
    if name == "g1":
        return Integrand("g1", d, g1, g1_mean(d))
    return Integrand("g2", d, g2, 0.0)
