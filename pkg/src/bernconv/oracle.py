"""Brute-force oracles, arithmetically independent of the modules they check.

* ``box_count``: counts grid boxes hitting the level-n cylinder union.
  Boxes are aligned at 0 and treated half-open, so an interval touching a
  box boundary only in a single point does not spill into the next box;
  with exact rational box sizes (pass a Fraction) the count is exact.
* ``truncated_hellinger``: enumerates all words of length n, multiplies the
  two path masses and sums the square roots at the leaves; no per-coordinate
  affinity formula is reused.
* ``compare_cdf``: sandwiches the digit-walk CDF between shifted CDFs of the
  exact truncated law, F_n(x - tail_n) <= F(x) <= F_n(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

from .convspec import ConvolutionSpec
from .errors import LevelTooLargeError, ResolutionError
from .evaluate import cdf_grid, truncated_distribution
from .product_measure import CoordinateLawSeq
from .support import cylinders

_MAX_ENUM_PATHS = 2 ** 20


@dataclass(frozen=True)
class BoxCountResult:
    box_size: float
    occupied: int
    dim_estimate: float

    def __post_init__(self):
        if self.occupied < 1:
            raise ValueError("at least one box must be occupied")


def _box_range(lo, hi, box) -> tuple[int, int]:
    """Indices of half-open boxes [j*box, (j+1)*box) meeting [lo, hi)."""
    j_lo = math.floor(lo / box)
    j_hi = math.floor(hi / box)
    if hi == j_hi * box:  # right endpoint on a boundary: previous box only
        j_hi -= 1
    return j_lo, max(j_lo, j_hi)


def box_count(
    spec: ConvolutionSpec,
    level: int,
    box_size: Union[float, Fraction],
    max_level: int = 22,
) -> BoxCountResult:
    """Occupied-box count of the level-n cylinder union at one box size."""
    approx = cylinders(spec, level, max_level=max_level)
    exact = approx.exact_intervals is not None and isinstance(box_size, Rational) and not isinstance(box_size, float)
    radius = spec.scales.tail_interval(level)
    if level >= 1 and float(box_size) < radius.lo:
        # below the cylinder length the level-n union over-resolves the set
        raise ResolutionError(
            f"box size {float(box_size)} is below the level-{level} resolution {radius.lo}"
        )
    if exact:
        intervals = approx.exact_intervals
        box = Fraction(box_size)
    else:
        intervals = [(lo, hi) for lo, hi in approx.intervals.tolist()]
        box = float(box_size)
    occupied = 0
    last = None
    for lo, hi in intervals:
        j_lo, j_hi = _box_range(lo, hi, box)
        if last is not None and j_lo <= last:
            j_lo = last + 1
        if j_hi >= j_lo:
            occupied += j_hi - j_lo + 1
            last = j_hi
    return BoxCountResult(
        box_size=float(box_size),
        occupied=occupied,
        dim_estimate=math.log(occupied) / math.log(1.0 / float(box_size)),
    )


def truncated_hellinger(mu: CoordinateLawSeq, nu: CoordinateLawSeq, n: int) -> float:
    """sum over words w of sqrt(mu-mass(w) * nu-mass(w)) by direct enumeration.

    Must equal the product of the per-coordinate affinities; the comparison
    is the oracle for the dichotomy module.
    """
    if n < 0:
        raise LevelTooLargeError("level must be >= 0")
    size = mu.alphabet_size
    if nu.alphabet_size != size:
        raise LevelTooLargeError("alphabets differ")
    if size ** n > _MAX_ENUM_PATHS:
        raise LevelTooLargeError(f"{size}**{n} words exceed the enumeration ceiling")
    mu_mass = np.ones(1, dtype=np.float64)
    nu_mass = np.ones(1, dtype=np.float64)
    for k in range(1, n + 1):
        mu_k = np.asarray(mu.law(k), dtype=np.float64)
        nu_k = np.asarray(nu.law(k), dtype=np.float64)
        mu_mass = (mu_mass[:, None] * mu_k[None, :]).ravel()
        nu_mass = (nu_mass[:, None] * nu_k[None, :]).ravel()
    return float(np.sqrt(mu_mass * nu_mass).sum())


@dataclass(frozen=True)
class CdfComparison:
    level: int
    horizon: int
    grid_points: int
    max_violation: float
    worst_x: float


def compare_cdf(
    spec: ConvolutionSpec, n: int, grid: int = 200, horizon: int = 40
) -> CdfComparison:
    """Max violation of F_n(x - tail_n) <= F(x) <= F_n(x) over a value grid."""
    trunc = truncated_distribution(spec, n)
    r0 = spec.scales.tail_interval(0).hi
    xs = np.linspace(0.0, r0, grid)
    lo, hi = cdf_grid(spec, xs, horizon=horizon)
    upper = trunc.cdf_grid(xs)
    lower = trunc.cdf_grid(xs - trunc.tail_radius)
    viol = np.maximum(lower - hi, lo - upper)
    worst = int(np.argmax(viol))
    return CdfComparison(
        level=n,
        horizon=horizon,
        grid_points=grid,
        max_violation=float(max(0.0, viol[worst])),
        worst_x=float(xs[worst]),
    )
