"""Outward-rounded interval arithmetic over machine floats.

Every arithmetic result is widened by one ulp in each direction, so an
``Interval`` produced from exact inputs always contains the true real value.
Exact rationals (``fractions.Fraction``) convert to the tightest enclosing
float interval, which keeps closed-form tail sums at 1-ulp width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def float_below(value: Rational | float) -> float:
    """Largest float <= value."""
    f = float(value)
    if isinstance(value, float) or Fraction(f) <= value:
        return f
    return _down(f)


def float_above(value: Rational | float) -> float:
    """Smallest float >= value."""
    f = float(value)
    if isinstance(value, float) or Fraction(f) >= value:
        return f
    return _up(f)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] of reals, endpoints stored as floats."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v: float) -> "Interval":
        return cls(float(v), float(v))

    @classmethod
    def exact(cls, value: Rational | int) -> "Interval":
        """Tightest float interval containing an exact rational."""
        return cls(float_below(value), float_above(value))

    @classmethod
    def hull(cls, *items: "Interval") -> "Interval":
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def widen(self, pad: float) -> "Interval":
        return Interval(self.lo - pad, self.hi + pad)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, float)):
            return Interval.point(other)
        if isinstance(other, Rational):
            return Interval.exact(other)
        return NotImplemented

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval division by interval containing 0")
        quots = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(quots)), _up(max(quots)))

    def __rtruediv__(self, other) -> "Interval":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def pow_int(self, n: int) -> "Interval":
        """self**n for n >= 0, by repeated interval multiplication."""
        if n < 0:
            raise ValueError("pow_int requires n >= 0")
        result = Interval.point(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


# Relative padding applied to libm-evaluated bounds (pow, exp, log).  libm
# errors are below 2 ulp; 1e-13 relative is a generous rigor margin.
_LIBM_PAD = 1e-13


def pow_bounds(base: float, exponent: float) -> Interval:
    """Enclosure of base**exponent for base > 0, padded for libm error."""
    if base <= 0:
        raise ValueError("pow_bounds requires base > 0")
    v = math.pow(base, exponent)
    pad = abs(v) * _LIBM_PAD
    return Interval(_down(v - pad), _up(v + pad))
