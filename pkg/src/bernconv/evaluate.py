"""Numerical evaluation of a convolution's distribution.

Everything rests on the greedy digit expansion, valid whenever every gap
ratio is at least 1 (strictly above 1 gives uniqueness; the boundary case
only misassigns a countable set, which no continuous functional below can
see).  With remainder x' before step k:

* x' >= a_k       -> digit 1 (ties resolve to 1),
* x' <= t_k       -> digit 0 (t_k = tail sum after k),
* otherwise       -> x' sits in the open gap (t_k, a_k): x is outside the
                     support and the walk stops with an exact CDF value.

The CDF P(X <= x) accumulates, at every digit-1 step, the mass of the
branch that chose 0 there (p0_k times the probability of the path so far);
on a gap hit the same contribution closes the value exactly, and at an
exactly-zero remainder the atom of the all-zeros continuation is added with
certified bounds.  When the digit walk is exhausted at the horizon the
remaining cylinder mass is the interval width.

Exact-rational scale generators admit an exact walk (Fraction remainders);
a vectorized float walk handles grids and empirical comparisons, padded by
an explicit rounding allowance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .convspec import ConvolutionSpec, deviation_terms, digit_p1_bounds_after
from .errors import DomainError, HypothesisViolationError, LevelTooLargeError
from .intervals import Interval, float_above, float_below
from .sequences import series_verdict

MAX_TRUNCATION_LEVEL = 24
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Terminal:
    kind: str  # "exact" | "gap-hit" | "exhausted"
    index: int


@dataclass(frozen=True)
class DigitExpansion:
    digits: tuple[int, ...]
    terminal: Terminal


def _require_expandable(spec: ConvolutionSpec) -> None:
    prof = spec.scales.gap_ratio_profile()
    if prof.always_at_least_one is not True:
        raise HypothesisViolationError(
            "digit expansion requires every gap ratio >= 1 (certified)"
        )


def _exact_walk_available(spec: ConvolutionSpec, x) -> bool:
    if not isinstance(x, (int, Rational)) or isinstance(x, float):
        return False
    return spec.scales.term_fraction(1) is not None and spec.scales.tail_fraction(1) is not None


def _check_domain(spec: ConvolutionSpec, x) -> None:
    r0 = spec.scales.tail_interval(0)
    slack = 4e-15 * (1.0 + r0.hi)
    if float(x) < -slack or float(x) > r0.hi + slack:
        raise DomainError(f"evaluation point {x} outside [0, {r0.hi}]")


def digits_of(spec: ConvolutionSpec, x, horizon: int = 64) -> DigitExpansion:
    """Greedy digit expansion of x; x may be a float or an exact rational."""
    _require_expandable(spec)
    _check_domain(spec, x)
    exact = _exact_walk_available(spec, x)
    rem = Fraction(x) if exact else float(x)
    digits: list[int] = []
    for k in range(1, horizon + 1):
        if rem == 0:
            return DigitExpansion(tuple(digits), Terminal("exact", k - 1))
        if exact:
            a = spec.scales.term_fraction(k)
            t = spec.scales.tail_fraction(k)
        else:
            a = spec.scales.term_float(k)
            t = spec.scales.tail_interval(k).hi
        if rem >= a:
            digits.append(1)
            rem = rem - a
        elif rem <= t:
            digits.append(0)
        else:
            return DigitExpansion(tuple(digits), Terminal("gap-hit", k))
    if rem == 0:
        return DigitExpansion(tuple(digits), Terminal("exact", horizon))
    return DigitExpansion(tuple(digits), Terminal("exhausted", horizon))


def _atom_tail_bounds(spec: ConvolutionSpec, start: int, window: int = 64) -> tuple[float, float]:
    """Bounds for prod_{k>start} p0_k (the all-zeros continuation mass)."""
    digits = spec.digits
    lo = hi = 1.0
    for k in range(start + 1, start + window + 1):
        p0 = digits.p0(k)
        lo *= p0 * (1.0 - 4e-16)
        hi *= min(1.0, p0 * (1.0 + 4e-16))
    ones = deviation_terms(digits, 1.0, power=1)  # terms are p1_k exactly
    sv = series_verdict(ones)
    if sv.kind == "diverges":
        return 0.0, 0.0
    if sv.kind == "unknown":
        return 0.0, hi
    rest = ones.sum_from(start + window)
    if rest is None or rest.hi >= 1.0:
        return 0.0, hi
    return max(0.0, lo * (1.0 - rest.hi) * (1.0 - 1e-13)), hi


def cdf(spec: ConvolutionSpec, x, horizon: int = 64) -> Interval:
    """P(X <= x) as a certified interval (right-continuous convention)."""
    _require_expandable(spec)
    _check_domain(spec, x)
    exact = _exact_walk_available(spec, x)
    rem = Fraction(x) if exact else float(x)
    acc = Fraction(0) if exact else 0.0
    path = Fraction(1) if exact else 1.0
    steps = 0

    def close(lo, hi) -> Interval:
        if exact:
            return Interval(float_below(lo), float_above(hi))
        pad = 64.0 * (steps + 1) * _EPS
        return Interval(max(0.0, float(lo) - pad), min(1.0, float(hi) + pad))

    for k in range(1, horizon + 1):
        steps = k
        if rem == 0:
            tail_lo, tail_hi = _atom_tail_bounds(spec, k - 1)
            return close(acc + path * _p(spec, exact, tail_lo),
                         acc + path * _p(spec, exact, tail_hi))
        p0 = spec.digits.p0(k)
        p0v = Fraction(p0) if exact else p0
        if exact:
            a = spec.scales.term_fraction(k)
            t = spec.scales.tail_fraction(k)
        else:
            a = spec.scales.term_float(k)
            t = spec.scales.tail_interval(k).hi
        if rem >= a:
            acc = acc + p0v * path
            path = path * (1 - p0v)
            rem = rem - a
        elif rem <= t:
            path = path * p0v
        else:
            acc = acc + p0v * path
            return close(acc, acc)
    if rem == 0:
        tail_lo, tail_hi = _atom_tail_bounds(spec, horizon)
        return close(acc + path * _p(spec, exact, tail_lo),
                     acc + path * _p(spec, exact, tail_hi))
    return close(acc, acc + path)


def _p(spec, exact: bool, v: float):
    return Fraction(v) if exact else v


def _digit_arrays(spec: ConvolutionSpec, horizon: int):
    a = np.array([spec.scales.term_float(k) for k in range(1, horizon + 1)])
    t = np.array([spec.scales.tail_interval(k).hi for k in range(1, horizon + 1)])
    p0 = np.array([spec.digits.p0(k) for k in range(1, horizon + 1)])
    return a, t, p0, 1.0 - p0


def cdf_grid(spec: ConvolutionSpec, xs: Sequence[float], horizon: int = 64):
    """Vectorized float CDF walk; returns (lo, hi) arrays with rounding pad."""
    _require_expandable(spec)
    a, t, p0, p1 = _digit_arrays(spec, horizon)
    rem = np.asarray(xs, dtype=np.float64).copy()
    r0hi = spec.scales.tail_interval(0).hi
    slack = 4e-15 * (1.0 + r0hi)
    if np.any(rem < -slack) or np.any(rem > r0hi + slack):
        raise DomainError("grid contains points outside the distribution range")
    acc = np.zeros_like(rem)
    path = np.ones_like(rem)
    done = np.zeros(rem.shape, dtype=bool)
    for k in range(horizon):
        active = ~done
        take1 = active & (rem >= a[k])
        rest = active & ~take1
        gap = rest & (rem > t[k])
        zero = rest & ~gap
        if p0[k] > 0.0:
            contrib = p0[k] * path
            acc[take1] += contrib[take1]
            acc[gap] += contrib[gap]
        path[take1] *= p1[k]
        path[zero] *= p0[k]
        path[gap] = 0.0
        done |= gap
        rem[take1] -= a[k]
    pad = 64.0 * horizon * _EPS
    lo = np.clip(acc - pad, 0.0, 1.0)
    hi = np.clip(acc + path + pad, 0.0, 1.0)
    return lo, hi


# ---------------------------------------------------------------------------
# Characteristic function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharFnValue:
    value: complex
    radius: float
    terms_used: int

    @property
    def modulus(self) -> float:
        return abs(self.value)


def _level_for_tail(spec: ConvolutionSpec, bound: float, cap: int = 200_000) -> int:
    """Smallest-ish n with tail_sum(n) <= bound (a few terms of safety)."""
    if bound <= 0.0:
        raise ValueError("tail bound must be positive")
    scales = spec.scales
    n = 0
    step = 1
    last_hi = scales.tail_interval(0).hi
    if last_hi <= bound:
        return 0
    while n < cap:
        probe = min(n + step, cap)
        hi = _tail_hi_float(scales, probe)
        if hi <= bound:
            # refine downwards
            lo_n, hi_n = n, probe
            while hi_n - lo_n > 1:
                mid = (lo_n + hi_n) // 2
                if _tail_hi_float(scales, mid) <= bound:
                    hi_n = mid
                else:
                    lo_n = mid
            return hi_n
        n = probe
        step *= 2
    raise HypothesisViolationError("tail bound unreachable within the level cap")


def _tail_hi_float(scales, n: int) -> float:
    """Cheap certified-enough upper bound of the tail sum for level search."""
    from .convspec import (
        CantorLike,
        ExactGeometricTail,
        ExplicitScales,
        Geometric,
        GeometricBoundTail,
        MixedGeometricTail,
        PowerLawTail,
        TwoTerm,
    )

    pad = 1.0 + 1e-12
    if isinstance(scales, Geometric):
        lam = scales.lam
        return scales.coef * math.exp((n + 1) * math.log(lam)) / (1.0 - lam) * pad
    if isinstance(scales, CantorLike):
        return scales.coef * math.exp(-n * math.log(scales.base)) / (scales.base - 1) * pad
    if isinstance(scales, TwoTerm):
        e = scales.epsilon
        return ((1.0 - e) * math.exp(-n * math.log(2.0)) + e * math.exp(-n * math.log(4.0))) * pad
    assert isinstance(scales, ExplicitScales)
    tail = scales.tail
    start = tail.start_index
    if n < start - 1:
        return scales.tail_interval(n).hi
    j = n + 1 - start
    if isinstance(tail, (ExactGeometricTail, GeometricBoundTail)):
        return tail.scale * math.exp(j * math.log(tail.ratio)) / (1.0 - tail.ratio) * pad
    if isinstance(tail, MixedGeometricTail):
        return (tail.scale * math.exp(j * math.log(tail.ratio)) / (1.0 - tail.ratio)
                + abs(tail.scale2) * math.exp(j * math.log(tail.ratio2)) / (1.0 - tail.ratio2)) * pad
    assert isinstance(tail, PowerLawTail)
    e = tail.exponent
    return tail.scale * ((n + 1) ** (-e) + (n + 1) ** (1.0 - e) / (e - 1.0)) * pad


def char_fn(spec: ConvolutionSpec, t: float, tol: float = 1e-9) -> CharFnValue:
    """Truncated product of per-digit factors p0_k + p1_k exp(i t a_k).

    The truncation level n is chosen so |t| * tail_sum(n) <= tol, which
    bounds the dropped phase; the reported radius covers that plus the float
    rounding of the partial product.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if t == 0.0:
        return CharFnValue(complex(1.0, 0.0), 0.0, 0)
    n = _level_for_tail(spec, tol / abs(t))
    z = complex(1.0, 0.0)
    for k in range(1, n + 1):
        p0 = spec.digits.p0(k)
        z *= p0 + (1.0 - p0) * cmath.exp(1j * t * spec.scales.term_float(k))
    radius = tol + 64.0 * (n + 1) * _EPS * (1.0 + abs(t))
    return CharFnValue(z, radius, n)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def moments(spec: ConvolutionSpec, partial_terms: int = 64) -> tuple[Interval, Interval]:
    """(mean, variance) with certified tail bounds.

    mean = sum p1_k a_k and variance = sum p0_k p1_k a_k**2 by independence;
    partial sums are exact on rational generators and the tails are bounded
    through the digit-probability range past the cutoff.
    """
    from .product_measure import _structural_horizon  # index scan reuse
    from .product_measure import BinaryLaws

    horizon = _structural_horizon(BinaryLaws(spec.digits))
    if horizon is None:
        raise HypothesisViolationError(
            "moment tail bounds not certifiable: the digit clamp region "
            "outruns the analysis budget"
        )
    cutoff = max(partial_terms, horizon + 8)
    exact = spec.scales.term_fraction(1) is not None
    mean_acc = Fraction(0) if exact else 0.0
    var_acc = Fraction(0) if exact else 0.0
    err = 0.0
    for k in range(1, cutoff + 1):
        p1 = spec.digits.p1(k)
        if exact:
            a = spec.scales.term_fraction(k)
            p1f = Fraction(p1)
            mean_acc += p1f * a
            var_acc += p1f * (1 - p1f) * a * a
        else:
            a = spec.scales.term_float(k)
            mean_acc += p1 * a
            var_acc += p1 * (1.0 - p1) * a * a
            err += 4.0 * _EPS * a

    tail = spec.scales.tail_interval(cutoff)
    tail_sq = spec.scales.tail_squares_interval(cutoff)
    p1_lo, p1_hi = digit_p1_bounds_after(spec.digits, cutoff)
    g_candidates = [p1_lo * (1.0 - p1_lo), p1_hi * (1.0 - p1_hi)]
    g_lo = min(g_candidates)
    g_hi = max(g_candidates + ([0.25] if p1_lo <= 0.5 <= p1_hi else []))

    if exact:
        mean_base = Interval(float_below(mean_acc), float_above(mean_acc))
        var_base = Interval(float_below(var_acc), float_above(var_acc))
    else:
        mean_base = Interval.point(mean_acc).widen(err)
        var_base = Interval.point(var_acc).widen(err)
    mean = Interval(
        mean_base.lo + p1_lo * tail.lo * (1 - 4e-16),
        mean_base.hi + p1_hi * tail.hi * (1 + 4e-16),
    )
    variance = Interval(
        var_base.lo + g_lo * tail_sq.lo * (1 - 4e-16),
        var_base.hi + g_hi * tail_sq.hi * (1 + 4e-16),
    )
    return mean, variance


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample(spec: ConvolutionSpec, count: int, seed: int, horizon: int = 48) -> list[float]:
    """Seeded truncated samples (counter-based generator, reproducible).

    Each value is sum_{k<=horizon} d_k a_k with independent digits, so the
    truncation bias per sample is at most tail_sum(horizon).
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if seed < 0:
        raise ValueError("seed must be >= 0")
    if count == 0:
        return []
    gen = np.random.Generator(np.random.Philox(key=seed))
    a = np.array([spec.scales.term_float(k) for k in range(1, horizon + 1)])
    p1 = np.array([spec.digits.p1(k) for k in range(1, horizon + 1)])
    u = gen.random((count, horizon))
    values = (u < p1[None, :]).astype(np.float64) @ a
    return values.tolist()


# ---------------------------------------------------------------------------
# Exact truncated distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncatedDistribution:
    """Exact law of the level-n partial sum: sorted atoms, merged values."""

    level: int
    values: np.ndarray
    probs: np.ndarray
    tail_radius: float

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def cdf_at(self, x: float) -> float:
        idx = int(np.searchsorted(self.values, x, side="right"))
        return float(self._cum[idx - 1]) if idx else 0.0

    def cdf_grid(self, xs) -> np.ndarray:
        idx = np.searchsorted(self.values, np.asarray(xs, dtype=np.float64), side="right")
        cum = np.concatenate([[0.0], self._cum])
        return cum[idx]

    @property
    def _cum(self) -> np.ndarray:
        cached = getattr(self, "_cum_cache", None)
        if cached is None:
            cached = np.cumsum(self.probs)
            object.__setattr__(self, "_cum_cache", cached)
        return cached

    def mean(self) -> float:
        return float(self.values @ self.probs)

    def variance(self) -> float:
        m = self.mean()
        return float((self.values - m) ** 2 @ self.probs)


def truncated_distribution(
    spec: ConvolutionSpec, n: int, merge_tol: float = 1e-14
) -> TruncatedDistribution:
    """Enumerate the 2**n digit prefixes into an exact atom list."""
    if n < 0:
        raise LevelTooLargeError("level must be >= 0")
    if n > MAX_TRUNCATION_LEVEL:
        raise LevelTooLargeError(
            f"level {n} exceeds the enumeration ceiling {MAX_TRUNCATION_LEVEL}"
        )
    values = np.zeros(1, dtype=np.float64)
    probs = np.ones(1, dtype=np.float64)
    for k in range(1, n + 1):
        a = spec.scales.term_float(k)
        p0 = spec.digits.p0(k)
        if p0 == 0.0:
            values = values + a
        elif p0 == 1.0:
            pass
        else:
            values = np.concatenate([values, values + a])
            probs = np.concatenate([probs * p0, probs * (1.0 - p0)])
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    if len(values) > 1:
        new_group = np.concatenate([[True], np.diff(values) > merge_tol])
        idx = np.flatnonzero(new_group)
        values = values[idx]
        probs = np.add.reduceat(probs, idx)
    return TruncatedDistribution(
        level=n,
        values=values,
        probs=probs,
        tail_radius=spec.scales.tail_interval(n).hi,
    )
