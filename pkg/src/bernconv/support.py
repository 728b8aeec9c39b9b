"""Geometry of the incomplete-sums set of a convolution spec.

The closed support of the random sum is the set of admissible incomplete
sums ``sum_k g_k a_k`` (digits with zero probability are excluded).  Fixing
the first n digits confines the remainder to ``[s, s + t_n]`` where s is the
partial sum and t_n the tail sum, so the level-n cylinder union is an outer
approximation of the support that shrinks to it.

The gap ratio a_k/t_k organizes everything:

* ratio > 1 at step k splits each level-(k-1) interval in two: the support
  is nowhere dense iff this happens infinitely often (for nonincreasing
  scales and nondegenerate digits);
* ratio > 1 for every k makes digit expansions unique and yields exactly
  2**n disjoint cylinders of length t_n, so the Lebesgue measure of the
  support is the limit of 2**k t_k, positive iff the ratio excess series
  sum (a_k/t_k - 1) converges;
* along the way 2**k t_k decreases, and the certified excess tail bounds the
  drop ahead, which brackets the limit.

Cylinder endpoints are computed exactly (integer arithmetic over a common
denominator) whenever the scale generator is exact-rational; otherwise a
float path with explicit slack takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .convspec import ConvolutionSpec
from .errors import (
    HypothesisViolationError,
    LevelTooLargeError,
    TailUnboundedError,
)
from .intervals import Interval
from .sequences import SeriesVerdict, series_verdict
from .convspec import _unclamped_from  # shared clamp-scan helper

MAX_LEVEL = 22
_LN2 = math.log(2.0)


_EXACT_MATERIALIZE_LIMIT = 65_536


@dataclass(frozen=True, eq=False)
class SupportApprox:
    """Level-n cylinder union: sorted disjoint closed intervals.

    ``intervals`` is a (count, 2) float array of [lo, hi] rows.  On the
    exact-rational path ``exact_total_length`` is always present and
    ``exact_intervals`` is materialized when the count stays moderate.
    """

    level: int
    intervals: np.ndarray
    total_length: Interval
    gap_count: int
    exact_intervals: Optional[tuple[tuple[Fraction, Fraction], ...]] = None
    exact_total_length: Optional[Fraction] = None

    @property
    def count(self) -> int:
        return len(self.intervals)

    def max_component_length(self) -> float:
        return float(np.max(self.intervals[:, 1] - self.intervals[:, 0]))


def _branching(spec: ConvolutionSpec, n: int) -> list[tuple[bool, bool]]:
    """(digit 0 allowed, digit 1 allowed) per level; zero-probability digits
    are excluded from the support."""
    out = []
    for k in range(1, n + 1):
        p0 = spec.digits.p0(k)
        out.append((p0 > 0.0, p0 < 1.0))
    return out


def _merge_sorted_starts(sums: np.ndarray, radius, gap_tol) -> tuple[np.ndarray, np.ndarray]:
    """Segment [start, last] index pairs of the union of [s, s+radius].

    sums must be sorted; since the interval tops are monotone too, a new
    component begins exactly where the gap to the previous start exceeds
    radius (+ gap_tol on the float path).
    """
    if len(sums) == 1:
        starts = np.array([0])
    else:
        new_comp = sums[1:] > sums[:-1] + (radius + gap_tol)
        starts = np.flatnonzero(np.concatenate([[True], new_comp]))
    lasts = np.append(starts[1:] - 1, len(sums) - 1)
    return starts, lasts


def _enumerate_sums(steps, branching, zero, dtype):
    sums = np.zeros(1, dtype=dtype)
    for step, (zero_ok, one_ok) in zip(steps, branching):
        if zero_ok and one_ok:
            sums = np.concatenate([sums, sums + step])
        elif one_ok:
            sums = sums + step
    sums.sort(kind="stable")
    return sums


def _exact_cylinders(spec: ConvolutionSpec, n: int):
    scales = spec.scales
    terms = [scales.term_fraction(k) for k in range(1, n + 1)]
    rest = scales.tail_fraction(n)
    if rest is None or any(t is None for t in terms):
        return None
    denom = rest.denominator
    for t in terms:
        denom = denom * t.denominator // math.gcd(denom, t.denominator)
    steps = [int(t * denom) for t in terms]
    radius = int(rest * denom)
    branching = _branching(spec, n)

    if sum(steps) + radius < 2 ** 62:
        sums = _enumerate_sums(steps, branching, 0, np.int64)
        starts, lasts = _merge_sorted_starts(sums, radius, 0)
        seg_lo = sums[starts]
        seg_hi = sums[lasts] + radius
        total_int = int(np.sum(seg_hi - seg_lo, dtype=np.int64))
        lo_f = seg_lo.astype(np.float64) / denom
        hi_f = seg_hi.astype(np.float64) / denom
        count = len(starts)
        max_hi = int(seg_hi[-1])
        pairs = (
            list(zip(seg_lo.tolist(), seg_hi.tolist()))
            if count <= _EXACT_MATERIALIZE_LIMIT
            else None
        )
    else:
        sums_list = [0]
        for step, (zero_ok, one_ok) in zip(steps, branching):
            if zero_ok and one_ok:
                sums_list = sums_list + [s + step for s in sums_list]
            elif one_ok:
                sums_list = [s + step for s in sums_list]
        sums_list.sort()
        merged: list[list[int]] = []
        for s in sums_list:
            hi = s + radius
            if merged and s <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([s, hi])
        pairs = [(lo, hi) for lo, hi in merged]
        total_int = sum(hi - lo for lo, hi in pairs)
        lo_f = np.array([lo / denom for lo, _ in pairs])
        hi_f = np.array([hi / denom for _, hi in pairs])
        count = len(pairs)
        max_hi = pairs[-1][1]

    exact = None
    if pairs is not None and count <= _EXACT_MATERIALIZE_LIMIT:
        exact = tuple((Fraction(lo, denom), Fraction(hi, denom)) for lo, hi in pairs)
    total = Fraction(total_int, denom)
    intervals = np.column_stack([lo_f, hi_f])
    # int -> float conversion is exact below 2**53; pad one ulp otherwise
    widen = 0.0 if max_hi < 2 ** 53 else 4e-16
    return SupportApprox(
        level=n,
        intervals=intervals,
        total_length=Interval.exact(total).widen(widen * float(total)),
        gap_count=count - 1,
        exact_intervals=exact,
        exact_total_length=total,
    )


def _float_cylinders(spec: ConvolutionSpec, n: int) -> SupportApprox:
    scales = spec.scales
    steps = [scales.term_float(k) for k in range(1, n + 1)]
    radius_iv = scales.tail_interval(n)
    branching = _branching(spec, n)
    sums = _enumerate_sums(steps, branching, 0.0, np.float64)
    top = float(sums[-1]) + radius_iv.hi
    slack = 16.0 * (n + 1) * np.finfo(np.float64).eps * max(1.0, top)
    starts, lasts = _merge_sorted_starts(sums, radius_iv.hi, slack)
    seg_lo = sums[starts]
    seg_hi = sums[lasts] + radius_iv.hi
    total = float(np.sum(seg_hi - seg_lo))
    pad = slack * (len(starts) + 1)
    return SupportApprox(
        level=n,
        intervals=np.column_stack([seg_lo, seg_hi]),
        total_length=Interval(max(0.0, total - pad), total + pad),
        gap_count=len(starts) - 1,
        exact_intervals=None,
        exact_total_length=None,
    )


def cylinders(spec: ConvolutionSpec, n: int, max_level: int = MAX_LEVEL) -> SupportApprox:
    """Level-n outer approximation of the support by digit cylinders."""
    if n < 0:
        raise LevelTooLargeError("level must be >= 0")
    if n > max_level:
        raise LevelTooLargeError(f"level {n} exceeds the enumeration limit {max_level}")
    exact = _exact_cylinders(spec, n)
    if exact is not None:
        return exact
    return _float_cylinders(spec, n)


# ---------------------------------------------------------------------------
# Digit positivity (hypothesis of the topology/measure statements)
# ---------------------------------------------------------------------------


def _digit_positivity(spec: ConvolutionSpec) -> tuple[Optional[bool], Optional[int]]:
    """(all digit probabilities strictly inside (0,1), first bad index).

    Certified against the exact generator formula: an unclamped perturbation
    approaches its limit strictly from one side, so it stays interior past
    the clamp horizon even where double-precision evaluation saturates onto
    the boundary.  Only the override/clamp region needs pointwise checks.
    Returns (None, None) when the clamp region outruns the analysis budget.
    """
    digits = spec.digits
    overrides, form = digits.normal_form()
    if form.kind == "const" or form.c == 0.0:
        if not (0.0 < form.center < 1.0):
            return False, len(overrides) + 1
        horizon = len(overrides)
    else:
        # beyond the clamp horizon the raw formula sits strictly between its
        # limit side and the certified margin to the risk boundary
        unclamped = _unclamped_from(form, len(overrides) + 1)
        if unclamped is None:
            return None, None
        horizon = unclamped - 1
        if form.center == 0.0 and form.c < 0.0:  # pragma: no cover - pinned forms
            return False, len(overrides) + 1
        if form.center == 1.0 and form.c > 0.0:  # pragma: no cover - pinned forms
            return False, len(overrides) + 1
    for k in range(1, horizon + 1):
        p0 = digits.p0(k)
        if not (0.0 < p0 < 1.0):
            return False, k
    return True, None


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NowhereDenseVerdict:
    kind: str  # "nowhere-dense" | "contains-interval" | "indeterminate"
    reason: str


def nowhere_dense_verdict(spec: ConvolutionSpec) -> NowhereDenseVerdict:
    """Topological verdict: nowhere dense iff gap ratios exceed 1 infinitely
    often, for nonincreasing scales and strictly interior digit probabilities.
    """
    mono = spec.scales.nonincreasing()
    if mono is False:
        raise HypothesisViolationError("scale sequence is not nonincreasing")
    positive, bad = _digit_positivity(spec)
    if positive is None:
        return NowhereDenseVerdict("indeterminate", "digit positivity not certifiable")
    if not positive:
        raise HypothesisViolationError(
            f"digit probability at index {bad} is degenerate (0 or 1)"
        )
    if mono is None:
        return NowhereDenseVerdict("indeterminate", "scale monotonicity not certified")
    prof = spec.scales.gap_ratio_profile()
    if prof.eventually_above_one:
        return NowhereDenseVerdict(
            "nowhere-dense", "gap ratio exceeds 1 infinitely often (certified)"
        )
    if prof.eventually_at_most_one:
        return NowhereDenseVerdict(
            "contains-interval", "gap ratio is at most 1 for all large indices (certified)"
        )
    return NowhereDenseVerdict("indeterminate", "gap ratio tail behaviour not certified")


@dataclass(frozen=True)
class MeasureVerdict:
    kind: str  # "zero" | "positive" | "indeterminate"
    value: Optional[Interval]
    certificate: SeriesVerdict


def support_measure(
    spec: ConvolutionSpec,
    rel_tol: float = 1e-12,
    max_terms: int = 4096,
) -> MeasureVerdict:
    """Lebesgue measure of the support in the all-gaps regime.

    Requires every gap ratio above 1 (certified) and nondegenerate digits.
    Zero iff the excess series diverges; otherwise the value is the limit of
    2**k t_k, bracketed from above by any partial term and from below via
    the certified excess tail:  limit >= 2**K t_K * (1 - tail_excess/2).
    """
    prof = spec.scales.gap_ratio_profile()
    if prof.always_above_one is not True:
        raise HypothesisViolationError("gap ratio > 1 for every index is not certified")
    positive, bad = _digit_positivity(spec)
    if positive is None:
        raise HypothesisViolationError("digit positivity not certifiable")
    if not positive:
        raise HypothesisViolationError(
            f"digit probability at index {bad} is degenerate; the support is a thinner set"
        )
    excess = spec.scales.gap_excess_terms()
    sv = series_verdict(excess)
    if sv.kind == "diverges":
        return MeasureVerdict("zero", None, sv)
    if sv.kind == "unknown":
        return MeasureVerdict("indeterminate", None, sv)

    k = 16
    best: Optional[Interval] = None
    while True:
        tf = spec.scales.tail_fraction(k)
        if tf is not None:
            upper = Interval.exact(Fraction(2) ** k * tf)
        else:
            upper = Interval.exact(Fraction(2) ** k) * spec.scales.tail_interval(k)
        tail_excess = excess.sum_from(k)
        assert tail_excess is not None
        drop = 1.0 - 0.5 * tail_excess.hi
        if drop > 0.0:
            best = Interval(max(0.0, upper.lo * drop * (1 - 1e-15)), upper.hi)
            if best.width <= rel_tol * max(best.hi, 1e-300):
                break
        if k >= max_terms:
            break
        k = min(2 * k, max_terms)
    assert best is not None
    return MeasureVerdict("positive", best, sv)


@dataclass(frozen=True)
class DimensionEstimate:
    variant: str  # "log-corrected" | "as-printed"
    liminf_value: float
    limsup_value: float
    terms_used: int

    def __post_init__(self):
        if not (0.0 <= self.liminf_value <= self.limsup_value):
            raise ValueError("dimension estimates must satisfy 0 <= liminf <= limsup")


def dimension_estimate(
    spec: ConvolutionSpec, variant: str = "log-corrected", horizon: int = 10_000
) -> DimensionEstimate:
    """Fractal dimension sequence ``k ln 2 / sum_i w(ratio_i)`` to a horizon.

    ``log-corrected`` (the default) weighs each step by ln(ratio_i + 1) and
    reproduces ln 2 / ln 3 on the middle-thirds set; ``as-printed`` weighs by
    ratio_i + 1 and is exposed only for side-by-side comparison because it
    fails that sanity check.  Both liminf and limsup over the trailing half
    of the horizon are reported.
    """
    if variant not in ("log-corrected", "as-printed"):
        raise ValueError(f"unknown dimension variant {variant!r}")
    if horizon < 8:
        raise ValueError("horizon must be at least 8")
    prof = spec.scales.gap_ratio_profile()
    if prof.always_above_one is not True:
        raise HypothesisViolationError("dimension formula requires all gap ratios above 1")
    if prof.constant_value is not None:
        ratio = float(prof.constant_value)
        value = _LN2 / math.log(ratio + 1.0) if variant == "log-corrected" else _LN2 / (ratio + 1.0)
        return DimensionEstimate(variant, value, value, horizon)
    acc = 0.0
    lo, hi = math.inf, -math.inf
    window_start = horizon // 2
    for k in range(1, horizon + 1):
        r = spec.scales.gap_ratio_float(k)
        acc += math.log(r + 1.0) if variant == "log-corrected" else (r + 1.0)
        if k >= window_start:
            d = k * _LN2 / acc
            lo, hi = min(lo, d), max(hi, d)
    return DimensionEstimate(variant, lo, hi, horizon)


@dataclass(frozen=True)
class RepresentationVerdict:
    kind: str  # "unique" | "not-unique" | "indeterminate"
    reason: str


def unique_representation(spec: ConvolutionSpec) -> RepresentationVerdict:
    """Uniqueness of digit expansions over the support."""
    try:
        prof = spec.scales.gap_ratio_profile()
    except TailUnboundedError:
        return RepresentationVerdict("indeterminate", "tail not analyzable")
    if prof.always_above_one:
        return RepresentationVerdict("unique", "every gap ratio exceeds 1 (certified)")
    if prof.eventually_below_one:
        return RepresentationVerdict(
            "not-unique", "gap ratios fall below 1 eventually: overlapping regime"
        )
    if prof.constant_value is not None and prof.constant_value == 1:
        return RepresentationVerdict(
            "indeterminate",
            "boundary regime (ratio identically 1): only countably many points are ambiguous",
        )
    return RepresentationVerdict("indeterminate", "gap ratio profile not certified")
