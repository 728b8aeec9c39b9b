"""Defining data of a generalized Bernoulli convolution.

A convolution is the law of an infinite random sum ``sum_k d_k * a_k`` with
independent binary digits ``d_k`` (P(d_k = 1) = p1_k = 1 - p0_k) and a
positive summable scale sequence ``a_k``.  Scale sequences and digit laws
come from small generator catalogs so that tail sums, termwise ratios and
the criterion series other modules rely on are certifiable, not merely
computable:

* geometric-family scales have exact rational tail sums (evaluated with
  ``fractions.Fraction`` and converted to 1-ulp float intervals);
* power-law tails get integral bracketing;
* digit probabilities are defined by double-precision evaluation of the
  generator formula, while convergence analysis reasons about the exact
  formula, so clamp boundaries are absorbed into explicitly checked
  prefixes rather than guessed.

The key derived quantities are the tail sums ``t_n = sum_{i>n} a_i`` and the
gap ratios ``a_k / t_k``: a ratio above 1 opens a gap after digit k, a ratio
below 1 creates overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import SpecValidationError, TailUnboundedError
from .intervals import Interval, pow_bounds
from .sequences import (
    ConstTail,
    GeomTail,
    OpaqueTail,
    PowerTail,
    SandwichTail,
    TermSeq,
    ZeroTail,
)

_HALF = Fraction(1, 2)


def _frac(x: float) -> Fraction:
    """Exact rational value of a finite float."""
    return Fraction(x)


# ---------------------------------------------------------------------------
# Tail rules for explicit scale sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactGeometricTail:
    """Continuation terms ``scale * ratio**(k - start_index)``."""

    ratio: float
    scale: float
    start_index: int = 1

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise SpecValidationError("exact-geometric tail needs ratio in (0,1)")
        if self.scale <= 0.0:
            raise SpecValidationError("exact-geometric tail needs scale > 0")


@dataclass(frozen=True)
class GeometricBoundTail:
    """Bound-only continuation: 0 <= a_k <= scale * ratio**(k - start_index)."""

    ratio: float
    scale: float
    start_index: int = 1

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise SpecValidationError("geometric-bound tail needs ratio in (0,1)")
        if self.scale <= 0.0:
            raise SpecValidationError("geometric-bound tail needs scale > 0")


@dataclass(frozen=True)
class PowerLawTail:
    """Continuation terms ``scale * k**(-exponent)`` (global index k)."""

    exponent: float
    scale: float
    start_index: int = 1

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise SpecValidationError("power-law tail needs exponent > 1")
        if self.scale <= 0.0:
            raise SpecValidationError("power-law tail needs scale > 0")


@dataclass(frozen=True)
class MixedGeometricTail:
    """Two-ratio continuation ``scale*ratio**j + scale2*ratio2**j``.

    j = k - start_index.  Requires 0 < ratio2 < ratio < 1 and scale+scale2 > 0
    (which forces every term positive).  With ratio exactly 1/2 this is the
    canonical way to write tails whose gap ratio exceeds 1 by a summable
    excess.
    """

    scale: float
    ratio: float
    scale2: float
    ratio2: float
    start_index: int = 1

    def __post_init__(self):
        if not (0.0 < self.ratio2 < self.ratio < 1.0):
            raise SpecValidationError("mixed-geometric needs 0 < ratio2 < ratio < 1")
        if self.scale <= 0.0:
            raise SpecValidationError("mixed-geometric needs scale > 0")
        if self.scale + self.scale2 <= 0.0:
            raise SpecValidationError("mixed-geometric first term must be positive")


TailRule = Union[ExactGeometricTail, GeometricBoundTail, PowerLawTail, MixedGeometricTail]


def _tail_term_fraction(tail: TailRule, k: int) -> Optional[Fraction]:
    j = k - tail.start_index
    if isinstance(tail, ExactGeometricTail):
        return _frac(tail.scale) * _frac(tail.ratio) ** j
    if isinstance(tail, MixedGeometricTail):
        return (_frac(tail.scale) * _frac(tail.ratio) ** j
                + _frac(tail.scale2) * _frac(tail.ratio2) ** j)
    if isinstance(tail, PowerLawTail):
        if float(tail.exponent).is_integer():
            return _frac(tail.scale) * Fraction(1, k ** int(tail.exponent))
        return None
    return None  # bound-only


def _tail_term_interval(tail: TailRule, k: int) -> Interval:
    fr = _tail_term_fraction(tail, k)
    if fr is not None:
        return Interval.exact(fr)
    if isinstance(tail, PowerLawTail):
        return Interval.point(tail.scale) * pow_bounds(float(k), -tail.exponent)
    if isinstance(tail, GeometricBoundTail):
        j = k - tail.start_index
        hi = Interval.exact(_frac(tail.scale) * _frac(tail.ratio) ** j).hi
        return Interval(0.0, hi)
    raise TypeError(f"unknown tail rule {tail!r}")


def _tail_rem_fraction(tail: TailRule, n: int) -> Optional[Fraction]:
    """Exact sum of continuation terms with k > n (n >= start_index - 1)."""
    j = n + 1 - tail.start_index
    if isinstance(tail, ExactGeometricTail):
        r = _frac(tail.ratio)
        return _frac(tail.scale) * r ** j / (1 - r)
    if isinstance(tail, MixedGeometricTail):
        r1, r2 = _frac(tail.ratio), _frac(tail.ratio2)
        return (_frac(tail.scale) * r1 ** j / (1 - r1)
                + _frac(tail.scale2) * r2 ** j / (1 - r2))
    return None


def _tail_rem_interval(tail: TailRule, n: int) -> Interval:
    fr = _tail_rem_fraction(tail, n)
    if fr is not None:
        return Interval.exact(fr)
    if isinstance(tail, PowerLawTail):
        s = tail.exponent
        integral = pow_bounds(float(n + 1), 1.0 - s) / Interval.point(s - 1.0)
        first = pow_bounds(float(n + 1), -s)
        lo = (Interval.point(tail.scale) * integral).lo
        hi = (Interval.point(tail.scale) * (first + integral)).hi
        return Interval(max(0.0, lo), hi)
    if isinstance(tail, GeometricBoundTail):
        r = _frac(tail.ratio)
        j = n + 1 - tail.start_index
        hi = Interval.exact(_frac(tail.scale) * r ** j / (1 - r)).hi
        return Interval(0.0, hi)
    raise TypeError(f"unknown tail rule {tail!r}")


# ---------------------------------------------------------------------------
# Gap-ratio profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapRatioProfile:
    """Certified shape of {k : a_k/t_k > 1}.

    Fields are three-valued: True/False are certified, None means the
    generator does not support a certificate.  For every catalog generator
    the sign of (ratio - 1) stabilizes, so "eventually above one" coincides
    with "above one infinitely often".
    """

    always_above_one: Optional[bool]
    always_at_least_one: Optional[bool]
    eventually_above_one: Optional[bool]
    eventually_at_most_one: Optional[bool]
    eventually_below_one: Optional[bool]
    constant_value: Optional[Fraction]
    note: str = ""


def _profile_from_constant(c: Fraction, note: str) -> GapRatioProfile:
    return GapRatioProfile(
        always_above_one=c > 1,
        always_at_least_one=c >= 1,
        eventually_above_one=c > 1,
        eventually_at_most_one=c <= 1,
        eventually_below_one=c < 1,
        constant_value=c,
        note=note,
    )


def _all3(values) -> Optional[bool]:
    """Three-valued 'all': False dominates, then None, then True."""
    out: Optional[bool] = True
    for v in values:
        if v is False:
            return False
        if v is None:
            out = None
    return out


@dataclass(frozen=True)
class _MixedSignAnalysis:
    """Exact sign of (a_k - t_k) along a mixed-geometric continuation."""

    head_signs: tuple[int, ...]   # signs at j = 0 .. stabilization-1
    settled_sign: int             # sign for every later j

    @property
    def all_signs_positive(self) -> bool:
        return all(s > 0 for s in self.head_signs) and self.settled_sign > 0

    @property
    def all_signs_nonnegative(self) -> bool:
        return all(s >= 0 for s in self.head_signs) and self.settled_sign >= 0


def _mixed_sign_analysis(tail: MixedGeometricTail) -> _MixedSignAnalysis:
    s1, r1 = _frac(tail.scale), _frac(tail.ratio)
    s2, r2 = _frac(tail.scale2), _frac(tail.ratio2)
    a = s1 * (1 - 2 * r1) / (1 - r1)
    b = s2 * (1 - 2 * r2) / (1 - r2)
    sign = lambda fr: (fr > 0) - (fr < 0)
    if a == 0:
        return _MixedSignAnalysis((), sign(b))
    # sign(a*r1^j + b*r2^j) settles to sign(a) once |b|*r2^j < |a|*r1^j
    head: list[int] = []
    lhs, rhs = abs(b), abs(a)  # times r2^j and r1^j respectively
    j = 0
    while lhs >= rhs:
        head.append(sign(a * r1 ** j + b * r2 ** j))
        lhs *= r2
        rhs *= r1
        j += 1
        if j > 100_000:  # pragma: no cover - ratio2 < ratio guarantees exit
            raise SpecValidationError("mixed-geometric sign analysis diverged")
    return _MixedSignAnalysis(tuple(head), sign(a))


def _mixed_profile(tail: MixedGeometricTail) -> GapRatioProfile:
    sa = _mixed_sign_analysis(tail)
    return GapRatioProfile(
        always_above_one=sa.all_signs_positive,
        always_at_least_one=sa.all_signs_nonnegative,
        eventually_above_one=sa.settled_sign > 0,
        eventually_at_most_one=sa.settled_sign <= 0,
        eventually_below_one=sa.settled_sign < 0,
        constant_value=None,
        note="mixed-geometric continuation, sign settled exactly",
    )


def _power_tail_ratio_upper(tail: PowerLawTail, k: int) -> float:
    # a_k/t_k <= (e-1) * (k+1)^(e-1) / k^e, and this bound decreases in k
    e = tail.exponent
    bound = (Interval.point(e - 1.0)
             * pow_bounds(float(k + 1), e - 1.0)
             * pow_bounds(float(k), -e))
    return bound.hi


# ---------------------------------------------------------------------------
# Scale sequences
# ---------------------------------------------------------------------------


class _ScaleBase:
    """Shared helpers; subclasses provide exact terms and tail sums."""

    def term_fraction(self, k: int) -> Optional[Fraction]:
        raise NotImplementedError

    def tail_fraction(self, n: int) -> Optional[Fraction]:
        raise NotImplementedError

    def term_interval(self, k: int) -> Interval:
        fr = self.term_fraction(k)
        if fr is None:
            raise TailUnboundedError("scale term not determined by a bound-only tail")
        return Interval.exact(fr)

    def tail_interval(self, n: int) -> Interval:
        fr = self.tail_fraction(n)
        if fr is None:
            raise TailUnboundedError("tail sum has no certified lower bound")
        return Interval.exact(fr)

    def term_float(self, k: int) -> float:
        iv = self.term_interval(k)
        return iv.mid

    def tail_float(self, n: int) -> float:
        return self.tail_interval(n).mid

    @property
    def is_exact(self) -> bool:
        return True

    def gap_ratio_interval(self, k: int) -> Interval:
        if k < 1:
            raise SpecValidationError("gap ratio index must be >= 1")
        a = self.term_fraction(k)
        t = self.tail_fraction(k)
        if a is not None and t is not None:
            if t <= 0:
                raise TailUnboundedError("tail sum is zero")
            return Interval.exact(a / t)
        num = self.term_interval(k)
        den = self.tail_interval(k)
        if den.lo <= 0.0:
            raise TailUnboundedError("tail sum has no positive lower bound")
        return num / den

    def gap_ratio_float(self, k: int) -> float:
        return self.gap_ratio_interval(k).mid

    def gap_ratio_profile(self) -> GapRatioProfile:
        raise NotImplementedError

    def nonincreasing(self) -> Optional[bool]:
        raise NotImplementedError

    def gap_excess_terms(self) -> TermSeq:
        """Series terms a_k/t_k - 1; requires an always-above-one profile."""
        raise NotImplementedError

    def tail_squares_interval(self, n: int) -> Interval:
        """Enclosure of sum_{k>n} a_k**2."""
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(_ScaleBase):
    """Terms ``coef * lam**k`` for k >= 1; lam = 1/2 gives the uniform case."""

    lam: float
    coef: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise SpecValidationError("geometric scale needs lam in (0,1)")
        if self.coef <= 0.0:
            raise SpecValidationError("geometric scale needs coef > 0")

    def term_fraction(self, k):
        return _frac(self.coef) * _frac(self.lam) ** k

    def tail_fraction(self, n):
        lam = _frac(self.lam)
        return _frac(self.coef) * lam ** (n + 1) / (1 - lam)

    def term_float(self, k):
        return self.coef * self.lam ** k

    def gap_ratio_float(self, k):
        return (1.0 - self.lam) / self.lam

    def gap_ratio_profile(self):
        lam = _frac(self.lam)
        return _profile_from_constant((1 - lam) / lam, "geometric: constant ratio")

    def nonincreasing(self):
        return True

    def gap_excess_terms(self):
        c = self.gap_ratio_profile().constant_value
        return TermSeq((), ConstTail(1, Interval.exact(c - 1)))

    def tail_squares_interval(self, n):
        lam2 = _frac(self.lam) ** 2
        return Interval.exact(_frac(self.coef) ** 2 * lam2 ** (n + 1) / (1 - lam2))


@dataclass(frozen=True)
class CantorLike(_ScaleBase):
    """Terms ``coef * base**(-k)``; coef=2, base=3 is the middle-thirds set."""

    coef: float
    base: int

    def __post_init__(self):
        if self.coef <= 0.0:
            raise SpecValidationError("cantor-like scale needs coef > 0")
        if int(self.base) != self.base or self.base < 2:
            raise SpecValidationError("cantor-like scale needs integer base >= 2")

    def term_fraction(self, k):
        return _frac(self.coef) * Fraction(1, self.base ** k)

    def tail_fraction(self, n):
        return _frac(self.coef) / (Fraction(self.base) ** n * (self.base - 1))

    def term_float(self, k):
        return self.coef * float(self.base) ** (-k)

    def gap_ratio_float(self, k):
        return float(self.base - 1)

    def gap_ratio_profile(self):
        return _profile_from_constant(Fraction(self.base - 1), "cantor-like: constant ratio")

    def nonincreasing(self):
        return True

    def gap_excess_terms(self):
        return TermSeq((), ConstTail(1, Interval.exact(Fraction(self.base - 2))))

    def tail_squares_interval(self, n):
        b2 = Fraction(self.base) ** 2
        return Interval.exact(_frac(self.coef) ** 2 / (b2 ** n * (b2 - 1)))


def _mixed_params(tail: MixedGeometricTail):
    return (_frac(tail.scale), _frac(tail.ratio), _frac(tail.scale2), _frac(tail.ratio2))


def _mixed_gap_excess_settle(tail: MixedGeometricTail, start: int):
    """(settle_k, tail_form) for the excess a_k/t_k - 1 of a mixed continuation.

    With ratio exactly 1/2 the excess is sandwiched between two geometric
    sequences with ratio 2*ratio2 from ``start`` on (settle_k = start).
    With ratio < 1/2 the excess tends to the positive constant
    (1-2*ratio)/ratio; an exactly computed settling index pins numerator and
    denominator within a factor-of-two corridor, giving constant
    floor/ceiling bounds valid from settle_k on.
    """
    s1, r1, s2, r2 = _mixed_params(tail)
    if r1 == _HALF:
        if s2 <= 0:
            raise SpecValidationError("gap excess requires positive second scale")
        b = s2 * (1 - 2 * r2) / (1 - r2)
        c2 = s2 * r2 / (1 - r2)
        ratio = 2 * r2
        j0 = start - tail.start_index
        form = SandwichTail(
            start,
            GeomTail(start, Interval.exact(b / (s1 + c2) * ratio ** j0), Interval.exact(ratio)),
            GeomTail(start, Interval.exact(b / s1 * ratio ** j0), Interval.exact(ratio)),
        )
        return start, form
    if r1 > _HALF:
        raise SpecValidationError("gap excess requires ratio <= 1/2")
    # numerator/r1^j = A + B u^j with u = r2/r1 < 1; denominator/r1^j = D0 + C2 u^j
    a = s1 * (1 - 2 * r1) / (1 - r1)
    b = s2 * (1 - 2 * r2) / (1 - r2)
    d0 = s1 * r1 / (1 - r1)
    c2 = s2 * r2 / (1 - r2)
    j = 0
    num_perturb, den_perturb = abs(b), abs(c2)
    while num_perturb > a / 2 or den_perturb > d0 / 2:
        num_perturb *= r2 / r1
        den_perturb *= r2 / r1
        j += 1
        if j > 100_000:  # pragma: no cover
            raise SpecValidationError("mixed excess settling diverged")
    settle_k = max(start, tail.start_index + j)
    floor = Interval.exact((a / 2) / (d0 + max(c2, Fraction(0)) + d0 / 2))
    ceiling = Interval.exact((a + abs(b)) / (d0 / 2))
    form = SandwichTail(settle_k, ConstTail(settle_k, floor), ConstTail(settle_k, ceiling))
    return settle_k, form


@dataclass(frozen=True)
class TwoTerm(_ScaleBase):
    """Terms ``(1-eps)*2**-k + 3*eps*4**-k`` for eps in (0,1).

    Every gap ratio strictly exceeds 1 while the excess decays geometrically,
    so the incomplete-sums set is nowhere dense with positive measure.
    """

    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise SpecValidationError("two-term scale needs epsilon in (0,1)")

    def _as_mixed(self) -> MixedGeometricTail:
        e = self.epsilon
        return MixedGeometricTail(
            scale=(1.0 - e) / 2.0, ratio=0.5,
            scale2=3.0 * e / 4.0, ratio2=0.25, start_index=1,
        )

    def term_fraction(self, k):
        e = _frac(self.epsilon)
        return (1 - e) * Fraction(1, 2 ** k) + 3 * e * Fraction(1, 4 ** k)

    def tail_fraction(self, n):
        e = _frac(self.epsilon)
        return (1 - e) * Fraction(1, 2 ** n) + e * Fraction(1, 4 ** n)

    def term_float(self, k):
        return (1.0 - self.epsilon) * 2.0 ** -k + 3.0 * self.epsilon * 4.0 ** -k

    def gap_ratio_float(self, k):
        t = 2.0 ** -k
        e = self.epsilon
        return 1.0 + 2.0 * e * t / ((1.0 - e) + e * t)

    def gap_ratio_profile(self):
        prof = _mixed_profile(self._as_mixed())
        return GapRatioProfile(
            always_above_one=prof.always_above_one,
            always_at_least_one=prof.always_at_least_one,
            eventually_above_one=prof.eventually_above_one,
            eventually_at_most_one=prof.eventually_at_most_one,
            eventually_below_one=prof.eventually_below_one,
            constant_value=None,
            note="two-term: ratio exceeds 1 by a geometrically decaying excess",
        )

    def nonincreasing(self):
        return True

    def gap_excess_terms(self):
        # exact per-term sandwich: excess = 2*e*2^-k / ((1-e) + e*2^-k)
        e = _frac(self.epsilon)
        lo0 = 2 * e * _HALF / 1  # k = 1 numerator; denominator <= 1
        hi0 = 2 * e * _HALF / (1 - e)
        half = Interval.exact(_HALF)
        return TermSeq(
            (),
            SandwichTail(
                1,
                GeomTail(1, Interval.exact(lo0), half),
                GeomTail(1, Interval.exact(hi0), half),
            ),
        )

    def tail_squares_interval(self, n):
        e = _frac(self.epsilon)
        s1, s2 = 1 - e, 3 * e
        q1, q2, q12 = Fraction(1, 4), Fraction(1, 16), Fraction(1, 8)
        total = (s1 ** 2 * q1 ** (n + 1) / (1 - q1)
                 + 2 * s1 * s2 * q12 ** (n + 1) / (1 - q12)
                 + s2 ** 2 * q2 ** (n + 1) / (1 - q2))
        return Interval.exact(total)


@dataclass(frozen=True)
class ExplicitScales(_ScaleBase):
    """Finite positive prefix followed by a tail rule continuation."""

    prefix: tuple[float, ...]
    tail: TailRule

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(x) for x in self.prefix))
        for x in self.prefix:
            if not math.isfinite(x) or x <= 0.0:
                raise SpecValidationError("explicit prefix values must be finite and > 0")
        if self.tail.start_index != len(self.prefix) + 1:
            raise SpecValidationError(
                "tail start_index must equal prefix length + 1 "
                f"(got {self.tail.start_index} for prefix of {len(self.prefix)})"
            )

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.tail, (PowerLawTail, GeometricBoundTail)) or (
            isinstance(self.tail, PowerLawTail) and float(self.tail.exponent).is_integer()
        )

    def term_fraction(self, k):
        if k < 1:
            raise SpecValidationError("term index must be >= 1")
        if k <= len(self.prefix):
            return _frac(self.prefix[k - 1])
        return _tail_term_fraction(self.tail, k)

    def term_interval(self, k):
        if k <= len(self.prefix):
            return Interval.exact(_frac(self.prefix[k - 1]))
        return _tail_term_interval(self.tail, k)

    def term_float(self, k):
        return self.term_interval(k).mid

    def tail_fraction(self, n):
        start = self.tail.start_index
        if n >= start - 1:
            return _tail_rem_fraction(self.tail, n)
        head = sum((_frac(x) for x in self.prefix[n:]), Fraction(0))
        rest = _tail_rem_fraction(self.tail, start - 1)
        return None if rest is None else head + rest

    def tail_interval(self, n):
        fr = self.tail_fraction(n)
        if fr is not None:
            return Interval.exact(fr)
        start = self.tail.start_index
        if n >= start - 1:
            return _tail_rem_interval(self.tail, n)
        head = Interval.point(0.0)
        for x in self.prefix[n:]:
            head = head + Interval.exact(_frac(x))
        return head + _tail_rem_interval(self.tail, start - 1)

    def gap_ratio_interval(self, k):
        if k < 1:
            raise SpecValidationError("gap ratio index must be >= 1")
        if isinstance(self.tail, GeometricBoundTail):
            raise TailUnboundedError("gap ratio undefined for a bound-only tail")
        return super().gap_ratio_interval(k)

    def gap_ratio_float(self, k):
        tail = self.tail
        if k < tail.start_index:
            return float(self.term_float(k)) / self.tail_interval(k).mid
        if isinstance(tail, ExactGeometricTail):
            return (1.0 - tail.ratio) / tail.ratio
        if isinstance(tail, MixedGeometricTail):
            j = k - tail.start_index
            u = (tail.ratio2 / tail.ratio) ** j
            num = tail.scale + tail.scale2 * u
            den = (tail.scale * tail.ratio / (1.0 - tail.ratio)
                   + tail.scale2 * u * tail.ratio2 / (1.0 - tail.ratio2))
            return num / den
        if isinstance(tail, PowerLawTail):
            return self.gap_ratio_interval(k).mid
        raise TailUnboundedError("gap ratio undefined for a bound-only tail")

    def _head_statuses(self) -> list[str]:
        """'above' / 'equal' / 'below' / 'unknown' for each prefix index."""
        out = []
        for k in range(1, len(self.prefix) + 1):
            a = self.term_fraction(k)
            t = self.tail_fraction(k)
            if a is not None and t is not None:
                out.append("above" if a > t else ("equal" if a == t else "below"))
                continue
            try:
                iv = self.gap_ratio_interval(k)
            except TailUnboundedError:
                out.append("unknown")
                continue
            if iv.lo > 1.0:
                out.append("above")
            elif iv.hi < 1.0:
                out.append("below")
            else:
                out.append("unknown")
        return out

    def gap_ratio_profile(self):
        head = self._head_statuses()
        tail = self.tail
        if isinstance(tail, ExactGeometricTail):
            r = _frac(tail.ratio)
            tail_prof = _profile_from_constant((1 - r) / r, "")
        elif isinstance(tail, MixedGeometricTail):
            tail_prof = _mixed_profile(tail)
        elif isinstance(tail, PowerLawTail):
            k = tail.start_index
            while _power_tail_ratio_upper(tail, k) >= 1.0 and k < tail.start_index + 10_000:
                k += 1
            settled = k < tail.start_index + 10_000
            tail_prof = GapRatioProfile(
                always_above_one=False,
                always_at_least_one=False,
                eventually_above_one=False,
                eventually_at_most_one=settled or None,
                eventually_below_one=settled or None,
                constant_value=None,
                note="power-law continuation: ratio falls below 1",
            )
        else:
            tail_prof = GapRatioProfile(None, None, None, None, None, None,
                                        "bound-only continuation")
        def _tri(s: str, ok: tuple[str, ...]) -> Optional[bool]:
            return True if s in ok else (None if s == "unknown" else False)

        head_above = _all3(_tri(s, ("above",)) for s in head)
        head_at_least = _all3(_tri(s, ("above", "equal")) for s in head)
        const = tail_prof.constant_value if not self.prefix else None
        return GapRatioProfile(
            always_above_one=_all3([head_above, tail_prof.always_above_one]),
            always_at_least_one=_all3([head_at_least, tail_prof.always_at_least_one]),
            eventually_above_one=tail_prof.eventually_above_one,
            eventually_at_most_one=tail_prof.eventually_at_most_one,
            eventually_below_one=tail_prof.eventually_below_one,
            constant_value=const,
            note=f"explicit prefix ({len(self.prefix)} terms) + {tail_prof.note}",
        )

    def nonincreasing(self):
        vals = [(_frac(x)) for x in self.prefix]
        for a, b in zip(vals, vals[1:]):
            if a < b:
                return False
        tail = self.tail
        first_tail = _tail_term_fraction(tail, tail.start_index)
        if isinstance(tail, GeometricBoundTail):
            return None
        if vals:
            if first_tail is not None:
                if vals[-1] < first_tail:
                    return False
            else:
                iv = _tail_term_interval(tail, tail.start_index)
                if float(vals[-1]) < iv.lo:
                    return False
                if float(vals[-1]) < iv.hi:
                    return None
        if isinstance(tail, (ExactGeometricTail, PowerLawTail)):
            return True
        if isinstance(tail, MixedGeometricTail):
            # a_j - a_(j+1) = s1*r1^j*(1-r1) + s2*r2^j*(1-r2): same settling trick
            s1, r1, s2, r2 = _mixed_params(tail)
            c1, c2 = s1 * (1 - r1), s2 * (1 - r2)
            if c2 >= 0:
                return True
            lhs, rhs = abs(c2), c1
            j = 0
            while lhs >= rhs:
                if c1 * r1 ** j + c2 * r2 ** j < 0:
                    return False
                lhs *= r2
                rhs *= r1
                j += 1
            return True
        return None

    def gap_excess_terms(self):
        tail = self.tail
        if isinstance(tail, ExactGeometricTail):
            r = _frac(tail.ratio)
            start = tail.start_index
            form = ConstTail(start, Interval.exact((1 - r) / r - 1))
        elif isinstance(tail, MixedGeometricTail):
            start, form = _mixed_gap_excess_settle(tail, tail.start_index)
        else:
            raise TailUnboundedError("gap excess not certifiable for this tail rule")
        prefix_terms = []
        for k in range(1, start):
            iv = self.gap_ratio_interval(k)
            prefix_terms.append(Interval(max(0.0, iv.lo - 1.0), iv.hi - 1.0))
        return TermSeq(tuple(prefix_terms), form)

    def tail_squares_interval(self, n):
        start = self.tail.start_index
        head = Interval.point(0.0)
        for k in range(n + 1, start):
            a = Interval.exact(_frac(self.prefix[k - 1]))
            head = head + a * a
        j = max(n + 1 - start, 0)
        tail = self.tail
        if isinstance(tail, ExactGeometricTail):
            r2 = _frac(tail.ratio) ** 2
            rest = Interval.exact(_frac(tail.scale) ** 2 * r2 ** j / (1 - r2))
        elif isinstance(tail, MixedGeometricTail):
            s1, r1, s2, r2 = _mixed_params(tail)
            q1, q2, q12 = r1 ** 2, r2 ** 2, r1 * r2
            rest = Interval.exact(
                s1 ** 2 * q1 ** j / (1 - q1)
                + 2 * s1 * s2 * q12 ** j / (1 - q12)
                + s2 ** 2 * q2 ** j / (1 - q2)
            )
        else:
            # sum of squares <= (sum of terms)^2 over the continuation
            rem = _tail_rem_interval(tail, max(n, start - 1))
            rest = Interval(0.0, (rem * rem).hi)
        return head + rest


ScaleSeq = Union[Geometric, CantorLike, TwoTerm, ExplicitScales]


# ---------------------------------------------------------------------------
# Digit laws
# ---------------------------------------------------------------------------


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@dataclass(frozen=True)
class _AnalyticDigitForm:
    """Normal form of a digit generator from some index on.

    kind 'const':  p0_k = center
    kind 'power':  p0_k = clamp(center + c * k**-s)
    kind 'geom':   p0_k = clamp(center + c * ratio**k)
    """

    kind: str
    center: float
    c: float = 0.0
    s: float = 1.0
    ratio: float = 0.5

    def raw(self, k: int) -> float:
        if self.kind == "const":
            return self.center
        if self.kind == "power":
            return self.center + self.c * math.pow(float(k), -self.s)
        return self.center + self.c * math.pow(self.ratio, float(k))

    def deviation_fraction(self, k: int) -> Fraction:
        """Exact |formula deviation| at index k (unclamped)."""
        if self.kind == "const":
            return Fraction(0)
        if self.kind == "geom":
            return abs(_frac(self.c)) * _frac(self.ratio) ** k
        raise ValueError("power deviations are irrational; use bounds")

    def deviation_upper(self, k: int) -> float:
        if self.kind == "const":
            return 0.0
        if self.kind == "geom":
            return Interval.exact(self.deviation_fraction(k)).hi
        return (Interval.point(abs(self.c)) * pow_bounds(float(k), -self.s)).hi


def _normalize_pinned(form: _AnalyticDigitForm) -> _AnalyticDigitForm:
    """Perturbations that can never leave a boundary clamp to a constant."""
    if form.kind != "const" and form.c != 0.0:
        if form.center == 1.0 and form.c > 0.0:
            return _AnalyticDigitForm("const", 1.0)
        if form.center == 0.0 and form.c < 0.0:
            return _AnalyticDigitForm("const", 0.0)
    return form


class _DigitBase:
    def p0(self, k: int) -> float:
        raise NotImplementedError

    def p1(self, k: int) -> float:
        return 1.0 - self.p0(k)

    def normal_form(self) -> tuple[tuple[float, ...], _AnalyticDigitForm]:
        """Explicit overrides for k = 1..m, analytic form for k > m."""
        raise NotImplementedError

    def limit_p0(self) -> float:
        return self.normal_form()[1].center


@dataclass(frozen=True)
class ConstantDigits(_DigitBase):
    """p0_k = p0 for every k."""

    p0_value: float

    def __post_init__(self):
        if not (0.0 <= self.p0_value <= 1.0):
            raise SpecValidationError("digit probability must lie in [0,1]")

    def p0(self, k):
        return self.p0_value

    def normal_form(self):
        return (), _AnalyticDigitForm("const", self.p0_value)


@dataclass(frozen=True)
class PerturbedDigits(_DigitBase):
    """p0_k = clamp(p0 + c * k**-s, 0, 1); clamped indices are reported."""

    p0_value: float
    c: float
    s: float

    def __post_init__(self):
        if not (0.0 <= self.p0_value <= 1.0):
            raise SpecValidationError("digit probability must lie in [0,1]")
        if self.s <= 0.0:
            raise SpecValidationError("perturbation decay exponent must be > 0")
        if not math.isfinite(self.c):
            raise SpecValidationError("perturbation coefficient must be finite")

    def p0(self, k):
        return _clamp01(self.p0_value + self.c * math.pow(float(k), -self.s))

    def clamped_indices(self, upto: int = 64) -> tuple[int, ...]:
        out = []
        for k in range(1, upto + 1):
            raw = self.p0_value + self.c * math.pow(float(k), -self.s)
            if raw < 0.0 or raw > 1.0:
                out.append(k)
        return tuple(out)

    def normal_form(self):
        return (), _normalize_pinned(_AnalyticDigitForm("power", self.p0_value, self.c, self.s))


@dataclass(frozen=True)
class ConstantDigitTail:
    p0_value: float
    start_index: int = 1


@dataclass(frozen=True)
class PerturbedDigitTail:
    p0_value: float
    c: float
    s: float
    start_index: int = 1


@dataclass(frozen=True)
class GeometricApproachDigitTail:
    """p0_k = clamp(p0 + c * ratio**k): geometric approach to a limit."""

    p0_value: float
    c: float
    ratio: float
    start_index: int = 1

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise SpecValidationError("geometric-approach ratio must lie in (0,1)")


DigitTailRule = Union[ConstantDigitTail, PerturbedDigitTail, GeometricApproachDigitTail]


def _digit_tail_form(tail: DigitTailRule) -> _AnalyticDigitForm:
    if isinstance(tail, ConstantDigitTail):
        return _AnalyticDigitForm("const", tail.p0_value)
    if isinstance(tail, PerturbedDigitTail):
        return _normalize_pinned(_AnalyticDigitForm("power", tail.p0_value, tail.c, tail.s))
    return _normalize_pinned(_AnalyticDigitForm("geom", tail.p0_value, tail.c, ratio=tail.ratio))


@dataclass(frozen=True)
class ExplicitDigits(_DigitBase):
    """Explicit probabilities for k <= m, a digit tail rule afterwards."""

    prefix: tuple[float, ...]
    tail: DigitTailRule

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(x) for x in self.prefix))
        for x in self.prefix:
            if not (0.0 <= x <= 1.0):
                raise SpecValidationError("digit probabilities must lie in [0,1]")
        if not (0.0 <= self.tail.p0_value <= 1.0):
            raise SpecValidationError("digit probabilities must lie in [0,1]")
        if self.tail.start_index != len(self.prefix) + 1:
            raise SpecValidationError("digit tail start_index must equal prefix length + 1")

    def p0(self, k):
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return _clamp01(_digit_tail_form(self.tail).raw(k))

    def normal_form(self):
        return self.prefix, _digit_tail_form(self.tail)


DigitLaw = Union[ConstantDigits, PerturbedDigits, ExplicitDigits]


@dataclass(frozen=True)
class ConvolutionSpec:
    """A scale sequence together with a digit law; immutable value."""

    scales: ScaleSeq
    digits: DigitLaw


# ---------------------------------------------------------------------------
# Public tail/ratio operations
# ---------------------------------------------------------------------------


def tail_sum(scales: ScaleSeq, n: int) -> Interval:
    """Enclosure of sum_{i>n} a_i.  Exact generators give 1-ulp width."""
    if n < 0:
        raise SpecValidationError("tail index must be >= 0")
    return scales.tail_interval(n)


def gap_ratio(scales: ScaleSeq, k: int) -> Interval:
    """Enclosure of a_k / sum_{i>k} a_i for k >= 1."""
    if k < 1:
        raise SpecValidationError("gap ratio index must be >= 1")
    return scales.gap_ratio_interval(k)


# ---------------------------------------------------------------------------
# Criterion term builders over digit laws
# ---------------------------------------------------------------------------

_CLAMP_MARGIN = 1e-9

# largest explicit prefix the criterion builders will materialize; deeper
# clamp/settling horizons degrade to opaque (uncertified) sequences
_PREFIX_BUDGET = 65_536


def _pointwise_abs_dev_interval(p0k: float, center: float, power: int) -> Interval:
    d = abs(p0k - center)
    v = d ** power
    pad = 8e-16 * v if v else 0.0
    return Interval(max(0.0, v - pad), v + pad)


def _first_below(form: _AnalyticDigitForm, start: int, threshold: float) -> Optional[int]:
    """Smallest k >= start with deviation_upper(k) <= threshold, or None when
    it lies beyond the prefix budget.  Deviations are nonincreasing, so a
    closed-form estimate plus a short upward verification suffices."""
    if threshold <= 0.0:
        return None
    if form.deviation_upper(start) <= threshold:
        return start
    c = abs(form.c)
    try:
        if form.kind == "power":
            guess = (c / threshold) ** (1.0 / form.s)
        else:
            guess = math.log(threshold / c) / math.log(form.ratio)
    except (OverflowError, ValueError):  # pragma: no cover
        return None
    if not math.isfinite(guess) or guess > _PREFIX_BUDGET:
        return None
    k = max(start, int(guess))
    for _ in range(80):
        if form.deviation_upper(k) <= threshold:
            return k if k <= _PREFIX_BUDGET else None
        k += 1
    return None  # pragma: no cover - monotone decay settles within the probe


def _unclamped_from(form: _AnalyticDigitForm, start: int) -> Optional[int]:
    """Smallest K >= start with the raw formula certifiably inside [0,1] for
    all k >= K; boundary-ambiguous indices are pushed into the prefix.
    None when the clamp region outruns the prefix budget."""
    if form.kind == "const" or form.c == 0.0:
        return start
    room = (1.0 - form.center) if form.c > 0 else form.center
    if room <= 0.0:  # pragma: no cover - normalized to const earlier
        raise SpecValidationError("digit formula pinned at the boundary; use a constant law")
    return _first_below(form, start, room * (1.0 - _CLAMP_MARGIN))


def _settled_from(form: _AnalyticDigitForm, start: int, threshold: Fraction) -> Optional[int]:
    """Smallest K >= start with |deviation(k)| <= threshold for all k >= K."""
    if form.kind == "const" or form.c == 0.0:
        return start
    return _first_below(form, start, float(threshold))


def _deviation_tail(form: _AnalyticDigitForm, start: int, power: int):
    """Tail form of |c*decay(k)|**power from a clamp-free start index."""
    if form.kind == "power":
        coef = abs(_frac(form.c)) ** power
        return PowerTail(start, Interval.exact(coef), power * form.s)
    if form.kind == "geom":
        r = _frac(form.ratio) ** power
        first = (abs(_frac(form.c)) * _frac(form.ratio) ** start) ** power
        return GeomTail(start, Interval.exact(first), Interval.exact(r))
    return ZeroTail(start)


def _opaque_terms(digits: DigitLaw, term_fn) -> TermSeq:
    return TermSeq((), OpaqueTail(1, term_fn))


def deviation_terms(digits: DigitLaw, center: float, power: int = 2) -> TermSeq:
    """Terms |p0_k - center|**power with a certified analytic tail.

    When the generator's limit equals ``center`` the tail is the exact decay
    form of the perturbation; otherwise the terms settle above a positive
    floor and the certificate is a constant sandwich.  Laws whose clamp
    region outruns the analysis budget degrade to an opaque (uncertified)
    sequence instead of failing.
    """
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    overrides, form = digits.normal_form()
    centerF = _frac(center)
    start0 = len(overrides) + 1
    if form.kind == "const" or form.c == 0.0:
        dev = abs(_frac(form.center) - centerF) ** power
        tail = ZeroTail(start0) if dev == 0 else ConstTail(start0, Interval.exact(dev))
        prefix = tuple(
            _pointwise_abs_dev_interval(digits.p0(k), center, power)
            for k in range(1, start0)
        )
        return TermSeq(prefix, tail)

    def pointwise(k: int) -> float:
        return abs(digits.p0(k) - center) ** power

    if _frac(form.center) == centerF:
        k0 = _unclamped_from(form, start0)
        if k0 is None:
            return _opaque_terms(digits, pointwise)
        prefix = tuple(
            _pointwise_abs_dev_interval(digits.p0(k), center, power)
            for k in range(1, k0)
        )
        return TermSeq(prefix, _deviation_tail(form, k0, power))

    delta = abs(_frac(form.center) - centerF)
    k0 = _unclamped_from(form, start0)
    k1s = _settled_from(form, start0, delta / 2)
    if k0 is None or k1s is None:
        return _opaque_terms(digits, pointwise)
    k1 = max(k0, k1s)
    prefix = tuple(
        _pointwise_abs_dev_interval(digits.p0(k), center, power)
        for k in range(1, k1)
    )
    floor = Interval.exact((delta / 2) ** power)
    ceiling = Interval.exact((3 * delta / 2) ** power)
    return TermSeq(prefix, SandwichTail(k1, ConstTail(k1, floor), ConstTail(k1, ceiling)))


def min_component_terms(digits: DigitLaw) -> TermSeq:
    """Terms min(p0_k, p1_k) = 1 - max(p0_k, p1_k), certified.

    The limit of p0_k decides the shape: an interior limit gives a positive
    floor (divergent series, non-discrete law); a boundary limit reduces to
    the deviation decay (power 1).
    """
    overrides, form = digits.normal_form()
    start0 = len(overrides) + 1
    limit = _frac(form.center)

    def pointwise(k: int) -> Interval:
        p = digits.p0(k)
        m = min(p, 1.0 - p)
        return Interval.point(m).widen(4e-16 if 0.0 < m < 1.0 else 0.0)

    def opaque(k: int) -> float:
        p = digits.p0(k)
        return min(p, 1.0 - p)

    if limit == 0 or limit == 1:
        if form.kind == "const" or form.c == 0.0:
            prefix = tuple(pointwise(k) for k in range(1, start0))
            return TermSeq(prefix, ZeroTail(start0))
        k0 = _unclamped_from(form, start0)
        k_half_s = _settled_from(form, start0, _HALF)
        if k0 is None or k_half_s is None:
            return _opaque_terms(digits, opaque)
        k_half = max(k0, k_half_s)
        prefix = tuple(pointwise(k) for k in range(1, k_half))
        return TermSeq(prefix, _deviation_tail(form, k_half, 1))

    m_inf = min(limit, 1 - limit)
    if form.kind == "const" or form.c == 0.0:
        prefix = tuple(pointwise(k) for k in range(1, start0))
        return TermSeq(prefix, ConstTail(start0, Interval.exact(m_inf)))
    k0 = _unclamped_from(form, start0)
    k1s = _settled_from(form, start0, m_inf / 2)
    if k0 is None or k1s is None:
        return _opaque_terms(digits, opaque)
    k1 = max(k0, k1s)
    prefix = tuple(pointwise(k) for k in range(1, k1))
    floor = Interval.exact(m_inf / 2)
    return TermSeq(
        prefix,
        SandwichTail(k1, ConstTail(k1, floor), ConstTail(k1, Interval.exact(_HALF))),
    )


def digit_p1_bounds_after(digits: DigitLaw, n: int) -> tuple[float, float]:
    """Bounds for p1_k over all k > n (used for tail-sum error control)."""
    overrides, form = digits.normal_form()
    start0 = len(overrides) + 1
    lo, hi = 1.0, 0.0
    for k in range(n + 1, max(start0, n + 1)):
        p1 = digits.p1(k)
        lo, hi = min(lo, p1), max(hi, p1)
    k_from = max(n + 1, start0)
    dev = form.deviation_upper(k_from) if form.kind != "const" else 0.0
    center_p1 = 1.0 - form.center
    lo = min(lo, max(0.0, center_p1 - dev))
    hi = max(hi, min(1.0, center_p1 + dev))
    return lo, hi
