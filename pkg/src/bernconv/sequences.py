"""Certified convergence engine for nonnegative series and (0,1]-products.

The engine never decides convergence numerically.  A term sequence is an
explicit finite prefix of interval-valued terms followed by an analyzed tail
form from a small catalog:

* ``ZeroTail``      -- terms identically zero,
* ``ConstTail``     -- terms pinned inside a constant interval,
* ``GeomTail``      -- terms ``first * ratio**(k - start)`` with ratio < 1,
* ``PowerTail``     -- terms ``coef * k**(-exponent)``,
* ``SandwichTail``  -- terms bracketed between two analyzed forms,
* ``OpaqueTail``    -- terms only computable pointwise.

``Converges`` / ``Diverges`` are emitted only when one of the analytic rules
(geometric sum, p-series with threshold exponent 1, termwise comparison,
finite support) applies to the tail.  Everything else yields ``Unknown``
carrying partial-sum evidence up to a configured horizon; no horizon ever
upgrades evidence into a certificate.

Products of factors t_k in (0,1] reduce to the series of deficits 1 - t_k:
the product has a positive limit iff the deficit series converges.  Positive
lower bounds use a certified partial product times the termwise bound
``prod(1 - d_k) >= exp(-S / (1 - d_max))`` over the remaining tail, where S
bounds the remaining deficit sum and d_max the remaining deficit sup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .errors import FactorOutOfRangeError
from .intervals import Interval, pow_bounds

DEFAULT_HORIZON = 10_000

# ---------------------------------------------------------------------------
# Tail forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroTail:
    start: int = 1


@dataclass(frozen=True)
class ConstTail:
    start: int
    value: Interval

    def __post_init__(self):
        if self.value.lo < 0:
            raise ValueError("constant tail must be nonnegative")


@dataclass(frozen=True)
class GeomTail:
    """Terms ``first * ratio**(k - start)`` for k >= start."""

    start: int
    first: Interval
    ratio: Interval

    def __post_init__(self):
        if self.first.lo < 0:
            raise ValueError("geometric tail must be nonnegative")
        if not (0 <= self.ratio.lo and self.ratio.hi < 1):
            raise ValueError("geometric tail ratio must lie in [0, 1)")


@dataclass(frozen=True)
class PowerTail:
    """Terms ``coef * k**(-exponent)`` for k >= start (global index k)."""

    start: int
    coef: Interval
    exponent: float

    def __post_init__(self):
        if self.coef.lo < 0:
            raise ValueError("power tail coefficient must be nonnegative")
        if self.exponent <= 0:
            raise ValueError("power tail exponent must be positive")
        if self.start < 1:
            raise ValueError("power tail start must be >= 1")


@dataclass(frozen=True)
class SandwichTail:
    """Terms bracketed by ``lower`` (below) and ``upper`` (above), termwise."""

    start: int
    lower: "TailForm"
    upper: "TailForm"


@dataclass(frozen=True)
class OpaqueTail:
    """Pointwise-computable terms with no analyzed structure."""

    start: int
    term_fn: Callable[[int], float]


TailForm = Union[ZeroTail, ConstTail, GeomTail, PowerTail, SandwichTail, OpaqueTail]


def tail_term(tail: TailForm, k: int) -> Interval:
    """Enclosure of term k (k >= tail.start)."""
    if isinstance(tail, ZeroTail):
        return Interval.point(0.0)
    if isinstance(tail, ConstTail):
        return tail.value
    if isinstance(tail, GeomTail):
        return tail.first * tail.ratio.pow_int(k - tail.start)
    if isinstance(tail, PowerTail):
        return tail.coef * pow_bounds(float(k), -tail.exponent)
    if isinstance(tail, SandwichTail):
        return Interval(tail_term(tail.lower, k).lo, tail_term(tail.upper, k).hi)
    if isinstance(tail, OpaqueTail):
        v = float(tail.term_fn(k))
        pad = 1e-15 * (abs(v) + 1e-300)
        return Interval(max(0.0, v - pad), v + pad)
    raise TypeError(f"unknown tail form {tail!r}")


def tail_upper_converges(tail: TailForm) -> bool:
    if isinstance(tail, ZeroTail):
        return True
    if isinstance(tail, ConstTail):
        return tail.value.hi <= 0.0
    if isinstance(tail, GeomTail):
        return True
    if isinstance(tail, PowerTail):
        return tail.coef.hi == 0.0 or tail.exponent > 1.0
    if isinstance(tail, SandwichTail):
        return tail_upper_converges(tail.upper)
    return False


def tail_lower_diverges(tail: TailForm) -> bool:
    if isinstance(tail, ConstTail):
        return tail.value.lo > 0.0
    if isinstance(tail, PowerTail):
        return tail.coef.lo > 0.0 and tail.exponent <= 1.0
    if isinstance(tail, SandwichTail):
        return tail_lower_diverges(tail.lower)
    return False


def tail_sum_from(tail: TailForm, n: int) -> Interval | None:
    """Enclosure of the sum of terms with k > n, or None if not certified.

    Requires n >= tail.start - 1.
    """
    if n < tail.start - 1:
        raise ValueError("tail_sum_from called below the tail start")
    if isinstance(tail, ZeroTail):
        return Interval.point(0.0)
    if isinstance(tail, ConstTail):
        if tail.value.hi <= 0.0:
            return Interval.point(0.0)
        return None
    if isinstance(tail, GeomTail):
        # sum_{k>n} first*ratio^(k-start) = first*ratio^(n+1-start)/(1-ratio)
        lead = tail.first * tail.ratio.pow_int(n + 1 - tail.start)
        return lead / (Interval.point(1.0) - tail.ratio)
    if isinstance(tail, PowerTail):
        if tail.coef.hi == 0.0:
            return Interval.point(0.0)
        if tail.exponent <= 1.0:
            return None
        s = tail.exponent
        # integral bounds for decreasing terms:
        #   int_{n+1}^inf x^-s dx <= sum_{k>n} k^-s <= (n+1)^-s + same integral
        integral = pow_bounds(float(n + 1), 1.0 - s) / Interval.point(s - 1.0)
        first_term = pow_bounds(float(n + 1), -s)
        lo = (tail.coef * integral).lo
        hi = (tail.coef * (first_term + integral)).hi
        return Interval(max(0.0, lo), hi)
    if isinstance(tail, SandwichTail):
        upper = tail_sum_from(tail.upper, n)
        if upper is None:
            return None
        lower = tail_sum_from(tail.lower, n)
        lo = 0.0 if lower is None else lower.lo
        return Interval(min(lo, upper.hi), upper.hi)
    return None


def tail_sup_after(tail: TailForm, n: int) -> float | None:
    """Upper bound for every term with k > n, or None when unknown."""
    if isinstance(tail, ZeroTail):
        return 0.0
    if isinstance(tail, ConstTail):
        return tail.value.hi
    if isinstance(tail, GeomTail):
        return tail_term(tail, max(n + 1, tail.start)).hi
    if isinstance(tail, PowerTail):
        return tail_term(tail, max(n + 1, tail.start)).hi
    if isinstance(tail, SandwichTail):
        return tail_sup_after(tail.upper, n)
    return None


def scale_tail(tail: TailForm, factor: Interval) -> TailForm:
    """Tail form for ``factor * terms``; factor must be nonnegative."""
    if factor.lo < 0:
        raise ValueError("scaling factor must be nonnegative")
    if isinstance(tail, ZeroTail):
        return tail
    if isinstance(tail, ConstTail):
        return ConstTail(tail.start, tail.value * factor)
    if isinstance(tail, GeomTail):
        return GeomTail(tail.start, tail.first * factor, tail.ratio)
    if isinstance(tail, PowerTail):
        return PowerTail(tail.start, tail.coef * factor, tail.exponent)
    if isinstance(tail, SandwichTail):
        return SandwichTail(
            tail.start,
            scale_tail(tail.lower, Interval.point(factor.lo)),
            scale_tail(tail.upper, Interval.point(factor.hi)),
        )
    if isinstance(tail, OpaqueTail):
        mid = factor.mid
        return OpaqueTail(tail.start, lambda k: mid * tail.term_fn(k))
    raise TypeError(f"unknown tail form {tail!r}")


# ---------------------------------------------------------------------------
# Term sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TermSeq:
    """Nonnegative sequence: explicit interval prefix, then an analyzed tail.

    Terms are 1-indexed; the tail covers k >= len(prefix) + 1.
    """

    prefix: tuple[Interval, ...]
    tail: TailForm

    def __post_init__(self):
        expected = len(self.prefix) + 1
        if self.tail.start != expected:
            raise ValueError(
                f"tail start {self.tail.start} != prefix length + 1 = {expected}"
            )
        for t in self.prefix:
            if t.lo < -1e-15:
                raise ValueError("series terms must be nonnegative")

    def term(self, k: int) -> Interval:
        if k < 1:
            raise ValueError("term index must be >= 1")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return tail_term(self.tail, k)

    def partial_sum(self, n: int) -> float:
        return float(sum(self.term(k).mid for k in range(1, n + 1)))

    def prefix_sum(self) -> Interval:
        total = Interval.point(0.0)
        for t in self.prefix:
            total = total + t
        return total

    def sum_from(self, n: int) -> Interval | None:
        """Enclosure of the sum of terms k > n, or None if not certified."""
        if n >= self.tail.start - 1:
            return tail_sum_from(self.tail, n)
        head = Interval.point(0.0)
        for k in range(n + 1, self.tail.start):
            head = head + self.term(k)
        rest = tail_sum_from(self.tail, self.tail.start - 1)
        if rest is None:
            return None
        return head + rest


def constant_terms(value: Interval) -> TermSeq:
    return TermSeq((), ConstTail(1, value))


def zero_terms() -> TermSeq:
    return TermSeq((), ZeroTail(1))


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesVerdict:
    """Certified outcome for a nonnegative series.

    kind is one of ``converges`` / ``diverges`` / ``unknown``; only the
    unknown outcome carries numeric evidence, only ``converges`` carries a
    sum enclosure.
    """

    kind: str
    sum_bound: Interval | None = None
    partial_sum: float | None = None
    terms_examined: int | None = None

    @classmethod
    def converges(cls, sum_bound: Interval) -> "SeriesVerdict":
        return cls("converges", sum_bound=sum_bound)

    @classmethod
    def diverges(cls) -> "SeriesVerdict":
        return cls("diverges")

    @classmethod
    def unknown(cls, partial_sum: float, terms_examined: int) -> "SeriesVerdict":
        return cls("unknown", partial_sum=partial_sum, terms_examined=terms_examined)

    @property
    def certified(self) -> bool:
        return self.kind != "unknown"


@dataclass(frozen=True)
class ProductVerdict:
    """Certified outcome for an infinite product of factors in (0, 1].

    ``positive-limit`` iff the deficit series converges; ``zero-limit`` iff
    it diverges.  ``lower_bound`` may degrade to 0.0 when the tail cannot be
    bounded numerically even though positivity is certified.
    """

    kind: str
    lower_bound: float | None = None
    partial_product: float | None = None
    factors_examined: int | None = None

    @classmethod
    def positive(cls, lower_bound: float, partial: float, examined: int) -> "ProductVerdict":
        return cls("positive-limit", lower_bound=lower_bound,
                   partial_product=partial, factors_examined=examined)

    @classmethod
    def zero(cls, partial: float, examined: int) -> "ProductVerdict":
        return cls("zero-limit", partial_product=partial, factors_examined=examined)

    @classmethod
    def unknown(cls, partial: float, examined: int) -> "ProductVerdict":
        return cls("unknown", partial_product=partial, factors_examined=examined)

    @property
    def certified(self) -> bool:
        return self.kind != "unknown"


def series_verdict(terms: TermSeq, horizon: int = DEFAULT_HORIZON) -> SeriesVerdict:
    """Decide sum(terms) by analytic rules; fall back to Unknown evidence."""
    if tail_upper_converges(terms.tail):
        total = terms.prefix_sum()
        rest = tail_sum_from(terms.tail, terms.tail.start - 1)
        assert rest is not None
        total = total + rest
        return SeriesVerdict.converges(Interval(max(0.0, total.lo), total.hi))
    if tail_lower_diverges(terms.tail):
        return SeriesVerdict.diverges()
    return SeriesVerdict.unknown(terms.partial_sum(horizon), horizon)


def _validate_deficits(deficits: TermSeq, sample_to: int = 256) -> None:
    for k in range(1, min(sample_to, len(deficits.prefix)) + 1):
        t = deficits.term(k)
        if t.lo < -1e-15 or t.hi >= 1.0:
            raise FactorOutOfRangeError(
                f"factor at index {k} outside (0, 1]: deficit {t}"
            )
    sup = tail_sup_after(deficits.tail, deficits.tail.start - 1)
    if sup is not None and sup >= 1.0:
        raise FactorOutOfRangeError("tail factors leave (0, 1]")


def product_verdict(
    factor_deficits: TermSeq,
    horizon: int = DEFAULT_HORIZON,
    partial_terms: int = 64,
) -> ProductVerdict:
    """Decide prod(1 - d_k) for deficits d_k in [0, 1).

    The positive/zero dichotomy is inherited from ``series_verdict`` on the
    deficits.  For a positive limit the reported lower bound multiplies the
    interval partial product up to ``partial_terms`` by a certified bound on
    the remaining tail.
    """
    _validate_deficits(factor_deficits)
    sv = series_verdict(factor_deficits, horizon)
    examined = min(horizon, max(partial_terms, len(factor_deficits.prefix)))
    partial = 1.0
    partial_lo = 1.0
    for k in range(1, examined + 1):
        t = factor_deficits.term(k)
        partial *= 1.0 - t.mid
        partial_lo *= max(0.0, 1.0 - t.hi)
    if sv.kind == "diverges":
        return ProductVerdict.zero(partial, examined)
    if sv.kind == "unknown":
        return ProductVerdict.unknown(partial, examined)

    rest = factor_deficits.sum_from(examined)
    sup = (
        tail_sup_after(factor_deficits.tail, examined)
        if examined >= factor_deficits.tail.start - 1
        else None
    )
    if sup is None or sup >= 1.0 or rest is None:
        lower = 0.0
    else:
        # prod_{k>K}(1-d_k) >= exp(-S/(1-dmax)) since log(1-d) >= -d/(1-dmax)
        tail_factor = math.exp(-rest.hi / (1.0 - sup)) * (1.0 - 1e-12)
        lower = max(0.0, partial_lo * tail_factor)
    return ProductVerdict.positive(lower, partial, examined)
