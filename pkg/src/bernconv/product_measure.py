"""Discreteness and absolute-continuity dichotomy for infinite product measures.

Coordinates are finite probability spaces.  Two classical criteria drive
everything:

* a product measure is purely discrete iff the product of the per-coordinate
  maximal masses stays positive;
* for coordinatewise dominated pairs (nu_k << mu_k), nu << mu iff the product
  of the Hellinger affinities rho(mu_k, nu_k) = sum_w sqrt(mu_k(w) nu_k(w))
  stays positive, and otherwise nu and mu are mutually singular (the
  Kakutani dichotomy).

Both products are decided through the certified deficit-series engine: the
deficit of a factor t_k in (0,1] is 1 - t_k, and the product is positive iff
the deficit series converges.  For a binary coordinate law against a constant
reference law q in (0,1) the Hellinger deficit is sandwiched by the squared
probability deviation,

    x_k**2 / 4  <=  1 - rho_k  <=  x_k**2 * (1/q + 1/(1-q)) / 2,

with x_k = p0_k - q, because (sqrt(a) - sqrt(b))**2 = (a-b)**2/(sqrt(a)+sqrt(b))**2
and sqrt(a)+sqrt(b) lies between sqrt(b) and 2.  This turns the dichotomy
into the same certified series verdicts used for the digit-deviation
criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .convspec import (
    ConstantDigits,
    DigitLaw,
    deviation_terms,
    min_component_terms,
)
from .errors import (
    DimensionMismatchError,
    DominationViolationError,
    HypothesisViolationError,
    SpecValidationError,
)
from .intervals import Interval
from .sequences import (
    ConstTail,
    OpaqueTail,
    ProductVerdict,
    SandwichTail,
    TermSeq,
    ZeroTail,
    product_verdict,
    scale_tail,
)

_PROB_TOL = 1e-12


def _validate_prob_vector(vec: tuple[float, ...]) -> tuple[float, ...]:
    v = tuple(float(x) for x in vec)
    if len(v) < 2:
        raise SpecValidationError("coordinate alphabets need at least 2 letters")
    if any(x < 0.0 for x in v):
        raise SpecValidationError("probability vector entries must be nonnegative")
    if abs(sum(v) - 1.0) > _PROB_TOL:
        raise SpecValidationError(f"probability vector sums to {sum(v)}, not 1")
    return v


# ---------------------------------------------------------------------------
# Coordinate law sequences
# ---------------------------------------------------------------------------


class _LawSeqBase:
    alphabet_size: int

    def law(self, k: int) -> tuple[float, ...]:
        raise NotImplementedError


@dataclass(frozen=True)
class BinaryLaws(_LawSeqBase):
    """Binary coordinates (p0_k, p1_k) driven by a digit law."""

    digits: DigitLaw

    @property
    def alphabet_size(self) -> int:
        return 2

    def law(self, k: int) -> tuple[float, float]:
        p0 = self.digits.p0(k)
        return (p0, 1.0 - p0)


@dataclass(frozen=True)
class ConstantLaws(_LawSeqBase):
    """One probability vector repeated on every coordinate."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", _validate_prob_vector(self.probs))

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    def law(self, k: int) -> tuple[float, ...]:
        return self.probs


@dataclass(frozen=True)
class ExplicitLaws(_LawSeqBase):
    """Explicit vectors for k <= m, one constant vector afterwards."""

    prefix: tuple[tuple[float, ...], ...]
    tail: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(_validate_prob_vector(v) for v in self.prefix))
        object.__setattr__(self, "tail", _validate_prob_vector(self.tail))
        sizes = {len(v) for v in self.prefix} | {len(self.tail)}
        if len(sizes) != 1:
            raise SpecValidationError("all coordinate vectors must share one alphabet")

    @property
    def alphabet_size(self) -> int:
        return len(self.tail)

    def law(self, k: int) -> tuple[float, ...]:
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.tail


CoordinateLawSeq = Union[BinaryLaws, ConstantLaws, ExplicitLaws]


def _structural_horizon(seq: CoordinateLawSeq) -> Optional[int]:
    """Index after which the sequence follows its analytic tail pattern;
    None when the clamp region outruns the analysis budget."""
    if isinstance(seq, ConstantLaws):
        return 0
    if isinstance(seq, ExplicitLaws):
        return len(seq.prefix)
    overrides, form = seq.digits.normal_form()
    if form.kind == "const" or form.c == 0.0:
        return len(overrides)
    # past every possible clamp of the perturbation formula
    from .convspec import _unclamped_from

    return _unclamped_from(form, len(overrides) + 1)


def _eventual_zero_pattern(seq: CoordinateLawSeq) -> tuple[bool, ...]:
    """Which components are exactly zero for every large k."""
    if isinstance(seq, ConstantLaws):
        return tuple(x == 0.0 for x in seq.probs)
    if isinstance(seq, ExplicitLaws):
        return tuple(x == 0.0 for x in seq.tail)
    _, form = seq.digits.normal_form()
    if form.kind == "const" or form.c == 0.0:
        return (form.center == 0.0, form.center == 1.0)
    return (False, False)  # strict approach never pins a component at zero


# ---------------------------------------------------------------------------
# Hellinger affinity
# ---------------------------------------------------------------------------


def hellinger_factor(mu_k, nu_k) -> float:
    """sum_w sqrt(mu_k(w) * nu_k(w)); 1 iff equal, 0 iff disjoint supports."""
    mu = tuple(float(x) for x in mu_k)
    nu = tuple(float(x) for x in nu_k)
    if len(mu) != len(nu):
        raise DimensionMismatchError(f"vector lengths differ: {len(mu)} vs {len(nu)}")
    _validate_prob_vector(mu)
    _validate_prob_vector(nu)
    return float(sum(math.sqrt(a * b) for a, b in zip(mu, nu)))


def _hellinger_deficit_interval(mu_k, nu_k) -> Interval:
    rho = hellinger_factor(mu_k, nu_k)
    d = max(0.0, 1.0 - rho)
    pad = 1e-14 * (1.0 + d)
    return Interval(max(0.0, d - pad), min(1.0, d + pad))


def hellinger_deficit_terms(mu: CoordinateLawSeq, nu: CoordinateLawSeq) -> TermSeq:
    """Certified term sequence for 1 - rho(mu_k, nu_k).

    Fully analyzed cases: identical sequences; eventually-constant pairs; a
    binary varying law against an eventually-constant binary law with
    matching limit (squared-deviation sandwich).  Anything else degrades to
    an opaque tail, which the engine reports as Unknown rather than guessing.
    """
    if mu.alphabet_size != nu.alphabet_size:
        raise DimensionMismatchError("coordinate alphabets differ")
    if mu == nu:
        return TermSeq((), ZeroTail(1))

    h_mu, h_nu = _structural_horizon(mu), _structural_horizon(nu)
    if h_mu is None or h_nu is None:
        return TermSeq((), OpaqueTail(1, lambda k: max(
            0.0, 1.0 - hellinger_factor(mu.law(k), nu.law(k)))))
    horizon = max(h_mu, h_nu)

    def prefix_upto(k_start: int) -> tuple[Interval, ...]:
        return tuple(
            _hellinger_deficit_interval(mu.law(k), nu.law(k)) for k in range(1, k_start)
        )

    mu_const = _eventually_constant_vector(mu)
    nu_const = _eventually_constant_vector(nu)

    if mu_const is not None and nu_const is not None:
        start = horizon + 1
        if mu_const == nu_const:
            return TermSeq(prefix_upto(start), ZeroTail(start))
        rho = hellinger_factor(mu_const, nu_const)
        if rho >= 1.0:
            return TermSeq(prefix_upto(start), ZeroTail(start))
        d = 1.0 - rho
        value = Interval(max(0.0, d - 1e-14), d + 1e-14)
        return TermSeq(prefix_upto(start), ConstTail(start, value))

    # binary varying-vs-constant: reduce to the squared deviation
    pair = _binary_varying_against_constant(mu, nu)
    if pair is not None:
        varying_digits, q0 = pair
        if q0 in (0.0, 1.0):
            # domination pins the varying side too; only the trivial factor 1
            start = horizon + 1
            return TermSeq(prefix_upto(start), ZeroTail(start))
        dev = deviation_terms(varying_digits, q0, power=2)
        qF = Fraction(q0)
        upper_scale = Interval.exact((1 / qF + 1 / (1 - qF)) / 2)
        lower_scale = Interval.exact(Fraction(1, 4))
        start = max(len(dev.prefix) + 1, horizon + 1)
        # re-anchor the analytic tail if the structural horizon is later
        tail = dev.tail
        if start > tail.start:
            tail = _shift_tail_start(tail, start)
        form = SandwichTail(
            start,
            scale_tail(tail, lower_scale),
            scale_tail(tail, upper_scale),
        )
        return TermSeq(prefix_upto(start), form)

    def opaque(k: int) -> float:
        return max(0.0, 1.0 - hellinger_factor(mu.law(k), nu.law(k)))

    return TermSeq(prefix_upto(horizon + 1), OpaqueTail(horizon + 1, opaque))


def _shift_tail_start(tail, new_start: int):
    from .sequences import GeomTail, PowerTail

    if isinstance(tail, ZeroTail):
        return ZeroTail(new_start)
    if isinstance(tail, ConstTail):
        return ConstTail(new_start, tail.value)
    if isinstance(tail, PowerTail):
        return PowerTail(new_start, tail.coef, tail.exponent)
    if isinstance(tail, GeomTail):
        shifted = tail.first * tail.ratio.pow_int(new_start - tail.start)
        return GeomTail(new_start, shifted, tail.ratio)
    if isinstance(tail, SandwichTail):
        return SandwichTail(
            new_start,
            _shift_tail_start(tail.lower, new_start),
            _shift_tail_start(tail.upper, new_start),
        )
    return OpaqueTail(new_start, tail.term_fn)


def _eventually_constant_vector(seq: CoordinateLawSeq) -> Optional[tuple[float, ...]]:
    if isinstance(seq, ConstantLaws):
        return seq.probs
    if isinstance(seq, ExplicitLaws):
        return seq.tail
    _, form = seq.digits.normal_form()
    if form.kind == "const" or form.c == 0.0:
        return (form.center, 1.0 - form.center)
    return None


def _binary_varying_against_constant(
    mu: CoordinateLawSeq, nu: CoordinateLawSeq
) -> Optional[tuple[DigitLaw, float]]:
    """(varying digit law, constant p0 of the other side) when the varying
    law's limit matches the constant value; None otherwise."""
    if mu.alphabet_size != 2:
        return None

    def as_digits(seq) -> Optional[DigitLaw]:
        if isinstance(seq, BinaryLaws):
            return seq.digits
        const = _eventually_constant_vector(seq)
        if const is not None and isinstance(seq, ConstantLaws):
            return ConstantDigits(const[0])
        return None

    mu_d, nu_d = as_digits(mu), as_digits(nu)
    if mu_d is None or nu_d is None:
        return None
    mu_const = _eventually_constant_vector(mu)
    nu_const = _eventually_constant_vector(nu)
    if mu_const is not None and nu_const is None:
        varying, q0 = nu_d, mu_const[0]
    elif nu_const is not None and mu_const is None:
        varying, q0 = mu_d, nu_const[0]
    else:
        return None
    if Fraction(varying.limit_p0()) != Fraction(q0):
        # limits differ: deficits settle above a positive constant
        return None
    return varying, q0


def _deviation_upper_fn(seq: CoordinateLawSeq):
    """k -> upper bound for the distance of law(k) to its limit vector, valid
    from the structural horizon on (clamping only shrinks the deviation)."""
    if isinstance(seq, (ConstantLaws, ExplicitLaws)):
        return lambda k: 0.0
    _, form = seq.digits.normal_form()
    if form.kind == "const" or form.c == 0.0:
        return lambda k: 0.0
    return form.deviation_upper


def _dev_settle_index(seq: CoordinateLawSeq, start: int, threshold: float) -> Optional[int]:
    """Smallest k >= start with deviation_upper(j) <= threshold for all j >= k,
    solved in closed form per decay shape (deviations are nonincreasing)."""
    dev = _deviation_upper_fn(seq)
    if dev(start) <= threshold:
        return start
    if isinstance(seq, BinaryLaws):
        _, form = seq.digits.normal_form()
        if form.kind == "power":
            guess = (abs(form.c) / threshold) ** (1.0 / form.s)
        else:
            guess = math.log(threshold / abs(form.c)) / math.log(form.ratio)
        k = max(start, int(guess))
        while dev(k) > threshold:
            k += 1
            if k > max(start, int(guess)) + 64:  # pragma: no cover
                return None
        return k
    return None


def _limit_mismatch_const_floor(
    mu: CoordinateLawSeq, nu: CoordinateLawSeq
) -> Optional[TermSeq]:
    """Constant-floor divergence certificate for distinct limit vectors.

    The Hellinger distance H = sqrt(1 - rho) is a metric and per coordinate
    H(law_k, limit)**2 <= |p0_k - limit| (componentwise (sqrt(a)-sqrt(b))**2
    <= |a-b|).  Once sqrt(dev_mu) + sqrt(dev_nu) drops below half the limit
    distance, the triangle inequality pins every later deficit above a
    quarter of the limiting deficit.
    """
    if mu.alphabet_size != 2 or not isinstance(mu, (BinaryLaws, ConstantLaws, ExplicitLaws)):
        return None

    def limit_vec(seq) -> Optional[tuple[float, float]]:
        const = _eventually_constant_vector(seq)
        if const is not None:
            return (const[0], const[1]) if len(const) == 2 else None
        if isinstance(seq, BinaryLaws):
            c = seq.digits.limit_p0()
            return (c, 1.0 - c)
        return None

    lm, ln = limit_vec(mu), limit_vec(nu)
    if lm is None or ln is None or lm == ln:
        return None
    rho_limit = hellinger_factor(lm, ln)
    if rho_limit >= 1.0 - 1e-13:
        return None
    gap = (1.0 - rho_limit) * (1.0 - 1e-12)
    target = 0.5 * math.sqrt(gap)
    h_mu, h_nu = _structural_horizon(mu), _structural_horizon(nu)
    if h_mu is None or h_nu is None:
        return None
    start = max(h_mu, h_nu) + 1
    # each side settles below (target/2)^2, so sqrt(dev_mu)+sqrt(dev_nu) <= target
    k_mu = _dev_settle_index(mu, start, (0.5 * target) ** 2)
    k_nu = _dev_settle_index(nu, start, (0.5 * target) ** 2)
    if k_mu is None or k_nu is None:
        return None
    k = max(k_mu, k_nu)
    if k > 4096:  # keeping million-term explicit prefixes is not worth it
        return None
    prefix = tuple(
        _hellinger_deficit_interval(mu.law(j), nu.law(j)) for j in range(1, k)
    )
    floor = ConstTail(k, Interval.point(gap / 4.0))
    actual = OpaqueTail(k, lambda j: max(0.0, 1.0 - hellinger_factor(mu.law(j), nu.law(j))))
    return TermSeq(prefix, SandwichTail(k, floor, actual))


# ---------------------------------------------------------------------------
# Dichotomy and discreteness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DichotomyVerdict:
    """Outcome of the dominated-product dichotomy with its evidence."""

    outcome: str  # "absolutely-continuous" | "singular" | "indeterminate"
    hellinger_partials: tuple[float, ...]
    criterion: ProductVerdict


def certify_domination(mu: CoordinateLawSeq, nu: CoordinateLawSeq) -> None:
    """Raise DominationViolationError unless nu_k << mu_k for all k."""
    if mu.alphabet_size != nu.alphabet_size:
        raise DimensionMismatchError("coordinate alphabets differ")
    h_mu, h_nu = _structural_horizon(mu), _structural_horizon(nu)
    if h_mu is None or h_nu is None:
        raise HypothesisViolationError(
            "coordinatewise domination not certifiable: a clamp region "
            "outruns the analysis budget"
        )
    horizon = max(h_mu, h_nu) + 8
    for k in range(1, horizon + 1):
        mu_k, nu_k = mu.law(k), nu.law(k)
        for w, (m, n) in enumerate(zip(mu_k, nu_k)):
            if m == 0.0 and n > 0.0:
                raise DominationViolationError(
                    f"nu gives mass {n} to letter {w} at coordinate {k} where mu vanishes"
                )
    mu_zero = _eventual_zero_pattern(mu)
    nu_zero = _eventual_zero_pattern(nu)
    for w, (mz, nz) in enumerate(zip(mu_zero, nu_zero)):
        if mz and not nz:
            raise DominationViolationError(
                f"mu eventually vanishes on letter {w} but nu does not"
            )


def kakutani_dichotomy(
    mu: CoordinateLawSeq, nu: CoordinateLawSeq, evidence_terms: int = 16
) -> DichotomyVerdict:
    """Certified dichotomy: nu << mu iff prod rho(mu_k, nu_k) > 0.

    Requires coordinatewise domination; the verdict is indeterminate exactly
    when the deficit engine cannot certify either side.
    """
    certify_domination(mu, nu)
    deficits = hellinger_deficit_terms(mu, nu)
    pv = product_verdict(deficits)
    if pv.kind == "unknown":
        alt = _limit_mismatch_const_floor(mu, nu)
        if alt is not None:
            pv = product_verdict(alt)
    partials = []
    acc = 1.0
    for k in range(1, evidence_terms + 1):
        acc *= hellinger_factor(mu.law(k), nu.law(k))
        partials.append(acc)
    outcome = {
        "positive-limit": "absolutely-continuous",
        "zero-limit": "singular",
        "unknown": "indeterminate",
    }[pv.kind]
    return DichotomyVerdict(outcome, tuple(partials), pv)


@dataclass(frozen=True)
class AtomDescriptor:
    """Coordinatewise maximizing letter sequence (lowest index on ties)."""

    leading: tuple[int, ...]
    eventual: Optional[int]


@dataclass(frozen=True)
class DiscretenessVerdict:
    outcome: str  # "discrete" | "not-discrete" | "indeterminate"
    atom: Optional[AtomDescriptor]
    mass_lower_bound: Optional[float]
    criterion: ProductVerdict


def _max_deficit_terms(mu: CoordinateLawSeq) -> TermSeq:
    if isinstance(mu, BinaryLaws):
        return min_component_terms(mu.digits)
    if isinstance(mu, ConstantLaws):
        d = 1.0 - max(mu.probs)
        tail = (
            ZeroTail(1)
            if d == 0.0
            else ConstTail(1, Interval(max(0.0, d - 1e-15), d + 1e-15))
        )
        return TermSeq((), tail)
    # explicit prefix + constant tail
    prefix = tuple(
        Interval.point(1.0 - max(v)).widen(1e-15) for v in mu.prefix
    )
    start = len(mu.prefix) + 1
    d = 1.0 - max(mu.tail)
    tail = ZeroTail(start) if d == 0.0 else ConstTail(start, Interval(max(0.0, d - 1e-15), d + 1e-15))
    return TermSeq(prefix, tail)


def _maximizer(vec: tuple[float, ...]) -> int:
    best, arg = -1.0, 0
    for i, v in enumerate(vec):
        if v > best:
            best, arg = v, i
    return arg


def discreteness_test(
    mu: CoordinateLawSeq, leading_digits: int = 48
) -> DiscretenessVerdict:
    """Pure-discreteness criterion: prod_k max_w mu_k(w) > 0.

    A discrete verdict reports the maximizing letter sequence (the guaranteed
    atom) and the product lower bound for its mass.
    """
    deficits = _max_deficit_terms(mu)
    pv = product_verdict(deficits)
    if pv.kind == "positive-limit":
        leading = tuple(_maximizer(mu.law(k)) for k in range(1, leading_digits + 1))
        eventual: Optional[int]
        const = _eventually_constant_vector(mu)
        if const is not None:
            eventual = _maximizer(const)
        else:
            limit = mu.digits.limit_p0() if isinstance(mu, BinaryLaws) else None
            eventual = None if limit is None else (0 if limit >= 0.5 else 1)
        return DiscretenessVerdict(
            "discrete", AtomDescriptor(leading, eventual), pv.lower_bound, pv
        )
    if pv.kind == "zero-limit":
        return DiscretenessVerdict("not-discrete", None, None, pv)
    return DiscretenessVerdict("indeterminate", None, None, pv)
