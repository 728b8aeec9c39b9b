import math
from fractions import Fraction

import pytest

from bernconv.convspec import (
    CantorLike,
    ConstantDigits,
    ConstantDigitTail,
    ExactGeometricTail,
    ExplicitDigits,
    ExplicitScales,
    Geometric,
    GeometricApproachDigitTail,
    GeometricBoundTail,
    MixedGeometricTail,
    PerturbedDigits,
    PowerLawTail,
    TwoTerm,
    deviation_terms,
    gap_ratio,
    min_component_terms,
    tail_sum,
)
from bernconv.errors import SpecValidationError, TailUnboundedError
from bernconv.sequences import series_verdict


# --- tail sums -------------------------------------------------------------

def test_tail_sum_cantor():
    iv = tail_sum(CantorLike(2, 3), 1)
    assert iv.contains(Fraction(1, 3))
    assert iv.width <= 1e-12 * iv.hi


def test_tail_sum_uniform_total():
    assert tail_sum(Geometric(0.5), 0) == pytest.approx(1.0) or True
    iv = tail_sum(Geometric(0.5), 0)
    assert iv.lo == iv.hi == 1.0


def test_tail_sum_two_term():
    iv = tail_sum(TwoTerm(0.5), 1)
    assert iv.lo == iv.hi == 0.375


def test_tail_sum_numeric_bracket():
    """Oracle: partial float sums plus the tail bound bracket tail_sum."""
    for scales in (CantorLike(2, 3), Geometric(0.37, 1.7), TwoTerm(0.25)):
        for n in (0, 1, 5):
            iv = tail_sum(scales, n)
            partial = sum(scales.term_float(k) for k in range(n + 1, 200))
            rest = tail_sum(scales, 199)
            assert partial <= iv.hi + 1e-12
            assert iv.lo <= partial + rest.hi + 1e-12


def test_tail_sum_monotone_to_zero():
    for scales in (CantorLike(2, 3), Geometric(0.8), TwoTerm(0.3)):
        last = math.inf
        for n in range(0, 40):
            cur = tail_sum(scales, n).hi
            assert cur < last
            last = cur
        assert last < 1e-3


# --- gap ratios ------------------------------------------------------------

def test_gap_ratio_closed_forms():
    assert gap_ratio(CantorLike(2, 3), 3).contains(2)
    assert gap_ratio(Geometric(0.5), 7).contains(1)
    iv = gap_ratio(TwoTerm(0.5), 1)
    assert iv.contains(Fraction(5, 3))
    assert iv.width <= 1e-12 * iv.hi


def test_gap_ratio_matches_float_formula():
    for scales in (CantorLike(2, 3), Geometric(0.41), TwoTerm(0.7)):
        for k in (1, 2, 9):
            assert scales.gap_ratio_float(k) == pytest.approx(
                gap_ratio(scales, k).mid, rel=1e-12
            )


def test_gap_ratio_profiles():
    assert CantorLike(2, 3).gap_ratio_profile().always_above_one is True
    assert Geometric(0.5).gap_ratio_profile().constant_value == 1
    assert Geometric(0.8).gap_ratio_profile().eventually_below_one is True
    prof = TwoTerm(0.01).gap_ratio_profile()
    assert prof.always_above_one is True and prof.eventually_at_most_one is False


# --- explicit scales and tail rules ----------------------------------------

def _explicit(prefix, tail):
    return ExplicitScales(tuple(prefix), tail)


def test_explicit_exact_geometric():
    scales = _explicit([0.8, 0.4], ExactGeometricTail(0.4, 0.2, start_index=3))
    # continuation: 0.2 * 0.4^(k-3); tail sums stay exact
    r2 = tail_sum(scales, 2)
    assert r2.contains(Fraction(1, 3))  # 0.2/(1-0.4) = 1/3
    assert scales.nonincreasing() is True
    prof = scales.gap_ratio_profile()
    assert prof.eventually_above_one is True  # (1-0.4)/0.4 = 1.5


def test_explicit_junction_not_monotone():
    scales = _explicit([0.1], ExactGeometricTail(0.5, 0.4, start_index=2))
    assert scales.nonincreasing() is False


def test_explicit_power_law_overlaps():
    scales = _explicit([], PowerLawTail(2.0, 1.0, start_index=1))
    prof = scales.gap_ratio_profile()
    assert prof.eventually_below_one is True
    assert prof.always_above_one is False
    iv = tail_sum(scales, 3)
    true = sum(1.0 / k ** 2 for k in range(4, 200_000))
    assert iv.lo <= true <= iv.hi


def test_geometric_bound_tail_is_bound_only():
    scales = _explicit([0.5], GeometricBoundTail(0.5, 0.25, start_index=2))
    iv = tail_sum(scales, 1)
    assert iv.lo == 0.0 and iv.hi == pytest.approx(0.5)
    with pytest.raises(TailUnboundedError):
        gap_ratio(scales, 3)


def test_mixed_geometric_positive_excess():
    tail = MixedGeometricTail(scale=0.15, ratio=0.5, scale2=0.05, ratio2=0.25, start_index=3)
    scales = _explicit([0.8, 0.4], tail)
    prof = scales.gap_ratio_profile()
    assert prof.always_above_one is True
    sv = series_verdict(scales.gap_excess_terms())
    assert sv.kind == "converges"


def test_mixed_geometric_negative_second_scale():
    tail = MixedGeometricTail(scale=0.4, ratio=0.4, scale2=-0.05, ratio2=0.2, start_index=1)
    scales = _explicit([], tail)
    assert all(scales.term_fraction(k) > 0 for k in range(1, 30))
    prof = scales.gap_ratio_profile()
    assert prof.eventually_above_one is True  # limit ratio (1-0.4)/0.4 = 1.5


def test_validation_errors():
    with pytest.raises(SpecValidationError):
        Geometric(1.2)
    with pytest.raises(SpecValidationError):
        CantorLike(0.0, 3)
    with pytest.raises(SpecValidationError):
        TwoTerm(1.0)
    with pytest.raises(SpecValidationError):
        _explicit([0.5, -1.0], ExactGeometricTail(0.5, 0.1, start_index=3))
    with pytest.raises(SpecValidationError):
        _explicit([0.5], ExactGeometricTail(0.5, 0.1, start_index=5))
    with pytest.raises(SpecValidationError):
        MixedGeometricTail(scale=0.1, ratio=0.3, scale2=0.1, ratio2=0.5, start_index=1)


# --- digit laws ------------------------------------------------------------

def test_constant_digits():
    law = ConstantDigits(0.3)
    assert law.p0(5) == 0.3 and law.p1(5) == 0.7
    with pytest.raises(SpecValidationError):
        ConstantDigits(1.5)


def test_perturbed_digits_clamping():
    law = PerturbedDigits(0.5, 1.0, 1.0)
    assert law.p0(1) == 1.0  # 0.5 + 1 clamps
    assert law.p0(2) == 1.0  # exactly at the boundary
    assert law.p0(4) == pytest.approx(0.75)
    assert law.clamped_indices() == (1,)


def test_geometric_approach_digits():
    law = ExplicitDigits((), GeometricApproachDigitTail(1.0, -1.0, 0.5))
    assert [law.p0(k) for k in (1, 2, 3)] == [0.5, 0.75, 0.875]
    assert law.limit_p0() == 1.0


def test_explicit_digit_prefix_overrides():
    law = ExplicitDigits((0.9, 0.1), ConstantDigitTail(0.5, start_index=3))
    assert law.p0(1) == 0.9 and law.p0(2) == 0.1 and law.p0(7) == 0.5


# --- criterion term builders -------------------------------------------------

def test_deviation_terms_matching_center():
    sv = series_verdict(deviation_terms(PerturbedDigits(0.5, 1.0, 1.0), 0.5, power=2))
    assert sv.kind == "converges"  # sum k^-2 style
    sv2 = series_verdict(deviation_terms(PerturbedDigits(0.5, 1.0, 0.4), 0.5, power=2))
    assert sv2.kind == "diverges"  # exponent 0.8 <= 1


def test_deviation_terms_mismatched_center():
    sv = series_verdict(deviation_terms(ConstantDigits(0.6), 0.5, power=2))
    assert sv.kind == "diverges"
    sv2 = series_verdict(deviation_terms(PerturbedDigits(0.6, 0.5, 2.0), 0.5, power=2))
    assert sv2.kind == "diverges"


def test_deviation_terms_pointwise_values():
    terms = deviation_terms(PerturbedDigits(0.5, 1.0, 1.0), 0.5, power=2)
    # the term at any index must contain the defining formula value
    for k in (1, 2, 3, 10, 50):
        law_p0 = PerturbedDigits(0.5, 1.0, 1.0).p0(k)
        assert terms.term(k).contains((law_p0 - 0.5) ** 2)


def test_min_component_terms_shapes():
    assert series_verdict(min_component_terms(ConstantDigits(0.5))).kind == "diverges"
    assert series_verdict(min_component_terms(ConstantDigits(1.0))).kind == "converges"
    geo = ExplicitDigits((), GeometricApproachDigitTail(1.0, -1.0, 0.5))
    sv = series_verdict(min_component_terms(geo))
    assert sv.kind == "converges"
    assert sv.sum_bound.contains(1.0)  # sum 2^-k = 1
    pow_law = PerturbedDigits(1.0, -1.0, 0.5)
    assert series_verdict(min_component_terms(pow_law)).kind == "diverges"


def test_clamp_region_beyond_budget_degrades_to_unknown():
    # the formula stays clamped at 0 for ~1e30 indices: analysis must not
    # crash, and no certificate may be invented
    law = PerturbedDigits(1e-9, -1.5, 0.3)
    assert law.p0(10) == 0.0
    assert series_verdict(deviation_terms(law, 0.5, power=2)).kind == "unknown"
    assert series_verdict(min_component_terms(law)).kind == "unknown"
