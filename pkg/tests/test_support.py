import math
from fractions import Fraction

import pytest

from bernconv.convspec import (
    ConstantDigits,
    ConvolutionSpec,
    ExplicitScales,
    Geometric,
    MixedGeometricTail,
    PowerLawTail,
)
from bernconv.errors import HypothesisViolationError, LevelTooLargeError
from bernconv.presets import discrete_spec, two_term_spec
from bernconv.support import (
    cylinders,
    dimension_estimate,
    nowhere_dense_verdict,
    support_measure,
    unique_representation,
)

LN2, LN3 = math.log(2.0), math.log(3.0)


# --- cylinders ---------------------------------------------------------------

def test_cantor_level_one(cantor):
    approx = cylinders(cantor, 1)
    assert approx.exact_intervals == (
        (Fraction(0), Fraction(1, 3)),
        (Fraction(2, 3), Fraction(1)),
    )
    assert approx.gap_count == 1


def test_uniform_merges_to_single_interval(uniform):
    approx = cylinders(uniform, 3)
    assert approx.count == 1
    assert approx.exact_intervals == ((Fraction(0), Fraction(1)),)


def test_level_zero_is_full_range(cantor):
    approx = cylinders(cantor, 0)
    assert approx.count == 1
    assert approx.exact_intervals == ((Fraction(0), Fraction(1)),)


def test_level_cap():
    with pytest.raises(LevelTooLargeError):
        cylinders(two_term_spec(), 23)


def test_gap_regime_counts_and_lengths(cantor):
    for n in (1, 4, 8):
        approx = cylinders(cantor, n)
        assert approx.count == 2 ** n
        assert approx.exact_total_length == Fraction(2, 3) ** n
        # every cylinder has exactly the tail-sum length
        r_n = cantor.scales.tail_fraction(n)
        assert all(hi - lo == r_n for lo, hi in approx.exact_intervals)


def test_nesting(cantor, two_term):
    for spec in (cantor, two_term):
        for n in (0, 2, 5, 9):
            outer = cylinders(spec, n).exact_intervals
            inner = cylinders(spec, n + 1).exact_intervals
            i = 0
            for lo, hi in inner:
                while i < len(outer) and outer[i][1] < hi:
                    i += 1
                assert i < len(outer)
                assert outer[i][0] <= lo and hi <= outer[i][1]


def test_degenerate_digit_branch_pruned(cantor):
    spec = ConvolutionSpec(cantor.scales, ConstantDigits(1.0))
    approx = cylinders(spec, 6)
    assert approx.count == 1
    assert approx.exact_intervals[0][0] == 0


def test_float_path_power_law_tail():
    spec = ConvolutionSpec(
        ExplicitScales((), PowerLawTail(1.5, 1.0, start_index=1)), ConstantDigits(0.5)
    )
    approx = cylinders(spec, 8)
    assert approx.exact_intervals is None
    assert approx.count >= 1
    assert approx.total_length.hi <= spec.scales.tail_interval(0).hi * 1.001


# --- nowhere density ---------------------------------------------------------

def test_nowhere_dense_verdicts(cantor, uniform, two_term):
    assert nowhere_dense_verdict(cantor).kind == "nowhere-dense"
    assert nowhere_dense_verdict(uniform).kind == "contains-interval"
    assert nowhere_dense_verdict(two_term).kind == "nowhere-dense"


def test_nowhere_dense_requires_interior_digits(cantor):
    spec = ConvolutionSpec(cantor.scales, ConstantDigits(1.0))
    with pytest.raises(HypothesisViolationError):
        nowhere_dense_verdict(spec)


def test_nowhere_dense_rejects_increasing_scales():
    from bernconv.convspec import ExactGeometricTail

    scales = ExplicitScales((0.01,), ExactGeometricTail(0.5, 0.9, start_index=2))
    with pytest.raises(HypothesisViolationError):
        nowhere_dense_verdict(ConvolutionSpec(scales, ConstantDigits(0.5)))


def test_gap_structure_in_nowhere_dense_regime(cantor, two_term):
    """Certified nowhere-dense specs show a gap inside every long stretch."""
    for spec in (cantor, two_term):
        n = 10
        approx = cylinders(spec, n)
        assert nowhere_dense_verdict(spec).kind == "nowhere-dense"
        r_n = spec.scales.tail_interval(n).hi
        assert approx.max_component_length() <= 2.0 * r_n


# --- measure ------------------------------------------------------------------

def test_measure_cantor_is_zero(cantor):
    v = support_measure(cantor)
    assert v.kind == "zero"
    assert v.certificate.kind == "diverges"


def test_measure_two_term_value(two_term):
    v = support_measure(two_term)
    assert v.kind == "positive"
    assert v.value.contains(0.5)
    assert v.value.width <= 1e-9


def test_measure_cross_checked_by_cylinders(two_term):
    v = support_measure(two_term)
    level = 20
    approx = cylinders(two_term, level)
    # the cylinder union over-approximates the support from outside
    assert v.value.lo <= float(approx.exact_total_length) + 1e-12
    assert float(approx.exact_total_length) - v.value.hi <= 2.0 ** -(level - 1)


def test_measure_positive_explicit_mixed():
    scales = ExplicitScales(
        (0.8, 0.4),
        MixedGeometricTail(scale=0.15, ratio=0.5, scale2=0.05, ratio2=0.25, start_index=3),
    )
    spec = ConvolutionSpec(scales, ConstantDigits(0.5))
    v = support_measure(spec)
    assert v.kind == "positive"
    assert v.certificate.kind == "converges"
    # value = lim 2^k t_k, cross-checked by the level-16 cylinder length
    approx = cylinders(spec, 16)
    assert v.value.lo <= float(approx.exact_total_length)


def test_measure_requires_all_gaps(uniform):
    with pytest.raises(HypothesisViolationError):
        support_measure(uniform)


def test_measure_matches_truncation_infimum(cantor, two_term):
    for spec in (cantor, two_term):
        lengths = [float(cylinders(spec, n).exact_total_length) for n in range(1, 12)]
        assert all(a >= b - 1e-15 for a, b in zip(lengths, lengths[1:]))
        v = support_measure(spec)
        floor = 0.0 if v.kind == "zero" else v.value.lo
        assert min(lengths) >= floor - 1e-12


# --- dimension ----------------------------------------------------------------

def test_dimension_cantor_both_variants(cantor):
    log_corrected = dimension_estimate(cantor, "log-corrected", 10_000)
    assert log_corrected.liminf_value == pytest.approx(LN2 / LN3, abs=1e-12)
    assert log_corrected.limsup_value == pytest.approx(LN2 / LN3, abs=1e-12)
    printed = dimension_estimate(cantor, "as-printed", 10_000)
    assert printed.liminf_value == pytest.approx(LN2 / 3.0, abs=1e-12)


def test_dimension_two_term_approaches_one(two_term):
    est = dimension_estimate(two_term, "log-corrected", 4_000)
    assert 0.99 <= est.liminf_value <= est.limsup_value <= 1.0 + 1e-9


def test_dimension_rapidly_growing_ratios():
    # scales like 2^[-1,-4,-9,...] then a sharply gapped geometric tail
    from bernconv.convspec import ExactGeometricTail

    prefix = tuple(2.0 ** -(k * k) for k in range(1, 13))
    tail = ExactGeometricTail(2.0 ** -25, 2.0 ** -169, start_index=13)
    spec = ConvolutionSpec(ExplicitScales(prefix, tail), ConstantDigits(0.5))
    est = dimension_estimate(spec, "log-corrected", 200)
    assert est.limsup_value <= 0.05


def test_dimension_requires_gaps(uniform):
    with pytest.raises(HypothesisViolationError):
        dimension_estimate(uniform, "log-corrected", 100)
    with pytest.raises(ValueError):
        dimension_estimate(uniform, "nonsense", 100)


# --- representation uniqueness -------------------------------------------------

def test_unique_representation(cantor, uniform):
    assert unique_representation(cantor).kind == "unique"
    assert unique_representation(uniform).kind == "indeterminate"
    overlap = ConvolutionSpec(Geometric(0.8), ConstantDigits(0.5))
    assert unique_representation(overlap).kind == "not-unique"
    assert unique_representation(discrete_spec()).kind == "unique"
