import math

import pytest

from bernconv.classifier import (
    CITED_NOT_VERIFIED,
    classify,
    counterexample_demo,
    report_ae_scale,
    scale_threshold,
)
from bernconv.convspec import ConstantDigits, ConvolutionSpec, PerturbedDigits
from bernconv.errors import HypothesisViolationError, RangeError
from bernconv.product_measure import BinaryLaws, discreteness_test, kakutani_dichotomy
from bernconv.support import support_measure


def _cert_kinds(verdict):
    return {c.name: c.verdict.kind for c in verdict.certificates}


def test_classify_cantor(cantor):
    v = classify(cantor)
    assert v.outcome == "singular-continuous"
    kinds = _cert_kinds(v)
    assert kinds["max-digit-probability-product"] == "zero-limit"
    assert kinds["gap-excess-series"] == "diverges"
    assert all(c.certified for c in v.certificates)


def test_classify_two_term_absolutely_continuous(two_term):
    v = classify(two_term)
    assert v.outcome == "absolutely-continuous"
    assert all(c.certified for c in v.certificates)


def test_classify_discrete(discrete):
    v = classify(discrete)
    assert v.outcome == "discrete"
    assert _cert_kinds(v)["max-digit-probability-product"] == "positive-limit"


def test_classify_biased_singular(biased):
    assert classify(biased).outcome == "singular-continuous"


def test_classify_perturbed_absolutely_sc(perturbed):
    # digits drift to fair fast, but the middle-thirds gaps keep it singular
    v = classify(perturbed)
    assert v.outcome == "singular-continuous"
    assert _cert_kinds(v)["digit-deviation-series"] == "converges"


def test_classify_boundary_is_indeterminate(uniform):
    v = classify(uniform)
    assert v.outcome == "indeterminate"
    assert v.hypothesis_report.boundary_case
    with pytest.raises(HypothesisViolationError):
        classify(uniform, strict_hypothesis=True)


def test_classify_total_on_catalog(cantor, uniform, two_term, discrete, perturbed, biased):
    for spec in (cantor, uniform, two_term, discrete, perturbed, biased):
        v = classify(spec)
        assert v.outcome in (
            "discrete", "absolutely-continuous", "singular-continuous", "indeterminate"
        )
        if v.outcome == "indeterminate":
            assert (
                v.hypothesis_report.gap_ratios_exceed_one is not True
                or any(not c.certified for c in v.certificates)
            )


def test_classify_consistency_with_measure_and_discreteness(two_term, discrete, cantor):
    assert classify(two_term).outcome == "absolutely-continuous"
    assert support_measure(two_term).kind == "positive"
    assert classify(cantor).outcome == "singular-continuous"
    assert support_measure(cantor).kind == "zero"
    assert classify(discrete).outcome == "discrete"
    dt = discreteness_test(BinaryLaws(discrete.digits))
    assert dt.outcome == "discrete"
    assert set(dt.atom.leading) == {0}


def test_classify_consistency_with_dichotomy(perturbed):
    """When the digit-deviation series binds, the dichotomy agrees."""
    v = classify(ConvolutionSpec(perturbed.scales, perturbed.digits))
    assert _cert_kinds(v)["digit-deviation-series"] == "converges"
    fair = BinaryLaws(ConstantDigits(0.5))
    assert kakutani_dichotomy(fair, BinaryLaws(perturbed.digits)).outcome == (
        "absolutely-continuous"
    )


def test_fair_digits_never_discrete(cantor, two_term):
    """Replacing digits by the fair law cannot produce a discrete verdict."""
    for spec in (cantor, two_term):
        fair = ConvolutionSpec(spec.scales, ConstantDigits(0.5))
        assert classify(fair).outcome != "discrete"


# --- almost-every-scale reports ------------------------------------------------

def test_ae_report_fair_digits():
    r = report_ae_scale(ConstantDigits(0.5))
    assert r.condition_verdict.kind == "converges"
    assert r.condition_verdict.sum_bound.hi <= 1e-300
    assert r.threshold is None
    assert r.marker == CITED_NOT_VERIFIED


def test_ae_report_threshold_value():
    r = report_ae_scale(ConstantDigits(0.6), p=0.4)
    assert r.threshold == pytest.approx(0.4 ** 0.4 * 0.6 ** 0.6, abs=1e-15)
    assert r.threshold == pytest.approx(0.5101698002503163, abs=1e-12)
    assert r.condition_verdict.kind == "converges"


def test_ae_report_slow_perturbation_inapplicable():
    r = report_ae_scale(PerturbedDigits(0.5, 1.0, 0.4))
    assert r.condition_verdict.kind == "diverges"
    assert "does not apply" in r.conclusion


def test_ae_report_range_guard():
    with pytest.raises(RangeError):
        report_ae_scale(ConstantDigits(0.5), p=0.2)


def test_threshold_range_over_window():
    for p in (1 / 3, 0.4, 0.5, 0.6, 2 / 3):
        th = scale_threshold(p)
        assert 0.5 <= th <= 1.0
    assert scale_threshold(0.5) == pytest.approx(0.5)


# --- counterexample demo ---------------------------------------------------------

def test_demo_certifies_singular_side():
    d = counterexample_demo(0.4, 0.8, level=20)
    assert d.product.kind == "zero-limit"
    assert d.dichotomy.outcome == "singular"
    assert d.hellinger_factor_value == pytest.approx(
        math.sqrt(0.5 * 0.4) + math.sqrt(0.5 * 0.6), abs=1e-15
    )


def test_demo_histograms_cover_grid():
    d = counterexample_demo(0.4, 0.8, level=20, cell_width=0.25)
    assert len(d.biased_cells) == 16
    assert all(c > 0.0 for c in d.biased_cells)
    assert all(c > 0.0 for c in d.fair_cells)
    assert 0.0 < d.overlap_mass <= 1.0
    assert CITED_NOT_VERIFIED in d.note


def test_demo_range_guards():
    with pytest.raises(RangeError):
        counterexample_demo(0.5, 0.8)
    with pytest.raises(RangeError):
        counterexample_demo(0.4, 0.4)
    with pytest.raises(RangeError):
        counterexample_demo(0.2, 0.8)
