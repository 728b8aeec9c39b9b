import math
import random
from fractions import Fraction

import pytest

from bernconv.convspec import CantorLike, ConstantDigits, ConvolutionSpec
from bernconv.errors import LevelTooLargeError, ResolutionError
from bernconv.oracle import box_count, compare_cdf, truncated_hellinger
from bernconv.product_measure import BinaryLaws, ConstantLaws, hellinger_factor

LN2, LN3 = math.log(2.0), math.log(3.0)


# --- box counting -------------------------------------------------------------

def test_box_count_cantor_aligned(cantor):
    res = box_count(cantor, 12, Fraction(1, 3 ** 8))
    assert res.occupied == 2 ** 8
    assert res.dim_estimate == pytest.approx(LN2 / LN3, abs=1e-12)


def test_box_count_uniform(uniform):
    res = box_count(uniform, 10, Fraction(1, 8))
    assert res.occupied == 8
    assert res.dim_estimate == pytest.approx(1.0)
    res2 = box_count(uniform, 10, Fraction(1, 7))
    assert res2.occupied == 7


def test_box_count_level_zero(cantor):
    res = box_count(cantor, 0, Fraction(1, 7))
    assert res.occupied == 7  # ceil(range / box size)


def test_box_count_resolution_guard(cantor):
    with pytest.raises(ResolutionError):
        box_count(cantor, 8, Fraction(1, 3 ** 9))


def test_box_count_self_similar_family():
    """Aligned counts reproduce ln 2 / ln base on cantor-like specs."""
    for base in (3, 4, 5):
        spec = ConvolutionSpec(CantorLike(float(base - 1), base), ConstantDigits(0.5))
        res = box_count(spec, 12, Fraction(1, base ** 8))
        assert res.occupied == 2 ** 8
        assert res.dim_estimate == pytest.approx(LN2 / math.log(base), abs=1e-12)


# --- truncated hellinger ---------------------------------------------------------

def test_truncated_hellinger_reference():
    fair = BinaryLaws(ConstantDigits(0.5))
    biased = BinaryLaws(ConstantDigits(0.6))
    value = truncated_hellinger(fair, biased, 2)
    assert value == pytest.approx((math.sqrt(0.3) + math.sqrt(0.2)) ** 2, abs=1e-14)
    assert truncated_hellinger(fair, biased, 0) == 1.0
    assert truncated_hellinger(fair, fair, 6) == pytest.approx(1.0, abs=1e-13)


def test_truncated_hellinger_matches_factor_products():
    rng = random.Random(424242)
    fair = BinaryLaws(ConstantDigits(0.5))
    for _ in range(25):
        p0 = rng.uniform(0.05, 0.95)
        nu = BinaryLaws(ConstantDigits(p0))
        n = rng.randrange(0, 13)
        enumerated = truncated_hellinger(fair, nu, n)
        product = 1.0
        for k in range(1, n + 1):
            product *= hellinger_factor(fair.law(k), nu.law(k))
        assert abs(enumerated - product) <= 1e-10


def test_truncated_hellinger_general_alphabet():
    mu = ConstantLaws((0.2, 0.3, 0.5))
    nu = ConstantLaws((0.25, 0.25, 0.5))
    rho = hellinger_factor(mu.probs, nu.probs)
    assert truncated_hellinger(mu, nu, 5) == pytest.approx(rho ** 5, abs=1e-12)


def test_truncated_hellinger_ceiling():
    mu = ConstantLaws((0.5, 0.5))
    with pytest.raises(LevelTooLargeError):
        truncated_hellinger(mu, mu, 21)


# --- cdf sandwich -----------------------------------------------------------------

def test_compare_cdf_benchmarks(cantor, uniform, perturbed):
    for spec in (cantor, uniform, perturbed):
        res = compare_cdf(spec, 16, grid=200, horizon=40)
        assert res.max_violation <= 1e-10


def test_compare_cdf_deep_level(cantor, uniform):
    for spec in (cantor, uniform):
        res = compare_cdf(spec, 18, grid=200, horizon=40)
        assert res.max_violation <= 1e-10


def test_compare_cdf_degenerate_digits(cantor):
    spec = ConvolutionSpec(cantor.scales, ConstantDigits(1.0))
    res = compare_cdf(spec, 10, grid=50, horizon=30)
    assert res.max_violation <= 1e-10


def test_compare_cdf_discrete(discrete):
    res = compare_cdf(discrete, 14, grid=120, horizon=40)
    assert res.max_violation <= 1e-10
