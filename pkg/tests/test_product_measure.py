import math

import pytest
from hypothesis import given, strategies as st

from bernconv.convspec import (
    ConstantDigits,
    ExplicitDigits,
    GeometricApproachDigitTail,
    PerturbedDigits,
)
from bernconv.errors import DimensionMismatchError, DominationViolationError
from bernconv.product_measure import (
    BinaryLaws,
    ConstantLaws,
    ExplicitLaws,
    discreteness_test,
    hellinger_factor,
    kakutani_dichotomy,
)

FAIR = BinaryLaws(ConstantDigits(0.5))


def test_hellinger_factor_values():
    assert hellinger_factor((0.5, 0.5), (0.5, 0.5)) == 1.0
    assert hellinger_factor((0.5, 0.5), (0.0, 1.0)) == pytest.approx(math.sqrt(0.5))
    assert hellinger_factor((0.5, 0.5), (0.9, 0.1)) == pytest.approx(0.8944271909999159)


def test_hellinger_factor_dimension_guard():
    with pytest.raises(DimensionMismatchError):
        hellinger_factor((0.5, 0.5), (0.2, 0.3, 0.5))


prob_vectors = st.integers(min_value=2, max_value=5).flatmap(
    lambda n: st.lists(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=n, max_size=n
    )
).map(lambda v: tuple(x / s if (s := sum(v)) > 0 else 1.0 / len(v) for x in v))


@given(prob_vectors, prob_vectors)
def test_hellinger_factor_range_and_symmetry(p, q):
    if len(p) != len(q):
        return
    if abs(sum(p) - 1) > 1e-9 or abs(sum(q) - 1) > 1e-9:
        return
    rho = hellinger_factor(p, q)
    assert -1e-12 <= rho <= 1.0 + 1e-12
    assert rho == pytest.approx(hellinger_factor(q, p), abs=1e-14)


def test_dichotomy_identical_laws():
    v = kakutani_dichotomy(FAIR, FAIR)
    assert v.outcome == "absolutely-continuous"
    assert v.criterion.lower_bound > 0.999
    assert all(p == 1.0 for p in v.hellinger_partials)


@pytest.mark.parametrize(
    "law",
    [
        BinaryLaws(ConstantDigits(0.3)),
        BinaryLaws(PerturbedDigits(0.4, 0.2, 1.5)),
        BinaryLaws(ExplicitDigits((0.9,), GeometricApproachDigitTail(0.6, -0.1, 0.5, 2))),
        ConstantLaws((0.2, 0.3, 0.5)),
        ExplicitLaws(((0.1, 0.9),), (0.7, 0.3)),
    ],
)
def test_dichotomy_reflexive(law):
    assert kakutani_dichotomy(law, law).outcome == "absolutely-continuous"


def test_dichotomy_perturbed_vs_fair():
    nu = BinaryLaws(PerturbedDigits(0.5, 1.0, 1.0))
    v = kakutani_dichotomy(FAIR, nu)
    assert v.outcome == "absolutely-continuous"
    assert v.criterion.kind == "positive-limit"
    assert v.criterion.lower_bound > 0.0


def test_dichotomy_slow_perturbation_is_singular():
    nu = BinaryLaws(PerturbedDigits(0.5, 1.0, 0.4))
    v = kakutani_dichotomy(FAIR, nu)
    assert v.outcome == "singular"


def test_dichotomy_biased_vs_fair():
    v = kakutani_dichotomy(FAIR, BinaryLaws(ConstantDigits(0.6)))
    assert v.outcome == "singular"
    assert v.criterion.kind == "zero-limit"
    # partial products decay like rho^n with rho = sqrt(.3)+sqrt(.2)
    rho = math.sqrt(0.3) + math.sqrt(0.2)
    assert v.hellinger_partials[7] == pytest.approx(rho ** 8, rel=1e-10)


def test_dichotomy_mismatched_limits_certified_singular():
    nu = BinaryLaws(PerturbedDigits(0.6, 0.5, 2.0))
    v = kakutani_dichotomy(FAIR, nu)
    assert v.outcome == "singular"


def test_domination_violation():
    mu = ConstantLaws((1.0, 0.0))
    nu = ConstantLaws((0.5, 0.5))
    with pytest.raises(DominationViolationError):
        kakutani_dichotomy(mu, nu)


def test_domination_pinned_tail():
    mu = BinaryLaws(ConstantDigits(1.0))
    nu = BinaryLaws(ExplicitDigits((), GeometricApproachDigitTail(1.0, -1.0, 0.5)))
    # nu gives every coordinate positive mass on digit 1, mu never does
    with pytest.raises(DominationViolationError):
        kakutani_dichotomy(mu, nu)
    v = kakutani_dichotomy(mu, mu)
    assert v.outcome == "absolutely-continuous"


def test_general_alphabet_constant_laws():
    mu = ConstantLaws((0.2, 0.3, 0.5))
    assert kakutani_dichotomy(mu, mu).outcome == "absolutely-continuous"
    nu = ConstantLaws((0.3, 0.3, 0.4))
    assert kakutani_dichotomy(mu, nu).outcome == "singular"


def test_explicit_laws_prefix_then_equal():
    mu = ConstantLaws((0.5, 0.5))
    nu = ExplicitLaws(((0.9, 0.1), (0.2, 0.8)), (0.5, 0.5))
    v = kakutani_dichotomy(mu, nu)
    assert v.outcome == "absolutely-continuous"


# --- discreteness -----------------------------------------------------------

def test_discreteness_geometric_approach(discrete):
    v = discreteness_test(BinaryLaws(discrete.digits))
    assert v.outcome == "discrete"
    assert v.mass_lower_bound == pytest.approx(0.2887880950866024, abs=1e-9)
    assert set(v.atom.leading) == {0}
    assert v.atom.eventual == 0


def test_discreteness_fair_is_not_discrete():
    assert discreteness_test(FAIR).outcome == "not-discrete"


def test_discreteness_point_mass():
    v = discreteness_test(BinaryLaws(ConstantDigits(1.0)))
    assert v.outcome == "discrete"
    assert v.mass_lower_bound >= 1.0 - 1e-9
    assert v.atom.eventual == 0


def test_discreteness_power_approach_too_slow():
    v = discreteness_test(BinaryLaws(PerturbedDigits(1.0, -1.0, 0.5)))
    assert v.outcome == "not-discrete"


def test_atom_mass_bound_below_truncated_maximum(discrete):
    """The product lower bound never exceeds any truncated maximal atom mass."""
    law = BinaryLaws(discrete.digits)
    v = discreteness_test(law)
    for n in (1, 4, 16, 40):
        truncated_max = 1.0
        for k in range(1, n + 1):
            truncated_max *= max(law.law(k))
        assert v.mass_lower_bound <= truncated_max + 1e-12
