"""Canonical benchmark specs used across tests, docs and shipped examples."""

from __future__ import annotations

from .convspec import (
    CantorLike,
    ConstantDigits,
    ConvolutionSpec,
    ExplicitDigits,
    Geometric,
    GeometricApproachDigitTail,
    PerturbedDigits,
    TwoTerm,
)


def cantor_spec() -> ConvolutionSpec:
    """Middle-thirds set: scales 2*3**-k, fair digits."""
    return ConvolutionSpec(CantorLike(coef=2.0, base=3), ConstantDigits(0.5))


def uniform_spec() -> ConvolutionSpec:
    """Scales 2**-k with fair digits: the uniform law on [0, 1]."""
    return ConvolutionSpec(Geometric(lam=0.5, coef=1.0), ConstantDigits(0.5))


def two_term_spec(epsilon: float = 0.5) -> ConvolutionSpec:
    """Nowhere dense support of positive measure 1 - epsilon."""
    return ConvolutionSpec(TwoTerm(epsilon), ConstantDigits(0.5))


def discrete_spec() -> ConvolutionSpec:
    """Gapped scales with digit probabilities 1 - 2**-k: a pure atomic law."""
    return ConvolutionSpec(
        CantorLike(coef=2.0, base=3),
        ExplicitDigits((), GeometricApproachDigitTail(p0_value=1.0, c=-1.0, ratio=0.5)),
    )


def perturbed_spec(c: float = 0.25, s: float = 2.0) -> ConvolutionSpec:
    """Gapped scales with digits drifting to fair at rate c*k**-s."""
    return ConvolutionSpec(CantorLike(coef=2.0, base=3), PerturbedDigits(0.5, c, s))


def biased_singular_spec(p0: float = 0.6) -> ConvolutionSpec:
    """Gapped scales with a constant digit bias: singular continuous."""
    return ConvolutionSpec(CantorLike(coef=2.0, base=3), ConstantDigits(p0))
