"""bernconv: certified analysis of generalized Bernoulli convolutions.

The package classifies the law of a random series sum_k d_k a_k with
independent binary digits as discrete / absolutely continuous / singular
continuous, computes the geometry of its support (nowhere density, Lebesgue
measure, fractal dimension), evaluates the distribution numerically (CDF,
characteristic function, moments, seeded sampling) and ships brute-force
oracles that validate every verdict at desk scale.
"""

__version__ = "0.1.0"

from .convspec import (
    CantorLike,
    ConstantDigits,
    ConstantDigitTail,
    ConvolutionSpec,
    ExactGeometricTail,
    ExplicitDigits,
    ExplicitScales,
    Geometric,
    GeometricApproachDigitTail,
    GeometricBoundTail,
    MixedGeometricTail,
    PerturbedDigits,
    PerturbedDigitTail,
    PowerLawTail,
    TwoTerm,
    gap_ratio,
    tail_sum,
)
from .classifier import (
    classify,
    counterexample_demo,
    report_ae_scale,
    scale_threshold,
)
from .evaluate import (
    cdf,
    cdf_grid,
    char_fn,
    digits_of,
    moments,
    sample,
    truncated_distribution,
)
from .image_measure import (
    FiniteMeasure,
    FiniteMeasureSpace,
    PointMap,
    abs_continuous,
    check_preservation_laws,
    mutually_singular,
    pushforward,
    run_law_suite,
    singular_pair_with_equivalent_images,
)
from .intervals import Interval
from .oracle import box_count, compare_cdf, truncated_hellinger
from .product_measure import (
    BinaryLaws,
    ConstantLaws,
    ExplicitLaws,
    discreteness_test,
    hellinger_factor,
    kakutani_dichotomy,
)
from .sequences import (
    ProductVerdict,
    SeriesVerdict,
    TermSeq,
    product_verdict,
    series_verdict,
)
from .support import (
    cylinders,
    dimension_estimate,
    nowhere_dense_verdict,
    support_measure,
    unique_representation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
