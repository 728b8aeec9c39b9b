"""Headline classification of a convolution's distribution type.

Under the standing hypothesis that every gap ratio exceeds 1 the law has
pure type (Jessen-Wintner purity for sums of independent discrete terms,
asserted from the literature, never computed), and the trichotomy is decided
by three certified criteria:

* discrete        iff  prod_k max(p0_k, p1_k) > 0,
* abs. continuous iff  sum_k (ratio_k - 1) < inf  and  sum_k (1/2-p0_k)^2 < inf,
* singular continuous in every other certified case.

Alongside the trichotomy this module evaluates the almost-every-scale
reports: the digit-deviation condition around a reference probability and
the threshold p**p (1-p)**(1-p).  Their conclusions ("absolutely continuous
for almost every geometric scale past the threshold") come from cited
external results and are reported as citations, never as computed facts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .convspec import (
    ConstantDigits,
    ConvolutionSpec,
    DigitLaw,
    deviation_terms,
)
from .errors import (
    HypothesisViolationError,
    LevelTooLargeError,
    RangeError,
    TailUnboundedError,
)
from .product_measure import (
    BinaryLaws,
    DichotomyVerdict,
    hellinger_factor,
    kakutani_dichotomy,
)
from .sequences import (
    ProductVerdict,
    SeriesVerdict,
    product_verdict,
    series_verdict,
)
from .convspec import min_component_terms

_OUTCOMES = ("discrete", "absolutely-continuous", "singular-continuous", "indeterminate")


@dataclass(frozen=True)
class Certificate:
    name: str
    verdict: Union[SeriesVerdict, ProductVerdict]

    @property
    def certified(self) -> bool:
        return self.verdict.certified


@dataclass(frozen=True)
class HypothesisReport:
    gap_ratios_exceed_one: Optional[bool]
    boundary_case: bool
    detail: str


@dataclass(frozen=True)
class ClassificationVerdict:
    outcome: str
    certificates: tuple[Certificate, ...]
    hypothesis_report: HypothesisReport

    def certificate(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.name == name:
                return c
        raise KeyError(name)


def classify(spec: ConvolutionSpec, strict_hypothesis: bool = False) -> ClassificationVerdict:
    """Trichotomy verdict with all three criterion certificates attached.

    Outside the certified all-gaps regime the outcome is indeterminate (or,
    with ``strict_hypothesis``, an error); the certificates that do not need
    the hypothesis are still computed and attached.
    """
    prof = spec.scales.gap_ratio_profile()
    hyp_ok = prof.always_above_one
    boundary = (
        hyp_ok is not True
        and prof.constant_value is not None
        and prof.constant_value == 1
    )
    if hyp_ok is not True and strict_hypothesis:
        raise HypothesisViolationError(
            "classification requires every gap ratio above 1; "
            + ("the scale sequence sits on the ratio = 1 boundary" if boundary else "not certified")
        )

    certificates = []
    discreteness = product_verdict(min_component_terms(spec.digits))
    certificates.append(Certificate("max-digit-probability-product", discreteness))
    try:
        gap_series = series_verdict(spec.scales.gap_excess_terms())
    except (TailUnboundedError, ValueError):
        # negative excess or bound-only tail: no certificate for this series
        gap_series = SeriesVerdict.unknown(float("nan"), 0)
    certificates.append(Certificate("gap-excess-series", gap_series))
    deviation = series_verdict(deviation_terms(spec.digits, 0.5, power=2))
    certificates.append(Certificate("digit-deviation-series", deviation))

    if hyp_ok is not True:
        detail = (
            "gap ratio identically 1 (boundary regime): trichotomy hypothesis fails; "
            "use the evaluator for this spec"
            if boundary
            else "gap ratios above 1 not certified for every index"
        )
        report = HypothesisReport(hyp_ok, boundary, detail)
        return ClassificationVerdict("indeterminate", tuple(certificates), report)

    report = HypothesisReport(True, False, "gap ratios above 1 certified for every index")
    if discreteness.kind == "positive-limit":
        return ClassificationVerdict("discrete", tuple(certificates), report)
    if (
        discreteness.kind == "zero-limit"
        and gap_series.kind == "converges"
        and deviation.kind == "converges"
    ):
        return ClassificationVerdict("absolutely-continuous", tuple(certificates), report)
    if discreteness.kind == "zero-limit" and (
        gap_series.kind == "diverges" or deviation.kind == "diverges"
    ):
        return ClassificationVerdict("singular-continuous", tuple(certificates), report)
    return ClassificationVerdict("indeterminate", tuple(certificates), report)


# ---------------------------------------------------------------------------
# Almost-every-scale reports (cited conclusions)
# ---------------------------------------------------------------------------

CITED_NOT_VERIFIED = "cited, not verified"


@dataclass(frozen=True)
class AlmostEveryScaleReport:
    condition_verdict: SeriesVerdict
    reference_p: Optional[float]
    threshold: Optional[float]
    conclusion: str
    marker: str = CITED_NOT_VERIFIED


def scale_threshold(p: float) -> float:
    """p**p * (1-p)**(1-p); the cited almost-sure window starts here."""
    return math.exp(p * math.log(p) + (1.0 - p) * math.log(1.0 - p))


def report_ae_scale(digits: DigitLaw, p: Optional[float] = None) -> AlmostEveryScaleReport:
    """Evaluate the squared digit-deviation condition and the cited window.

    Without a reference probability the deviation is measured around 1/2.
    With p in [1/3, 2/3] it is measured around 1-p and the report carries
    the threshold p**p (1-p)**(1-p).  Either way the absolute-continuity
    conclusion for almost every geometric scale in the window is quoted from
    the literature, not verified here.
    """
    if p is None:
        center, threshold = 0.5, None
    else:
        if not (1.0 / 3.0 <= p <= 2.0 / 3.0):
            raise RangeError(f"reference probability {p} outside [1/3, 2/3]")
        center, threshold = 1.0 - p, scale_threshold(p)
    sv = series_verdict(deviation_terms(digits, center, power=2))
    if sv.kind == "converges":
        window = f"[{threshold:.6f}, 1)" if threshold is not None else "[1/2, 1)"
        conclusion = (
            "digit deviations around "
            f"{center} are square-summable (certified); the distribution is "
            f"absolutely continuous for almost every geometric scale in {window}"
        )
    elif sv.kind == "diverges":
        conclusion = (
            "squared digit deviations diverge (certified); the almost-every-scale "
            "absolute-continuity result does not apply"
        )
    else:
        conclusion = "condition not certified; no conclusion"
    return AlmostEveryScaleReport(sv, p, threshold, conclusion)


# ---------------------------------------------------------------------------
# Singular-product-with-equivalent-images demo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleDemo:
    reference_p: float
    scale: float
    level: int
    hellinger_factor_value: float
    product: ProductVerdict
    dichotomy: DichotomyVerdict
    cell_edges: tuple[float, ...]
    biased_cells: tuple[float, ...]
    fair_cells: tuple[float, ...]
    overlap_mass: float
    note: str


def counterexample_demo(
    p: float, scale: float, level: int = 20, cell_width: float = 0.25
) -> CounterexampleDemo:
    """Singularity upstairs, shared image mass downstairs.

    The biased product law (digit probability p != 1/2) is mutually singular
    with the fair one: their Hellinger factor is a constant below 1, so the
    product criterion certifies a zero limit.  Both image laws under
    x = sum d_k scale**k are then tabulated at a truncation level on a
    common grid; the absolute continuity of the images (for almost every
    scale past the threshold) is the cited half of the story.
    """
    if not (1.0 / 3.0 <= p <= 2.0 / 3.0) or p == 0.5:
        raise RangeError("reference probability must lie in [1/3, 2/3] and differ from 1/2")
    if not (0.5 < scale < 1.0):
        raise RangeError("scale must lie in (1/2, 1)")
    if level < 1 or level > 24:
        raise LevelTooLargeError("level must lie in 1..24")
    if cell_width <= 0.0:
        raise RangeError("cell width must be positive")

    fair = BinaryLaws(ConstantDigits(0.5))
    biased = BinaryLaws(ConstantDigits(1.0 - p))
    rho = hellinger_factor((0.5, 0.5), (1.0 - p, p))
    dich = kakutani_dichotomy(fair, biased)

    top = scale / (1.0 - scale)
    cells = max(1, math.ceil(top / cell_width - 1e-12))
    edges = [min(i * cell_width, top) for i in range(cells + 1)]
    idx = np.arange(2 ** level, dtype=np.uint64)
    values = np.zeros(len(idx), dtype=np.float64)
    ones = np.zeros(len(idx), dtype=np.float64)
    for k in range(level):
        bit = ((idx >> np.uint64(k)) & np.uint64(1)).astype(np.float64)
        values += bit * scale ** (k + 1)
        ones += bit
    biased_w = np.exp(ones * math.log(p) + (level - ones) * math.log(1.0 - p))
    fair_w = np.full(len(values), 0.5 ** level)
    cell_idx = np.clip(np.floor(values / cell_width).astype(int), 0, cells - 1)
    biased_cells = np.bincount(cell_idx, weights=biased_w, minlength=cells)
    fair_cells = np.bincount(cell_idx, weights=fair_w, minlength=cells)
    overlap = float(np.minimum(biased_cells, fair_cells).sum())

    return CounterexampleDemo(
        reference_p=p,
        scale=scale,
        level=level,
        hellinger_factor_value=rho,
        product=dich.criterion,
        dichotomy=dich,
        cell_edges=tuple(edges),
        biased_cells=tuple(biased_cells.tolist()),
        fair_cells=tuple(fair_cells.tolist()),
        overlap_mass=overlap,
        note=(
            "product laws are mutually singular (certified zero-limit); "
            "equivalence of the image laws for almost every scale past "
            f"{scale_threshold(p):.6f} is " + CITED_NOT_VERIFIED
        ),
    )
