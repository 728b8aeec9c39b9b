"""Cross-cutting randomized properties over the generator catalogs."""

import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from bernconv.convspec import (
    CantorLike,
    ConstantDigits,
    ConvolutionSpec,
    Geometric,
    PerturbedDigits,
    TwoTerm,
    gap_ratio,
    tail_sum,
)
from bernconv.evaluate import cdf_grid, char_fn, truncated_distribution
from bernconv.support import cylinders

scale_strategies = st.one_of(
    st.builds(Geometric, st.floats(min_value=0.05, max_value=0.95),
              st.floats(min_value=0.1, max_value=3.0)),
    st.builds(CantorLike, st.floats(min_value=0.1, max_value=3.0),
              st.integers(min_value=2, max_value=6)),
    st.builds(TwoTerm, st.floats(min_value=0.01, max_value=0.99)),
)

gapped_scales = st.one_of(
    st.builds(CantorLike, st.floats(min_value=0.5, max_value=2.5),
              st.integers(min_value=3, max_value=5)),
    st.builds(TwoTerm, st.floats(min_value=0.05, max_value=0.95)),
)

interior_digits = st.one_of(
    st.builds(ConstantDigits, st.floats(min_value=0.05, max_value=0.95)),
    st.builds(PerturbedDigits, st.floats(min_value=0.3, max_value=0.7),
              st.floats(min_value=-0.2, max_value=0.2),
              st.floats(min_value=0.6, max_value=3.0)),
)


@settings(max_examples=60, deadline=None)
@given(scale_strategies, st.integers(min_value=0, max_value=12))
def test_tail_sum_brackets_partial_sums(scales, n):
    iv = tail_sum(scales, n)
    partial = sum(scales.term_float(k) for k in range(n + 1, 120))
    rest_hi = tail_sum(scales, 119).hi
    assert partial <= iv.hi * (1 + 1e-12) + 1e-15
    assert iv.lo <= partial + rest_hi + 1e-12


@settings(max_examples=60, deadline=None)
@given(scale_strategies, st.integers(min_value=1, max_value=20))
def test_gap_ratio_consistent_with_terms(scales, k):
    iv = gap_ratio(scales, k)
    direct = scales.term_float(k) / tail_sum(scales, k).mid
    assert iv.lo * (1 - 1e-9) <= direct <= iv.hi * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(gapped_scales, interior_digits, st.integers(min_value=0, max_value=7))
def test_cylinder_nesting_random(scales, digits, n):
    spec = ConvolutionSpec(scales, digits)
    outer = cylinders(spec, n)
    inner = cylinders(spec, n + 1)
    assert inner.total_length.lo <= outer.total_length.hi * (1 + 1e-12)
    i = 0
    rows_out = outer.intervals
    for lo, hi in inner.intervals:
        while i < len(rows_out) and rows_out[i][1] < hi - 1e-12:
            i += 1
        assert i < len(rows_out)
        assert rows_out[i][0] <= lo + 1e-12 and hi <= rows_out[i][1] + 1e-12


@settings(max_examples=25, deadline=None)
@given(gapped_scales, interior_digits)
def test_cdf_monotone_random(scales, digits):
    spec = ConvolutionSpec(scales, digits)
    top = tail_sum(scales, 0).lo
    xs = np.linspace(0.0, top, 60)
    lo, hi = cdf_grid(spec, xs, horizon=40)
    assert np.all(np.diff(lo) >= -1e-10)
    assert np.all(np.diff(hi) >= -1e-10)
    # at the exact supremum the full mass is accounted for (exact walk)
    from bernconv.evaluate import cdf

    full = cdf(spec, scales.tail_fraction(0), horizon=48)
    assert full.contains(1.0)


@settings(max_examples=25, deadline=None)
@given(gapped_scales, interior_digits,
       st.floats(min_value=-40.0, max_value=40.0))
def test_char_fn_bounds_random(scales, digits, t):
    spec = ConvolutionSpec(scales, digits)
    v = char_fn(spec, t, tol=1e-8)
    assert abs(v.value) <= 1.0 + v.radius
    assert char_fn(spec, -t, tol=1e-8).value == v.value.conjugate()


@settings(max_examples=20, deadline=None)
@given(gapped_scales, interior_digits, st.integers(min_value=0, max_value=10))
def test_truncated_mass_and_support_random(scales, digits, n):
    spec = ConvolutionSpec(scales, digits)
    td = truncated_distribution(spec, n)
    assert abs(float(td.probs.sum()) - 1.0) <= 1e-12
    assert np.all(np.diff(td.values) > 0)
    approx = cylinders(spec, n)
    # every atom sits at the left end of some cylinder (float sums may land
    # an ulp below the exactly rounded endpoint, hence the shifted key)
    idx = np.searchsorted(approx.intervals[:, 0], td.values + 1e-9, side="right") - 1
    assert np.all(idx >= 0)
    inside = (td.values >= approx.intervals[idx, 0] - 1e-9) & (
        td.values <= approx.intervals[idx, 1] + 1e-9
    )
    assert bool(np.all(inside))
