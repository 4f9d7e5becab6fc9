import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxkernel import classify
from maxkernel.symbols import PiecewisePoly, Sampled, Step, TrigPoly


def test_s2_norm_closed_forms(affine, square, tent, indicator, two_step,
                              inv_square_tail):
    # (2 int x phi^2)^(1/2), all integrals done by hand
    assert classify.s2_norm(affine) == pytest.approx(math.sqrt(1 / 6))
    assert classify.s2_norm(square) == pytest.approx(math.sqrt(1 / 15))
    assert classify.s2_norm(tent) == pytest.approx(math.sqrt(11 / 24))
    assert classify.s2_norm(indicator) == pytest.approx(1.0)
    assert classify.s2_norm(two_step) == pytest.approx(math.sqrt(7.0))
    assert classify.s2_norm(inv_square_tail) == pytest.approx(1.0)


def test_l1_norm(affine, two_step, inv_square_tail, cosine):
    assert classify.l1_norm(affine) == pytest.approx(0.5)
    assert classify.l1_norm(two_step) == pytest.approx(3.0)
    assert classify.l1_norm(inv_square_tail) == pytest.approx(1.0)
    # int_0^1 |cos 2 pi t| = 2/pi, handled by sign-split quadrature
    assert classify.l1_norm(cosine) == pytest.approx(2 / math.pi, rel=1e-9)


def test_l1_norm_divergent(inv_tail):
    with pytest.raises(ValueError):
        classify.l1_norm(inv_tail)


def test_trace_value(affine, tent, inv_square_tail, inv_tail):
    assert classify.trace_value(affine).real == pytest.approx(0.5)
    assert classify.trace_value(tent).real == pytest.approx(0.75)
    assert classify.trace_value(inv_square_tail).real == pytest.approx(1.0)
    with pytest.raises(ValueError):
        classify.trace_value(inv_tail)


def test_tail_functional(inv_square_tail, affine):
    # x * int_x^inf t^-4 dt = x^-2 / 3
    assert classify.tail_functional(inv_square_tail, 2.0) == \
        pytest.approx(1 / 12)
    assert classify.tail_functional(affine, 1.0) == 0.0
    with pytest.raises(ValueError):
        classify.tail_functional(affine, -1.0)


def test_bounded_compact_verdicts(inv_tail, inv_square_tail, affine):
    assert classify.is_bounded(inv_tail).definitely_in
    assert classify.is_compact(inv_tail).definitely_out
    assert classify.is_compact(inv_square_tail).definitely_in
    assert classify.is_bounded(affine).definitely_in


def test_schatten_verdicts(affine, indicator, inv_tail, inv_square_tail):
    assert classify.classify_schatten(affine, 2.0).definitely_in
    assert classify.classify_schatten(affine, 1.0).definitely_in
    v = classify.classify_schatten(affine, 0.4)
    assert v.definitely_out and v.criterion == "smooth-slope-exclusion"
    v = classify.classify_schatten(indicator, 0.3)
    assert v.definitely_in and v.criterion == "finite-rank-step"
    v = classify.classify_schatten(inv_tail, 1.0)
    assert v.definitely_out and v.criterion == "xp-divergence"
    assert classify.classify_schatten(inv_square_tail, 1.0).definitely_in


def test_schatten_rejects_bad_exponent(affine):
    for p in (0.0, -1.0, math.inf):
        with pytest.raises(ValueError):
            classify.classify_schatten(affine, p)


def test_xp_integral_divergence(inv_tail, inv_square_tail):
    assert math.isinf(classify.x_p_integral(inv_tail, 1.0))
    assert math.isfinite(classify.x_p_integral(inv_square_tail, 1.0))


def test_monotone_profile_matches_xp_at_p1(affine):
    # both routes are exact for a nonincreasing symbol at p = 1
    m = classify.monotone_profile_norm(affine, 1.0)
    assert math.isfinite(m)


def test_positive_operator(affine, tent, indicator):
    for s in (affine, tent, indicator):
        assert classify.is_positive_operator(s).definitely_in


def test_dini_integral_smooth(affine):
    assert math.isfinite(classify.dini_integral(affine))


def test_canonical_step_merges():
    s = Step([1.0, 2.0, 3.0], [2.0, 2.0, 1.0])
    c = classify.canonical_step(s)
    assert c.breakpoints == (2.0, 3.0)
    assert c.values == (2.0, 1.0)
    assert classify.detect_step(s) == 2


def test_detect_step_on_other_kinds(affine):
    assert classify.detect_step(affine) is None
    pc = Sampled((0.5, 1.0), (1.0, 1.0), "pc")
    # zero on (0, 0.5] then 1 on (0.5, 1]: two pieces in canonical form
    assert classify.detect_step(pc) == 2
    c = classify.canonical_step(pc)
    assert c.values == (0.0, 1.0)


def test_kronecker_det_known():
    # {a_max(i,j)} for a = (3, 2, 1): det = 1 * (3-2) * (2-1)
    assert classify.kronecker_det([3.0, 2.0, 1.0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        classify.kronecker_det([])


@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False,
                                   allow_infinity=False),
                min_size=1, max_size=8))
@settings(max_examples=80, deadline=None)
def test_kronecker_det_matches_dense(vals):
    a = np.asarray(vals)
    got = classify.kronecker_det(a)
    idx = np.arange(len(a))
    want = complex(np.linalg.det(a[np.maximum(idx[:, None], idx[None, :])]))
    assert got == pytest.approx(want, abs=1e-9 * max(1.0, abs(want)))


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.6, 3.0))
@settings(max_examples=25, deadline=None)
def test_scaling_keeps_verdicts(seed, scale):
    # phi -> c * phi is a positive scalar multiple of the operator, so the
    # membership verdict must be scale invariant
    rng = np.random.default_rng(seed)
    from conftest import random_step
    s = random_step(rng, max_steps=5)
    t = Step(s.breakpoints, [scale * v for v in s.values])
    for p in (0.4, 1.0, 2.0):
        assert classify.classify_schatten(s, p).verdict == \
            classify.classify_schatten(t, p).verdict
