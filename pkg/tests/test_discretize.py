import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxkernel import discretize
from maxkernel.symbols import Interval, PiecewisePoly, Step

from conftest import random_step


def test_indicator_2x2_is_exact(indicator):
    gm = discretize.galerkin_matrix(indicator, n=2)
    assert np.array_equal(gm.entries, np.full((2, 2), 0.5))


def test_full_equals_lower_plus_transpose(affine):
    lo = discretize.galerkin_matrix(affine, n=64, mask="lower")
    fu = discretize.galerkin_matrix(affine, n=64, mask="full")
    assert np.array_equal(fu.entries, lo.entries + lo.entries.T)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_full_equals_lower_plus_transpose_steps(seed):
    s = random_step(np.random.default_rng(seed))
    lo = discretize.galerkin_matrix(s, n=48, mask="lower")
    fu = discretize.galerkin_matrix(s, n=48, mask="full")
    assert np.array_equal(fu.entries, lo.entries + lo.entries.T)


def test_step_exact_spectrum_two_step(two_step):
    est = discretize.step_exact_spectrum(two_step)
    want = np.array([(3 + math.sqrt(5)) / 2, (3 - math.sqrt(5)) / 2])
    assert np.allclose(est.svals, want, rtol=1e-14)


def test_galerkin_matches_exact_eigs(affine):
    gm = discretize.galerkin_matrix(affine, n=512)
    sv, eigs = discretize.singular_values(gm)
    n = np.arange(8)
    exact = 1.0 / (np.pi * (n + 0.5)) ** 2
    # discretization error scales like (omega h)^2/12, about 1.8e-4 at n=7
    assert np.max(np.abs(sv[:8] / exact - 1.0)) < 5e-4
    assert eigs is not None and np.all(eigs[:8] > 0)


def test_masked_volterra_svals(indicator):
    gm = discretize.galerkin_matrix(indicator, n=512, mask="lower")
    sv, _ = discretize.singular_values(gm)
    n = np.arange(10)
    exact = 1.0 / (np.pi * (n + 0.5))
    # same (omega h)^2 error scaling as the symmetric case
    assert np.max(np.abs(sv[:10] / exact - 1.0)) < 5e-4


def test_spectrum_converges(affine):
    est = discretize.spectrum(affine, n0=128, tol=1e-6, K=8)
    n = np.arange(8)
    exact = 1.0 / (np.pi * (n + 0.5)) ** 2
    assert np.max(np.abs(est.svals[:8] / exact - 1.0)) < 1e-4
    assert len(est.refinement_history) >= 2


def test_spectrum_budget_exhaustion(affine):
    with pytest.raises(RuntimeError, match="no-convergence"):
        discretize.spectrum(affine, n0=64, tol=1e-14, max_doublings=1)


def test_spectrum_truncates_unbounded(inv_square_tail):
    est = discretize.spectrum(inv_square_tail, n0=256, tol=1e-4, K=4)
    assert "truncated_at" in est.meta
    assert est.meta["truncated_at"] >= 16.0


def test_truncation_point(inv_square_tail, affine, inv_tail):
    X = discretize.truncation_point(inv_square_tail, 1e-2)
    # tail functional x^-2/3 <= 1e-4 needs x >= 57.7; doubling gives 64
    assert X == 64.0
    assert discretize.truncation_point(affine) == 1.0
    with pytest.raises(ValueError):
        discretize.truncation_point(inv_tail)


def test_schatten_report(affine):
    est = discretize.spectrum(affine, n0=256, tol=1e-6, K=16)
    r1 = discretize.schatten(est, 1.0)
    # S1 = trace = 1/2 for this shape
    assert r1.norm == pytest.approx(0.5, rel=2e-3)
    r2 = discretize.schatten(est, 2.0)
    assert r2.norm == pytest.approx(math.sqrt(1 / 6), rel=1e-4)
    assert r2.weak_norm > 0
    rinf = discretize.schatten(est, math.inf)
    assert rinf.norm == pytest.approx(est.svals[0])


def test_triangular_limit_small_window(indicator):
    tl = discretize.triangular_limit(indicator, levels=(256, 512, 1024),
                                     window=(20, 80))
    assert abs(tl.plateau - 1 / math.pi) < 1e-4
    n = np.arange(20, 81)
    exact = 1.0 / (np.pi * (n + 0.5))
    assert np.max(np.abs(tl.per_index / exact - 1.0)) < 1e-5
    assert tl.predicted == pytest.approx(1 / math.pi)


def test_triangular_limit_validates_levels(indicator):
    with pytest.raises(ValueError):
        discretize.triangular_limit(indicator, levels=(256, 512, 768))
    with pytest.raises(ValueError):
        discretize.triangular_limit(indicator, levels=(256, 512, 1024),
                                    window=(100, 400))


def test_factor_residual_small(affine):
    assert discretize.factor_residual(affine, n=512) < 1e-5


def test_factor_residual_needs_monotone():
    rising = PiecewisePoly([1.0], [[0.0, 1.0]])  # phi = x, increasing
    with pytest.raises(ValueError):
        discretize.factor_residual(rising, n=64)


def test_explicit_nodes_match_uniform(affine):
    nodes = np.linspace(0.0, 1.0, 65)
    a = discretize.galerkin_matrix(affine, grid=nodes)
    b = discretize.galerkin_matrix(affine, n=64, grid="uniform")
    assert np.array_equal(a.entries, b.entries)
    assert a.n == 64 and a.interval == Interval(0.0, 1.0)


def test_explicit_nodes_reject_disorder(affine):
    with pytest.raises(ValueError):
        discretize.galerkin_matrix(affine, grid=[0.0, 0.5, 0.25])


def test_dense_cap(affine):
    gm = discretize.galerkin_matrix(affine, n=discretize.MAX_DENSE + 1)
    with pytest.raises(ValueError):
        discretize.singular_values(gm)


def test_conforming_grid_is_exact_for_steps():
    s = Step([0.3, 1.1, 2.0], [3.0, 2.0, 0.5])
    exact = discretize.step_exact_spectrum(s).svals
    nodes = np.unique(np.concatenate([np.linspace(0, 2.0, 101),
                                      [0.3, 1.1]]))
    gm = discretize.galerkin_matrix(s, grid=nodes)
    sv, _ = discretize.singular_values(gm)
    assert np.max(np.abs(sv[:3] / exact - 1.0)) < 1e-12
