import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxkernel import matrixrep
from maxkernel.symbols import Step, TrigPoly


def test_fourier_coeffs_affine(affine):
    c = matrixrep.fourier_coeffs(affine, 4)
    assert c.period == 1.0
    assert c[0] == pytest.approx(0.5)
    # int_0^1 (1-x) e^(-2 pi i k x) dx = -i / (2 pi k)
    for k in (1, 2, -3):
        assert c[k] == pytest.approx(-1j / (2 * math.pi * k), abs=1e-13)


def test_fourier_coeffs_indicator_period2(indicator):
    c = matrixrep.fourier_coeffs(indicator, 3, period=2.0)
    # chi_(0,1] against e^(-pi i k x)/2 on a period-2 circle
    assert c[0] == pytest.approx(0.5)
    assert c[1] == pytest.approx((1 - np.exp(-1j * math.pi)) /
                                 (2j * math.pi), abs=1e-13)
    assert c[2] == pytest.approx(0.0, abs=1e-13)


def test_trig_passthrough_is_exact():
    s = TrigPoly(2.0, [0.25j, 1.0, -0.5])
    c = matrixrep.fourier_coeffs(s, 5, period=2.0)
    assert c[-1] == 0.25j and c[0] == 1.0 and c[1] == -0.5
    assert c[3] == 0.0
    assert c.conjugate_defect() > 0  # deliberately non-real symbol


def test_hankel_window_single_mode():
    c = matrixrep.FourierCoefficients(1.0, np.array([0.0, 0.0, 1.0]))
    hw = matrixrep.hankel_window(c, 1)
    # entries a_(m+n+1) ((m+1/2)^-1 + (n+1/2)^-1) for m, n in {-1, 0, 1}
    want = np.zeros((3, 3))
    want[1, 1] = 4.0                # m = n = 0 -> a_1 * (2 + 2)
    want[0, 2] = 2 / 3 - 2          # m = -1, n = 1
    want[2, 0] = 2 / 3 - 2
    assert np.allclose(hw.entries, want)
    assert hw.coverage == 1.0


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 2 * math.pi))
@settings(max_examples=25, deadline=None)
def test_hankel_svals_phase_invariant(seed, alpha):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=7) + 1j * rng.normal(size=7)
    c1 = matrixrep.FourierCoefficients(1.0, vals)
    c2 = matrixrep.FourierCoefficients(1.0, np.exp(1j * alpha) * vals)
    s1 = matrixrep.hankel_svals(matrixrep.hankel_window(c1, 5))
    s2 = matrixrep.hankel_svals(matrixrep.hankel_window(c2, 5))
    assert np.allclose(s1, s2, rtol=1e-10, atol=1e-12)


def test_circle_kernel_five_cases():
    vals = np.array([0.3 - 0.1j, 0.2, 1.0, -0.4, 0.5j], dtype=complex)
    c = matrixrep.FourierCoefficients(2.0, vals)
    k = matrixrep.circle_kernel_coeffs
    assert k(c, 0, 0) == vals[2]                      # a_0
    assert k(c, 2, 0) == 0.5 * vals[3]                # axis, even: a_1/2...
    assert k(c, 0, -2) == 0.5 * vals[1]
    assert k(c, 1, 0) == 0.0                          # axis, odd
    assert k(c, 1, 2) == 0.0                          # mixed parity
    # both odd: (i/pi)(1/m + 1/n) a_((m+n)/2)
    got = k(c, 1, 1)
    assert got == pytest.approx((1j / math.pi) * 2.0 * vals[3])


def test_circle_kernel_needs_period_two():
    c = matrixrep.FourierCoefficients(1.0, np.array([1.0]))
    with pytest.raises(ValueError):
        matrixrep.circle_kernel_coeffs(c, 0, 0)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_odd_odd_circle_matches_window(seed):
    # khat(2m+1, 2n+1) = (i / 2 pi) b_(m,n) ties the two representations
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=9) + 1j * rng.normal(size=9)
    c = matrixrep.FourierCoefficients(2.0, vals)
    hw = matrixrep.hankel_window(c, 2)
    M = hw.order
    for m in (-2, -1, 0, 1, 2):
        for n in (-2, -1, 0, 1, 2):
            lhs = matrixrep.circle_kernel_coeffs(c, 2 * m + 1, 2 * n + 1)
            rhs = (1j / (2 * math.pi)) * hw.entries[m + M, n + M]
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_exp_svals_smallest_frequency():
    est = matrixrep.exp_symbol_svals(1, 5)
    want = np.array([4 / math.pi, 1.0, 1.0, 4 / (3 * math.pi),
                     4 / (3 * math.pi)])
    assert np.allclose(est.svals, want, rtol=1e-14)
    assert est.meta["N"] == 1


def test_exp_transfer_bounds():
    est = matrixrep.exp_symbol_svals(4, 50)
    upper = est.meta["upper"]
    lower = est.meta["lower"]
    assert np.all(lower <= upper)


def test_exp_parseval():
    for N in (1, 2, 7):
        series, integral = matrixrep.exp_parseval(N)
        assert integral == pytest.approx(4.0, abs=1e-12)
        assert series == pytest.approx(integral, rel=1e-12)


def test_exp_schatten_vs_direct_sum():
    # brute-force the p = 1.5 sum far past the analytic split point
    N, p = 3, 1.5
    k = np.arange(-10 ** 6, 10 ** 6 + 1)
    k = k[(np.abs(k) % 2) != (N % 2)]
    amp = (4.0 * N / math.pi) ** p
    brute = 2.0 + amp * np.sum(np.sort(
        1.0 / np.abs(N * N - k.astype(float) ** 2) ** p))
    got = matrixrep.exp_schatten_norm(N, p) ** p
    assert got == pytest.approx(brute, rel=1e-9)


def test_exp_schatten_diverges_at_half():
    assert math.isinf(matrixrep.exp_schatten_norm(4, 0.5))
    assert math.isinf(matrixrep.exp_schatten_norm(4, 0.3))


def test_exp_growth_table():
    rows = matrixrep.exp_symbol_growth((1, 4), ps=(1.0, 0.75))
    by = {(r["N"], r["p"]): r for r in rows}
    assert by[(1, 1.0)]["reference"] == pytest.approx(math.log(2.0))
    assert by[(4, 0.75)]["reference"] == pytest.approx(4.0 ** (1 / 3))
    for r in rows:
        assert r["ratio"] == pytest.approx(r["norm"] / r["reference"])


def test_default_window_covers_compact_coeffs():
    c = matrixrep.FourierCoefficients(
        1.0, np.pad(np.array([1.0, 2.0, 1.0]), 6))
    hw = matrixrep.hankel_window(c)
    assert hw.coverage == 1.0
    assert hw.order >= 3
