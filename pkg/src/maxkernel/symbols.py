"""Symbol descriptions for kernels of the form phi(max(x, y)).

A symbol is an immutable, closed-form description of phi on (0, inf) in
one of four shapes: step function, piecewise (Laurent) polynomial,
trigonometric polynomial on a period, or a sampled grid interpreted as
piecewise-constant or piecewise-linear.  Everything downstream (profiles,
Galerkin sections, shooting, matrix representations) consumes symbols
through the exact piece lowering in this module, never through ad-hoc
callables, so cell integrals stay exact.

Conventions:
  * Step pieces are left-open right-closed: (0, x1], (x1, x2], ..., zero
    beyond the last breakpoint.
  * Jumps at a breakpoint count |c_i - c_{i+1}|; the terminal jump counts
    |c_N - 0|.
  * Sampled "pc" places value v_i on (x_i, x_{i+1}] with v_0 on the first
    cell unreachable (support starts at the first grid point); "pl"
    interpolates linearly inside [x_0, x_m] and is zero outside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.integrate import quad

from ._piecewise import (Piece, Term, abs2_terms, derivative_terms,
                         eval_pieces, eval_terms, integrate_pieces,
                         integrate_terms, integrate_terms_to_inf, merge_terms,
                         mul_terms, scale_terms, shift_terms)

__all__ = [
    "Interval", "Step", "PiecewisePoly", "TrigPoly", "Sampled", "Symbol",
    "evaluate", "scale", "support", "is_real_symbol", "to_pieces",
    "variation_tail", "heart_transform", "modulus", "subtract_terminal",
    "symbol_to_json", "symbol_from_json",
]


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] on the half-line; hi may be inf."""
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi)


def _as_tuple(xs) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


def _as_ctuple(xs) -> tuple[complex, ...]:
    return tuple(complex(x) for x in xs)


@dataclass(frozen=True)
class Step:
    """Step function: value values[i] on (x_{i-1}, x_i], zero beyond."""
    breakpoints: tuple[float, ...]
    values: tuple[complex, ...]

    def __init__(self, breakpoints, values):
        object.__setattr__(self, "breakpoints", _as_tuple(breakpoints))
        object.__setattr__(self, "values", _as_ctuple(values))
        bp = self.breakpoints
        if len(bp) != len(self.values):
            raise ValueError("breakpoints and values must have equal length")
        if len(bp) == 0 or bp[0] <= 0 or any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing and positive")


@dataclass(frozen=True)
class PiecewisePoly:
    """Piecewise polynomial (optionally Laurent) with compact or power tail.

    pieces[i] holds ascending coefficients starting at power lowest[i] on
    (x_{i-1}, x_i].  With ``tail`` given, the function continues beyond the
    last breakpoint as a Laurent polynomial whose powers must all be <= -1
    (so that the tail is square integrable); otherwise it is zero there.
    """
    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[complex, ...], ...]
    lowest: tuple[int, ...]
    tail: tuple[tuple[complex, int], ...]  # (coef, power) pairs, powers <= -1

    def __init__(self, breakpoints, pieces, lowest=None, tail=()):
        object.__setattr__(self, "breakpoints", _as_tuple(breakpoints))
        object.__setattr__(self, "pieces", tuple(_as_ctuple(p) for p in pieces))
        if lowest is None:
            lowest = (0,) * len(self.pieces)
        object.__setattr__(self, "lowest", tuple(int(k) for k in lowest))
        object.__setattr__(self, "tail", tuple((complex(c), int(p)) for c, p in tail))
        bp = self.breakpoints
        if len(bp) != len(self.pieces) or len(bp) != len(self.lowest):
            raise ValueError("need one coefficient list and lowest power per piece")
        if len(bp) == 0 or bp[0] <= 0 or any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing and positive")
        if any(p > -1 for _, p in self.tail):
            raise ValueError("tail powers must be <= -1 for an integrable tail")


@dataclass(frozen=True)
class TrigPoly:
    """sum_{|n|<=M} a_n exp(2*pi*i*n*x/period) on (0, period], or periodized."""
    period: float
    coeffs: tuple[complex, ...]  # length 2M+1, index n = -M..M
    periodic: bool = False

    def __init__(self, period, coeffs, periodic=False):
        object.__setattr__(self, "period", float(period))
        object.__setattr__(self, "coeffs", _as_ctuple(coeffs))
        object.__setattr__(self, "periodic", bool(periodic))
        if self.period <= 0:
            raise ValueError("period must be positive")
        if len(self.coeffs) % 2 != 1:
            raise ValueError("coeffs must have odd length 2M+1")

    @property
    def order(self) -> int:
        return (len(self.coeffs) - 1) // 2


@dataclass(frozen=True)
class Sampled:
    """Samples on a strictly increasing positive grid, pc or pl interpolation."""
    grid: tuple[float, ...]
    values: tuple[complex, ...]
    interpolation: str = "pl"

    def __init__(self, grid, values, interpolation="pl"):
        object.__setattr__(self, "grid", _as_tuple(grid))
        object.__setattr__(self, "values", _as_ctuple(values))
        object.__setattr__(self, "interpolation", str(interpolation))
        g = self.grid
        if len(g) < 2 or len(g) != len(self.values):
            raise ValueError("need at least two samples and matching values")
        if g[0] <= 0 or any(a >= b for a, b in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing and positive")
        if self.interpolation not in ("pc", "pl"):
            raise ValueError("interpolation must be 'pc' or 'pl'")


Symbol = Union[Step, PiecewisePoly, TrigPoly, Sampled]


# ---------------------------------------------------------------------------
# canonical lowering


def to_pieces(s: Symbol) -> list[Piece]:
    """Lower a symbol to exact (a, b, terms) pieces covering its support."""
    if isinstance(s, Step):
        prev = 0.0
        out: list[Piece] = []
        for x, v in zip(s.breakpoints, s.values):
            if v != 0:
                out.append((prev, x, ((complex(v), 0, 0.0),)))
            prev = x
        return out
    if isinstance(s, PiecewisePoly):
        prev = 0.0
        out = []
        for x, coeffs, k0 in zip(s.breakpoints, s.pieces, s.lowest):
            terms = merge_terms((c, k0 + j, 0.0) for j, c in enumerate(coeffs))
            if terms:
                out.append((prev, x, terms))
            prev = x
        if s.tail:
            terms = merge_terms((c, p, 0.0) for c, p in s.tail)
            if terms:
                out.append((prev, math.inf, terms))
        return out
    if isinstance(s, TrigPoly):
        M = s.order
        base = 2.0 * math.pi / s.period
        terms = merge_terms((a, 0, base * n)
                            for n, a in zip(range(-M, M + 1), s.coeffs))
        if not terms:
            return []
        if s.periodic:
            return [(0.0, math.inf, terms)]
        return [(0.0, s.period, terms)]
    if isinstance(s, Sampled):
        return to_pieces(_sampled_to_poly(s))
    raise TypeError(f"not a symbol: {s!r}")


def _sampled_to_poly(s: Sampled) -> Union[Step, PiecewisePoly]:
    g, v = s.grid, s.values
    if s.interpolation == "pc":
        # zero on (0, g0], then v_{i+1} on (g_i, g_{i+1}]
        return Step(g, (0.0,) + v[1:])
    pieces = [(0.0,)]
    lows = [0]
    for (x0, x1, y0, y1) in zip(g[:-1], g[1:], v[:-1], v[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append((y0 - slope * x0, slope))
        lows.append(0)
    return PiecewisePoly(g, pieces, lows)


def evaluate(s: Symbol, x):
    """Evaluate phi at x (scalar or array), honoring the piece conventions."""
    arr = np.asarray(x, dtype=float)
    out = eval_pieces(to_pieces(s), arr)
    if is_real_symbol(s):
        out = out.real
    if np.isscalar(x) or arr.ndim == 0:
        return out.item() if arr.ndim == 0 else out
    return out


def support(s: Symbol) -> Interval:
    pieces = to_pieces(s)
    if not pieces:
        return Interval(0.0, math.inf) if isinstance(s, TrigPoly) and s.periodic \
            else Interval(0.0, 1.0)
    return Interval(0.0, pieces[-1][1]) if pieces[0][0] == 0.0 else \
        Interval(pieces[0][0], pieces[-1][1])


def is_real_symbol(s: Symbol) -> bool:
    if isinstance(s, Step):
        return all(v.imag == 0 for v in s.values)
    if isinstance(s, PiecewisePoly):
        return all(c.imag == 0 for p in s.pieces for c in p) and \
            all(c.imag == 0 for c, _ in s.tail)
    if isinstance(s, TrigPoly):
        M = s.order
        return all(abs(s.coeffs[M + n] - np.conj(s.coeffs[M - n])) == 0
                   for n in range(M + 1))
    if isinstance(s, Sampled):
        return all(v.imag == 0 for v in s.values)
    raise TypeError(f"not a symbol: {s!r}")


# ---------------------------------------------------------------------------
# scaling phi_t(x) = t * phi(t x)


def scale(s: Symbol, t: float) -> Symbol:
    """Return the symbol of t*phi(t*x); spectra are invariant under it."""
    if t <= 0:
        raise ValueError("scale factor must be positive")
    if isinstance(s, Step):
        return Step([x / t for x in s.breakpoints], [t * v for v in s.values])
    if isinstance(s, PiecewisePoly):
        pieces = []
        for coeffs, k0 in zip(s.pieces, s.lowest):
            pieces.append(tuple(c * t ** (k0 + j + 1) for j, c in enumerate(coeffs)))
        tail = tuple((c * t ** (p + 1), p) for c, p in s.tail)
        return PiecewisePoly([x / t for x in s.breakpoints], pieces, s.lowest, tail)
    if isinstance(s, TrigPoly):
        return TrigPoly(s.period / t, [t * a for a in s.coeffs], s.periodic)
    if isinstance(s, Sampled):
        return Sampled([x / t for x in s.grid], [t * v for v in s.values],
                       s.interpolation)
    raise TypeError(f"not a symbol: {s!r}")


# ---------------------------------------------------------------------------
# variation


def _poly_real_roots(coeffs: Sequence[complex], lo: float, hi: float,
                     lowest: int) -> list[float]:
    """Real roots of sum c_j x^(lowest+j) inside (lo, hi)."""
    cs = np.asarray(coeffs, dtype=complex)
    if lowest < 0:
        # multiply by x^{-lowest}; roots in (0, inf) unchanged
        pass
    if len(cs) <= 1:
        return []
    poly = np.polynomial.Polynomial(cs.real if np.allclose(cs.imag, 0) else cs)
    roots = poly.roots()
    out = []
    for r in np.atleast_1d(roots):
        if abs(np.imag(r)) < 1e-12:
            rr = float(np.real(r))
            if lo < rr < hi:
                out.append(rr)
    return sorted(out)


def variation_tail(s: Symbol, x: float) -> float:
    """Total variation of phi over [x, inf), counting jump magnitudes.

    A jump exactly at x is included.  Periodically extended trigonometric
    symbols are rejected (their variation tail is never finite and the
    closed-form bookkeeping below does not apply).
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    if isinstance(s, Sampled):
        return variation_tail(_sampled_to_poly(s), x)
    if isinstance(s, TrigPoly) and s.periodic:
        raise ValueError(
            "variation is not defined for periodically extended symbols")

    pieces = to_pieces(s)
    total = 0.0
    # slope contribution, splitting at derivative sign changes where exact
    for a, b, terms in pieces:
        lo = max(a, x)
        if lo >= b:
            continue
        d = derivative_terms(terms)
        if not d:
            continue
        if all(w == 0.0 for _, _, w in d) and all(c.imag == 0 for c, _, _ in d):
            # real Laurent derivative: integrate |d| exactly between roots
            kmin = min(p for _, p, _ in d)
            shifted = [0.0] * (max(p for _, p, _ in d) - kmin + 1)
            for c, p, _ in d:
                shifted[p - kmin] = c.real
            hi = b if math.isfinite(b) else max(2 * lo, lo + 1) * 2 ** 40
            roots = _poly_real_roots(shifted, lo, hi, kmin)
            nodes = [lo] + roots + [b]
            for u, v in zip(nodes[:-1], nodes[1:]):
                if math.isinf(v):
                    try:
                        seg = integrate_terms_to_inf(d, u)
                    except ValueError:
                        return math.inf
                    total += abs(seg)
                else:
                    total += abs(integrate_terms(d, u, v).real)
        else:
            if math.isinf(b):
                return math.inf
            val, _ = quad(lambda u: abs(eval_terms(d, u)), lo, b, **{
                "epsabs": 1e-12, "epsrel": 1e-11, "limit": 400})
            total += val
    # jump contribution at piece boundaries >= x (left-limit vs right value)
    cuts = sorted({a for a, _, _ in pieces} | {b for _, b, _ in pieces
                                               if math.isfinite(b)})
    for c in cuts:
        if c < x or c == 0.0:
            continue
        left = complex(eval_pieces(pieces, np.array([c]))[0])
        right = _right_limit(pieces, c)
        total += abs(left - right)
    return total


def _right_limit(pieces, c: float) -> complex:
    for a, b, terms in pieces:
        if a == c:
            return complex(eval_terms(terms, np.array([c]))[0])
    return 0.0


def heart_transform(s: Symbol):
    """Logarithmic substitution t -> 2*phi(exp(2t))*exp(2t).

    Returns a plain callable; it exists to design exponentially graded
    grids, not for exact integration.
    """
    def f(t):
        t = np.asarray(t, dtype=float)
        x = np.exp(2.0 * t)
        return 2.0 * evaluate(s, x) * x
    return f


# ---------------------------------------------------------------------------
# continuity moduli


def modulus(s: Symbol, interval: Interval, h: float, p: float = 2,
            shifts: int = 64) -> float:
    """Continuity modulus of phi on an interval.

    p = inf: sup of |phi(x) - phi(y)| over |x - y| <= h (dense-grid
    lower-bound estimator with breakpoints included).
    p = 2: sup over 0 <= shift <= h of the L2 shift-difference norm on
    I cap (I - shift), each shift integral exact; the sup is taken over a
    geometric grid of ``shifts`` values plus the endpoint h.
    """
    if not interval.bounded:
        raise ValueError("modulus needs a bounded interval")
    if h <= 0:
        raise ValueError("h must be positive")
    a, b = interval.lo, interval.hi
    if p == math.inf:
        pieces = to_pieces(s)
        cuts = [c for aa, bb, _ in pieces for c in (aa, bb)
                if math.isfinite(c) and a <= c <= b]
        grid = np.unique(np.concatenate([np.linspace(a, b, 4097),
                                         np.asarray(cuts, dtype=float)]))
        # pieces are left-open, so phi is undefined at 0 itself; keeping the
        # point would fake a jump against phi(0+)
        grid = grid[grid > 0.0]
        vals = eval_pieces(pieces, grid)
        best = 0.0
        j0 = 0
        for i in range(len(grid)):
            while grid[i] - grid[j0] > h:
                j0 += 1
            window = vals[j0:i + 1]
            if len(window) > 1:
                best = max(best, float(np.max(np.abs(window - vals[i]))))
        return best
    if p != 2:
        raise ValueError("only p = 2 and p = inf moduli are implemented")
    svals = np.concatenate([h * 0.5 ** np.arange(shifts - 1, 0, -1), [h]])
    best = 0.0
    for sh in svals:
        best = max(best, math.sqrt(max(_shift_diff_sq(s, a, b, sh), 0.0)))
    return best


def _shift_diff_sq(s: Symbol, a: float, b: float, sh: float) -> float:
    """int_{[a, b-sh]} |phi(x+sh) - phi(x)|^2 dx, exact where possible."""
    hi = b - sh
    if hi <= a:
        return 0.0
    pieces = to_pieces(s)
    try:
        shifted = [(max(aa - sh, 0.0), bb - sh, shift_terms(t, sh))
                   for aa, bb, t in pieces if bb - sh > 0]
    except ValueError:
        val, _ = quad(lambda u: abs(eval_pieces(pieces, np.atleast_1d(u + sh))[0]
                                    - eval_pieces(pieces, np.atleast_1d(u))[0]) ** 2,
                      a, hi, limit=400, epsabs=1e-13)
        return val
    cuts = sorted({c for aa, bb, _ in pieces + shifted for c in (aa, bb)
                   if math.isfinite(c) and a < c < hi} | {a, hi})
    total = 0.0
    for lo, up in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + up)
        t1 = _terms_at_local(shifted, mid)
        t0 = _terms_at_local(pieces, mid)
        diff = merge_terms(list(t1) + [(-c, pp, w) for c, pp, w in t0])
        if diff:
            total += integrate_terms(abs2_terms(diff), lo, up).real
    return total


def _terms_at_local(pieces, x: float):
    for a, b, t in pieces:
        if a < x <= b or (a < x and math.isinf(b)):
            return t
    return ()


# ---------------------------------------------------------------------------
# helpers for the Sturm-Liouville module


def subtract_terminal(s: Symbol, interval: Interval) -> tuple[Symbol, complex]:
    """Subtract phi(hi) * chi_(0, hi] so the result vanishes at the right end.

    Returns (shifted symbol, subtracted constant).  The rank-one
    perturbation shifts each singular value index by at most one.
    """
    c = complex(np.asarray(evaluate(s, interval.hi)))
    if c == 0:
        return s, 0.0
    hi = interval.hi
    if isinstance(s, Step):
        bp = list(s.breakpoints)
        vals = list(s.values)
        if hi not in bp:
            if hi > bp[-1]:
                bp.append(hi)
                vals.append(0.0)
            else:
                i = next(i for i, x in enumerate(bp) if x > hi)
                bp.insert(i, hi)
                vals.insert(i, vals[i])
        return Step(bp, [v - c if x <= hi else v
                         for x, v in zip(bp, vals)]), c
    if isinstance(s, PiecewisePoly):
        bp = list(s.breakpoints)
        pieces = [list(p) for p in s.pieces]
        lows = list(s.lowest)
        if hi > bp[-1]:
            raise ValueError("interval end beyond compact support")
        if hi not in bp:
            i = next(i for i, x in enumerate(bp) if x > hi)
            bp.insert(i, hi)
            pieces.insert(i, pieces[i][:])
            lows.insert(i, lows[i])
        out_pieces = []
        out_lows = []
        for x, coeffs, k0 in zip(bp, pieces, lows):
            if x <= hi:
                cs = list(coeffs)
                if k0 > 0:
                    cs = [0.0] * k0 + cs
                    k0 = 0
                idx = -k0
                while len(cs) <= idx:
                    cs.append(0.0)
                cs[idx] = cs[idx] - c
                out_pieces.append(tuple(cs))
            else:
                out_pieces.append(tuple(coeffs))
            out_lows.append(k0)
        return PiecewisePoly(bp, out_pieces, out_lows, s.tail), c
    if isinstance(s, TrigPoly) and not s.periodic and s.period == hi:
        M = s.order
        coeffs = list(s.coeffs)
        coeffs[M] = coeffs[M] - c
        return TrigPoly(s.period, coeffs, False), c
    if isinstance(s, Sampled):
        shifted, cc = subtract_terminal(_sampled_to_poly(s), interval)
        return shifted, cc
    raise ValueError("cannot subtract terminal value for this symbol shape")


# ---------------------------------------------------------------------------
# JSON round trip


def _cplx_out(v: complex):
    return v.real if v.imag == 0 else [v.real, v.imag]


def _cplx_in(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def symbol_to_json(s: Symbol) -> str:
    if isinstance(s, Step):
        d = {"kind": "step", "breakpoints": list(s.breakpoints),
             "values": [_cplx_out(v) for v in s.values]}
    elif isinstance(s, PiecewisePoly):
        d = {"kind": "ppoly", "breakpoints": list(s.breakpoints),
             "pieces": [[_cplx_out(c) for c in p] for p in s.pieces]}
        if any(k != 0 for k in s.lowest):
            d["lowest"] = list(s.lowest)
        if s.tail:
            d["tail"] = [[_cplx_out(c), p] for c, p in s.tail]
    elif isinstance(s, TrigPoly):
        d = {"kind": "trig", "period": s.period,
             "coeffs": [_cplx_out(c) for c in s.coeffs],
             "periodic": s.periodic}
    elif isinstance(s, Sampled):
        d = {"kind": "sampled", "grid": list(s.grid),
             "values": [_cplx_out(v) for v in s.values],
             "interpolation": s.interpolation}
    else:
        raise TypeError(f"not a symbol: {s!r}")
    d["real"] = is_real_symbol(s)
    return json.dumps(d)


def symbol_from_json(text: str) -> Symbol:
    d = json.loads(text)
    kind = d.get("kind")
    if kind == "step":
        return Step(d["breakpoints"], [_cplx_in(v) for v in d["values"]])
    if kind == "ppoly":
        return PiecewisePoly(
            d["breakpoints"],
            [[_cplx_in(c) for c in p] for p in d["pieces"]],
            d.get("lowest"),
            [( _cplx_in(c), int(p)) for c, p in d.get("tail", [])])
    if kind == "trig":
        return TrigPoly(d["period"], [_cplx_in(c) for c in d["coeffs"]],
                        d.get("periodic", False))
    if kind == "sampled":
        return Sampled(d["grid"], [_cplx_in(v) for v in d["values"]],
                       d.get("interpolation", "pl"))
    raise ValueError(
        f"unknown symbol kind {kind!r} (expected step, ppoly, trig or sampled)")
