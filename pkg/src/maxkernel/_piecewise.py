"""Closed-form piece algebra shared by the public modules.

Every symbol lowers to a list of pieces ``(a, b, terms)`` covering its
support, with ``b = inf`` allowed for the last piece.  A term is a triple
``(coef, power, freq)`` representing ``coef * x**power * exp(1j*freq*x)``
with integer ``power`` (negative allowed) and real ``freq``.  This family
is closed under products and conjugation, which is what makes exact
L2 cell integrals, tail integrals and Fourier coefficients possible for
all four symbol variants.

Antiderivatives:
  * freq == 0: power rule (log at power == -1)
  * freq != 0, power >= 0: repeated integration by parts
  * freq != 0, power < 0: no elementary antiderivative; callers fall back
    to adaptive quadrature (only reachable through Fourier coefficients of
    Laurent pieces, which none of the standard constructions produce).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad

Term = tuple[complex, int, float]
Piece = tuple[float, float, tuple[Term, ...]]

_QUAD_KW = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


def conj_terms(terms: Sequence[Term]) -> tuple[Term, ...]:
    return tuple((np.conj(c), p, -w) for c, p, w in terms)


def merge_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    """Collect coefficients of identical (power, freq) monomials."""
    acc: dict[tuple[int, float], complex] = {}
    for c, p, w in terms:
        key = (p, w)
        acc[key] = acc.get(key, 0.0) + c
    return tuple((c, p, w) for (p, w), c in sorted(acc.items()) if c != 0)


def mul_terms(t1: Sequence[Term], t2: Sequence[Term]) -> tuple[Term, ...]:
    out = []
    for c1, p1, w1 in t1:
        for c2, p2, w2 in t2:
            out.append((c1 * c2, p1 + p2, w1 + w2))
    return merge_terms(out)


def abs2_terms(terms: Sequence[Term]) -> tuple[Term, ...]:
    return mul_terms(terms, conj_terms(terms))


def scale_terms(terms: Sequence[Term], alpha: complex) -> tuple[Term, ...]:
    return tuple((alpha * c, p, w) for c, p, w in terms)


def add_freq(terms: Sequence[Term], freq: float) -> tuple[Term, ...]:
    return tuple((c, p, w + freq) for c, p, w in terms)


def shift_terms(terms: Sequence[Term], s: float) -> tuple[Term, ...]:
    """Terms of x -> f(x + s).  Requires all powers >= 0."""
    out = []
    for c, p, w in terms:
        if p < 0:
            raise ValueError("cannot shift negative powers in closed form")
        phase = c * np.exp(1j * w * s) if w != 0.0 else c
        for j in range(p + 1):
            out.append((phase * math.comb(p, j) * s ** (p - j), j, w))
    return merge_terms(out)


def derivative_terms(terms: Sequence[Term]) -> tuple[Term, ...]:
    """Termwise derivative d/dx of sum c x^p e^{iwx}."""
    out = []
    for c, p, w in terms:
        if p != 0:
            out.append((c * p, p - 1, w))
        if w != 0.0:
            out.append((c * 1j * w, p, w))
    return merge_terms(out)


def eval_terms(terms: Sequence[Term], x):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for c, p, w in terms:
        v = c * x.astype(complex) ** p
        if w != 0.0:
            v = v * np.exp(1j * w * x)
        out += v
    return out


def _antideriv_term(c: complex, p: int, w: float, x):
    """Antiderivative of c x^p e^{iwx} evaluated at array x."""
    x = np.asarray(x, dtype=float)
    if w == 0.0:
        if p == -1:
            return c * np.log(x).astype(complex)
        return c * x.astype(complex) ** (p + 1) / (p + 1)
    if p < 0:
        raise _NoElementary()
    # integration by parts: int x^p e^{iwx} = e^{iwx} sum_j (-1)^j p!/(p-j)! x^{p-j} / (iw)^{j+1}
    iw = 1j * w
    coef = c / iw
    acc = np.full(x.shape, coef, dtype=complex) * x ** p
    for j in range(1, p + 1):
        coef = -coef * (p - j + 1) / iw
        acc += coef * x ** (p - j)
    return acc * np.exp(1j * w * x)


class _NoElementary(Exception):
    pass


def integrate_terms(terms: Sequence[Term], a: float, b: float) -> complex:
    """Exact integral over the finite interval [a, b], quad fallback."""
    if a == b:
        return 0.0
    try:
        tot = 0.0 + 0.0j
        for c, p, w in terms:
            fa, fb = _antideriv_term(c, p, w, np.array([a, b]))
            tot += fb - fa
        return complex(tot)
    except _NoElementary:
        re = quad(lambda x: eval_terms(terms, x).real, a, b, **_QUAD_KW)[0]
        im = quad(lambda x: eval_terms(terms, x).imag, a, b, **_QUAD_KW)[0]
        return complex(re, im)


def integrate_terms_nodes(terms: Sequence[Term], nodes: np.ndarray) -> np.ndarray:
    """Integrals over consecutive [nodes[i], nodes[i+1]] cells, vectorized.

    All nodes must lie inside one piece.  Falls back to per-cell quadrature
    only for the Laurent-times-exponential corner.
    """
    try:
        acc = np.zeros(len(nodes), dtype=complex)
        for c, p, w in terms:
            acc += _antideriv_term(c, p, w, nodes)
        return np.diff(acc)
    except _NoElementary:
        return np.array([integrate_terms(terms, a, b)
                         for a, b in zip(nodes[:-1], nodes[1:])])


def integrate_terms_to_inf(terms: Sequence[Term], a: float) -> complex:
    """Exact tail integral on [a, inf); requires pure decaying Laurent terms.

    Raises ValueError when any term fails power <= -2 with freq == 0 (the
    only shape the symbol constructors allow on unbounded pieces after
    squaring; freq != 0 or power >= -1 tails are non-integrable).
    """
    tot = 0.0 + 0.0j
    for c, p, w in terms:
        if c == 0:
            continue
        if w != 0.0 or p >= -1:
            raise ValueError("non-integrable tail on unbounded piece")
        tot += -c * a ** (p + 1) / (p + 1)
    return complex(tot)


def multiply_pieces(p1: Sequence[Piece], p2: Sequence[Piece]) -> list[Piece]:
    """Pointwise product of two piecewise term functions (common refinement)."""
    cuts = sorted({a for a, _, _ in p1} | {b for _, b, _ in p1 if math.isfinite(b)}
                  | {a for a, _, _ in p2} | {b for _, b, _ in p2 if math.isfinite(b)})
    out: list[Piece] = []
    ends = [b for _, b, _ in p1] + [b for _, b, _ in p2]
    top = max(ends)
    grid = cuts + ([math.inf] if math.isinf(top) else [])
    for lo, hi in zip(grid[:-1], grid[1:]):
        mid = lo * 2 if math.isinf(hi) else 0.5 * (lo + hi)
        t1 = _terms_at(p1, mid)
        t2 = _terms_at(p2, mid)
        if t1 and t2:
            prod = mul_terms(t1, t2)
            if prod:
                out.append((lo, hi, prod))
    return out


def _terms_at(pieces: Sequence[Piece], x: float) -> tuple[Term, ...]:
    for a, b, t in pieces:
        if a < x <= b or (a < x and math.isinf(b)):
            return t
    return ()


def eval_pieces(pieces: Sequence[Piece], x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for a, b, terms in pieces:
        m = (x > a) & (x <= b) if math.isfinite(b) else (x > a)
        if np.any(m):
            out[m] = eval_terms(terms, x[m])
    return out


def integrate_pieces(pieces: Sequence[Piece], a: float, b: float) -> complex:
    """Integral of a piecewise term function over [a, b] (b may be inf)."""
    tot = 0.0 + 0.0j
    for lo, hi, terms in pieces:
        l = max(a, lo)
        h = min(b, hi)
        if l >= h:
            continue
        if math.isinf(h):
            tot += integrate_terms_to_inf(terms, l)
        else:
            tot += integrate_terms(terms, l, h)
    return complex(tot)


def split_cells(nodes: np.ndarray, breakpoints: Sequence[float]) -> np.ndarray:
    """Union of grid nodes and breakpoints lying strictly inside the grid."""
    inner = [x for x in breakpoints if nodes[0] < x < nodes[-1]]
    return np.unique(np.concatenate([nodes, np.asarray(inner, dtype=float)]))
