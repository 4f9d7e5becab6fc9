"""Eigenvalues of the max-kernel operator through a Sturm-Liouville shooting
method.

For real nonincreasing phi on (0, b] with phi(b) = 0, the eigenvalue problem
lambda f = phi(x) int_0^x f + int_x^b phi f differentiates into the system

    G' = g,    g' = omega^2 phi'(x) G,    omega = lambda^(-1/2),

with f = g, G(0) = 0 and g(b) = 0.  In Prufer form the angle obeys

    theta' = omega * (cos^2 theta - phi'(x) sin^2 theta),    theta(0) = 0,

and theta(b) is strictly increasing in omega, so the n-th eigenvalue is the
root of theta(b; omega) = (n + 1/2) pi.  On segments where phi' is constant
both the angle and the (G, g) flow have closed forms (used whenever the
symbol is piecewise linear); otherwise the angle is integrated with DOP853
at local tolerance 1e-11, breakpoints taken as mandatory nodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import polygamma

from ._piecewise import derivative_terms, eval_terms
from .classify import (_laurent_roots, _piece_value_range, _real_w0_terms,
                       _right_value, canonical_step)
from .symbols import Symbol, evaluate, is_real_symbol, support, to_pieces

__all__ = [
    "PruferRun", "EigenResult", "prufer_theta", "eigenvalues", "shoot",
    "asymptotic_constant", "sl_residual", "sum_with_tail",
]

_RTOL, _ATOL = 1e-12, 1e-13
# The angle grows like omega * b, so hitting the 1e-10 convergence window
# below needs local error well under rtol * theta_end; the angle ODE gets
# tighter tolerances than the (G, g) flow for that reason.
_RTOL_ANGLE, _ATOL_ANGLE = 1e-13, 1e-14
_THETA_TOL = 1e-10


@dataclass(frozen=True)
class PruferRun:
    omega: float
    theta_end: float
    method: str  # "closed-form" | "dop853"
    segments: int


@dataclass(frozen=True)
class EigenResult:
    n: int
    omega: float
    lam: float
    boundary_residual: float

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "omega": self.omega,
                           "lambda": self.lam,
                           "residual": self.boundary_residual})


class _Problem:
    """Validated shooting problem: slope segments covering (0, b]."""

    def __init__(self, b, segments, slopes):
        self.b = b
        self.segments = segments      # [(x0, x1, derivative terms)]
        self.slopes = slopes          # [-phi' per segment] or None (ODE route)
        self.dfuns = [_scalar_slope(dt) for _, _, dt in segments]

    @property
    def closed_form(self) -> bool:
        return self.slopes is not None


def _scalar_slope(dt):
    """Fast scalar phi'(x) for one segment; None when phi is flat there."""
    if not dt:
        return None
    w0 = _real_w0_terms(dt)
    if w0 is not None and all(p >= 0 for _, p in w0):
        coef = [0.0] * (max(p for _, p in w0) + 1)
        for c, p in w0:
            coef[p] += c

        def dp(x, coef=tuple(reversed(coef))):
            r = 0.0
            for c in coef:
                r = r * x + c
            return r

        return dp
    return lambda x: float(np.real(eval_terms(dt, np.array([x]))[0]))


def _validate(s: Symbol, need_root_at_b: bool) -> _Problem:
    if not is_real_symbol(s):
        raise ValueError("shooting needs a real symbol")
    sup = support(s)
    if not sup.bounded:
        raise ValueError("shooting needs bounded support")
    b = sup.hi
    pieces = to_pieces(s)
    scale = max((max(abs(complex(c)) for c, _, _ in t) for _, _, t in pieces),
                default=0.0)
    if scale == 0.0:
        raise ValueError("symbol vanishes identically")
    slack = 1e-9 * max(scale, 1.0)
    # continuity at every cut, and phi(0+) finite
    cuts = sorted({c for a, bb, _ in pieces for c in (a, bb) if c < b})
    for c in cuts:
        left = float(evaluate(s, c)) if c > 0 else _right_value(pieces, 0.0)
        right = _right_value(pieces, c)
        if c == 0.0:
            if not math.isfinite(right):
                raise ValueError("not-smooth-enough: phi blows up at 0")
            continue
        if abs(left - right) > slack:
            raise ValueError(f"not-smooth-enough: jump at x = {c}")
    if need_root_at_b and abs(float(evaluate(s, b))) > 1e-12 * scale:
        raise ValueError(
            "phi must vanish at the right end of its support; subtract the "
            "terminal value first (symbols.subtract_terminal)")
    # slope segments with gap fill
    segs = []
    prev = 0.0
    for a, bb, terms in pieces:
        if a > prev:
            segs.append((prev, a, ()))
        segs.append((a, bb, derivative_terms(terms)))
        prev = bb
    if prev < b:  # cannot happen for sorted pieces, kept for safety
        segs.append((prev, b, ()))
    slopes: Optional[list[float]] = []
    for x0, x1, dt in segs:
        if not dt:
            if slopes is not None:
                slopes.append(0.0)
            continue
        mn, mx = _piece_value_range(dt, x0, x1)
        if not (math.isfinite(mn) and math.isfinite(mx)):
            raise ValueError("not-smooth-enough: unbounded slope")
        if mx > slack:
            raise ValueError(
                f"positive-derivative-detected on ({x0}, {x1})")
        w0 = _real_w0_terms(dt)
        if slopes is not None and w0 is not None and \
                all(p == 0 for _, p in w0):
            slopes.append(-sum(c for c, _ in w0))
        else:
            slopes = None
    return _Problem(b, segs, slopes)


# ---------------------------------------------------------------------------
# angle transfer


def _advance_flat(theta: np.ndarray, wdx: np.ndarray) -> np.ndarray:
    """theta' = w cos^2 theta over a segment: tan advances linearly."""
    k = np.floor((theta + 0.5 * math.pi) / math.pi)
    tf = theta - k * math.pi
    c, sn = np.cos(tf), np.sin(tf)
    out = k * math.pi + np.arctan2(sn + wdx * c, c)
    return np.where(np.abs(c) < 1e-300, theta, out)


def _advance_slope(theta: np.ndarray, mu_dx: np.ndarray, c: float
                   ) -> np.ndarray:
    """theta' = w (cos^2 + c sin^2), c > 0: the stretched angle
    psi = atan2(sqrt(c) sin theta, cos theta) advances by sqrt(c) w dx."""
    rc = math.sqrt(c)
    k = np.floor(theta / math.pi)
    tf = theta - k * math.pi
    psi = k * math.pi + np.arctan2(rc * np.sin(tf), np.cos(tf)) + mu_dx
    k2 = np.floor(psi / math.pi)
    pf = psi - k2 * math.pi
    return k2 * math.pi + np.arctan2(np.sin(pf), rc * np.cos(pf))


def _theta_end(prob: _Problem, omegas: np.ndarray) -> np.ndarray:
    th = np.zeros_like(omegas)
    if prob.closed_form:
        for (x0, x1, _), c in zip(prob.segments, prob.slopes):
            dx = x1 - x0
            if c <= 0.0:
                th = _advance_flat(th, omegas * dx)
            else:
                th = _advance_slope(th, math.sqrt(c) * omegas * dx, c)
        return th
    return _theta_end_ode(prob, omegas, with_derivative=False)[0]


def _theta_end_ode(prob: _Problem, omegas: np.ndarray, with_derivative: bool):
    """Terminal angle, optionally with its omega-derivative (variational
    equation v' = dF/dtheta v + F/omega, v(0) = 0), integrated together."""
    m = len(omegas)
    th = np.zeros(m)
    v = np.zeros(m)
    for (x0, x1, _), dp in zip(prob.segments, prob.dfuns):
        if dp is None:
            if with_derivative:
                # v' = -omega sin(2 theta) v + theta'/omega on flat parts;
                # cheaper to integrate than to differentiate the closed form
                def rhs(x, y):
                    t, vv = y[:m], y[m:]
                    s2 = np.sin(t) ** 2
                    f = omegas * (1.0 - s2)
                    return np.concatenate([
                        f, -omegas * np.sin(2.0 * t) * vv + f / omegas])
            else:
                th = _advance_flat(th, omegas * (x1 - x0))
                continue
        else:
            if with_derivative:
                def rhs(x, y, dp=dp):
                    d = dp(x)
                    t, vv = y[:m], y[m:]
                    c2 = np.cos(t) ** 2
                    f = omegas * (c2 - d * (1.0 - c2))
                    dfdt = -omegas * np.sin(2.0 * t) * (1.0 + d)
                    return np.concatenate([f, dfdt * vv + f / omegas])
            else:
                def rhs(x, y, dp=dp):
                    d = dp(x)
                    c2 = np.cos(y) ** 2
                    return omegas * (c2 - d * (1.0 - c2))
        y0 = np.concatenate([th, v]) if with_derivative else th
        sol = solve_ivp(rhs, (x0, x1), y0, method="DOP853",
                        rtol=_RTOL_ANGLE, atol=_ATOL_ANGLE)
        if not sol.success:
            raise RuntimeError(f"angle integration failed: {sol.message}")
        if with_derivative:
            th, v = sol.y[:m, -1], sol.y[m:, -1]
        else:
            th = sol.y[:, -1]
    return th, v


def prufer_theta(s: Symbol, omega: float) -> PruferRun:
    """Terminal Prufer angle theta(b; omega) with theta(0) = 0."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    prob = _validate(s, need_root_at_b=False)
    th = _theta_end(prob, np.array([float(omega)]))
    method = "closed-form" if prob.closed_form else "dop853"
    return PruferRun(float(omega), float(th[0]), method, len(prob.segments))


# ---------------------------------------------------------------------------
# (G, g) flow, for boundary residuals and callers that want eigenfunctions


def _flow_samples(prob: _Problem, omegas: np.ndarray, xs: np.ndarray):
    """G and g at sorted sample points xs, shape (len(xs), len(omegas))."""
    m = len(omegas)
    G = np.zeros((len(xs), m))
    g = np.zeros((len(xs), m))
    G0 = np.zeros(m)
    g0 = np.ones(m)
    if prob.closed_form:
        for (x0, x1, _), c in zip(prob.segments, prob.slopes):
            sel = (xs > x0) & (xs <= x1) if x0 > 0 else (xs >= 0) & (xs <= x1)
            d = xs[sel, None] - x0
            if c <= 0.0:
                G[sel] = G0 + g0 * d
                g[sel] = np.broadcast_to(g0, (int(sel.sum()), m))
            else:
                mu = math.sqrt(c) * omegas
                G[sel] = G0 * np.cos(mu * d) + (g0 / mu) * np.sin(mu * d)
                g[sel] = -G0 * mu * np.sin(mu * d) + g0 * np.cos(mu * d)
            dseg = x1 - x0
            if c <= 0.0:
                G0, g0 = G0 + g0 * dseg, g0
            else:
                mu = math.sqrt(c) * omegas
                G0, g0 = (G0 * np.cos(mu * dseg) + (g0 / mu) * np.sin(mu * dseg),
                          -G0 * mu * np.sin(mu * dseg) + g0 * np.cos(mu * dseg))
        return G, g
    y = np.concatenate([G0, g0])
    for x0, x1, dt in prob.segments:

        def rhs(x, y, dt=dt):
            dp = float(np.real(eval_terms(dt, np.array([x]))[0])) if dt else 0.0
            return np.concatenate([y[m:], (omegas ** 2 * dp) * y[:m]])

        sol = solve_ivp(rhs, (x0, x1), y, method="DOP853",
                        rtol=_RTOL, atol=_ATOL, dense_output=True)
        if not sol.success:
            raise RuntimeError(f"flow integration failed: {sol.message}")
        sel = (xs > x0) & (xs <= x1) if x0 > 0 else (xs >= 0) & (xs <= x1)
        if sel.any():
            vals = sol.sol(xs[sel])
            G[sel] = vals[:m].T
            g[sel] = vals[m:].T
        y = sol.y[:, -1]
    return G, g


def shoot(s: Symbol, omega: float, xs) -> tuple[np.ndarray, np.ndarray]:
    """Sample the shooting solution (G, g) with G(0) = 0, g(0) = 1 at xs."""
    prob = _validate(s, need_root_at_b=False)
    xs = np.asarray(xs, dtype=float)
    G, g = _flow_samples(prob, np.array([float(omega)]), xs)
    return G[:, 0], g[:, 0]


def _boundary_residuals(s: Symbol, prob: _Problem, omegas: np.ndarray
                        ) -> np.ndarray:
    """max over x in {0, b/2, b} of
    |phi(x) G(x) + int_x^b phi g - lambda g(x)| / (lambda max|g|)."""
    b = prob.b
    cuts = sorted({x0 for x0, _, _ in prob.segments}
                  | {x1 for _, x1, _ in prob.segments} | {0.0, 0.5 * b, b})
    panels = max(64, int(math.ceil(2.0 * float(np.max(omegas)) * b / math.pi)))
    bounds = np.unique(np.concatenate([np.asarray(cuts),
                                       np.linspace(0.0, b, panels + 1)]))
    gx, gw = np.polynomial.legendre.leggauss(12)
    mid = 0.5 * (bounds[:-1] + bounds[1:])
    half = 0.5 * np.diff(bounds)
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    _, gvals = _flow_samples(prob, omegas, nodes)
    phi = np.real(np.asarray(evaluate(s, nodes), dtype=complex))
    seg_int = ((phi[:, None] * gvals).reshape(len(mid), 12, -1)
               * (half[:, None] * gw[None, :])[..., None]).sum(axis=1)
    # suffix sums give int_{bounds[i]}^b phi g
    suffix = np.vstack([np.cumsum(seg_int[::-1], axis=0)[::-1],
                        np.zeros((1, len(omegas)))])
    checkpoints = np.array([0.0, 0.5 * b, b])
    Gc, gc = _flow_samples(prob, omegas, checkpoints)
    phic = np.real(np.asarray(evaluate(s, checkpoints), dtype=complex))
    idx = np.searchsorted(bounds, checkpoints)
    lam = omegas ** -2.0
    gmax = np.maximum(np.max(np.abs(gvals), axis=0), 1e-300)
    resid = np.abs(phic[:, None] * Gc + suffix[idx] - lam[None, :] * gc)
    return np.max(resid, axis=0) / (lam * gmax)


# ---------------------------------------------------------------------------
# eigenvalues


def _slope_length(prob: _Problem) -> float:
    """int_0^b sqrt(max(-phi', 0)), the WKB phase length."""
    if prob.closed_form:
        return sum(math.sqrt(c) * (x1 - x0)
                   for (x0, x1, _), c in zip(prob.segments, prob.slopes)
                   if c > 0.0)
    total = 0.0
    for x0, x1, dt in prob.segments:
        if not dt:
            continue
        w0 = _real_w0_terms(dt)
        pts = _laurent_roots(w0, x0, x1) if w0 else None

        def f(x, dt=dt):
            v = float(np.real(eval_terms(dt, np.array([x]))[0]))
            return math.sqrt(max(-v, 0.0))

        val, _ = quad(f, x0, x1, points=pts, limit=200, epsabs=1e-13,
                      epsrel=1e-12)
        total += val
    return total


def _roots_secant(prob: _Problem, targets: np.ndarray) -> np.ndarray:
    """Bracketed secant on the closed-form angle, one target per component."""
    K = len(targets)
    w = targets / _slope_length(prob)
    lo, hi = w * 0.5, w * 1.5
    flo = _theta_end(prob, lo) - targets
    for _ in range(80):
        bad = flo > 0
        if not bad.any():
            break
        lo[bad] *= 0.5
        flo[bad] = _theta_end(prob, lo[bad]) - targets[bad]
    else:
        raise RuntimeError("could not bracket from below")
    fhi = _theta_end(prob, hi) - targets
    for _ in range(80):
        bad = fhi < 0
        if not bad.any():
            break
        hi[bad] *= 2.0
        fhi[bad] = _theta_end(prob, hi[bad]) - targets[bad]
    else:
        raise RuntimeError("could not bracket from above")
    active = np.ones(K, dtype=bool)
    root = 0.5 * (lo + hi)
    for _ in range(200):
        mid = hi - fhi * (hi - lo) / (fhi - flo)
        stuck = ~np.isfinite(mid) | (mid <= lo) | (mid >= hi)
        mid[stuck] = 0.5 * (lo + hi)[stuck]
        fmid = np.full(K, np.nan)
        fmid[active] = _theta_end(prob, mid[active]) - targets[active]
        root[active] = mid[active]
        active &= ~(np.abs(fmid) < _THETA_TOL)
        if not active.any():
            return root
        up = active & (fmid < 0)
        dn = active & (fmid >= 0)
        lo[up], flo[up] = mid[up], fmid[up]
        hi[dn], fhi[dn] = mid[dn], fmid[dn]
    raise RuntimeError("angle root search did not converge")


def _roots_newton(prob: _Problem, targets: np.ndarray) -> np.ndarray:
    """Newton iteration through the variational equation, with lazily
    discovered brackets as a monotonicity safeguard."""
    K = len(targets)
    w = targets / _slope_length(prob)
    root = w.copy()
    lo = np.zeros(K)
    hi = np.full(K, math.inf)
    active = np.ones(K, dtype=bool)
    for _ in range(80):
        idx = np.flatnonzero(active)
        th, dth = _theta_end_ode(prob, w[idx], with_derivative=True)
        f = th - targets[idx]
        root[idx] = w[idx]
        below = idx[f < 0]
        above = idx[f >= 0]
        lo[below] = np.maximum(lo[below], w[below])
        hi[above] = np.minimum(hi[above], w[above])
        conv = np.abs(f) < _THETA_TOL
        active[idx[conv]] = False
        rest = idx[~conv]
        if rest.size == 0:
            return root
        nxt = w[rest] - f[~conv] / np.maximum(dth[~conv], 1e-300)
        nxt = np.clip(nxt, 0.25 * w[rest], 4.0 * w[rest])
        bad = ~np.isfinite(nxt) | (nxt <= lo[rest]) | (nxt >= hi[rest])
        fallback = np.where(np.isfinite(hi[rest]),
                            0.5 * (lo[rest] + hi[rest]),
                            2.0 * np.maximum(w[rest], lo[rest]))
        w[rest] = np.where(bad, fallback, nxt)
    raise RuntimeError("angle root search did not converge")


def eigenvalues(s: Symbol, K: int) -> list[EigenResult]:
    """First K eigenvalues by monotone shooting on the Prufer angle.

    Each omega_n solves theta(b; omega) = (n + 1/2) pi to absolute accuracy
    1e-10 in the angle; lambda_n = omega_n^(-2).  The reported residual
    checks the original integral equation at x in {0, b/2, b}.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    prob = _validate(s, need_root_at_b=True)
    targets = (np.arange(K) + 0.5) * math.pi
    L = _slope_length(prob)
    if L <= 0.0:
        raise ValueError("phi has no decreasing part; spectrum is degenerate")
    if prob.closed_form:
        root = _roots_secant(prob, targets)
    else:
        root = _roots_newton(prob, targets)
    resid = _boundary_residuals(s, prob, root)
    return [EigenResult(n, float(root[n]), float(root[n] ** -2.0),
                        float(resid[n])) for n in range(K)]


def asymptotic_constant(s: Symbol) -> float:
    """Limit of n^2 lambda_n: pi^(-2) (int |phi'|^(1/2))^2; 0 for steps."""
    if canonical_step(s) is not None or not to_pieces(s):
        return 0.0
    if not is_real_symbol(s):
        raise ValueError("asymptotics need a real symbol")
    total = 0.0
    for a, b, terms in to_pieces(s):
        dt = derivative_terms(terms)
        if not dt:
            continue
        w0 = _real_w0_terms(dt)
        if w0 is not None:
            q = min(p for _, p in w0)
            if a == 0.0 and q <= -2:
                raise ValueError("slope is not square-root integrable at 0")
            if math.isinf(b) and max(p for _, p in w0) >= -2:
                raise ValueError("slope is not square-root integrable at inf")
        pts = _laurent_roots(w0, a, b) if w0 else None

        def f(x, dt=dt):
            return math.sqrt(abs(float(np.real(
                eval_terms(dt, np.array([x]))[0]))))

        if math.isinf(b):
            val, _ = quad(f, a, np.inf, limit=400, epsabs=1e-13, epsrel=1e-12)
        else:
            val, _ = quad(f, a, b, points=pts, limit=200, epsabs=1e-13,
                          epsrel=1e-12)
        total += val
    return (total / math.pi) ** 2


def sl_residual(s: Symbol, lam: float, xs, Gs) -> float:
    """Differencing check of lambda G'' = phi' G on sampled data.

    Uses centered 3-point second differences on a uniform grid, skipping
    points within one cell of a breakpoint of phi.
    """
    xs = np.asarray(xs, dtype=float)
    Gs = np.asarray(Gs, dtype=float)
    if len(xs) < 5 or len(xs) != len(Gs):
        raise ValueError("need at least five matched samples")
    h = xs[1] - xs[0]
    if not np.allclose(np.diff(xs), h, rtol=1e-9, atol=0.0):
        raise ValueError("samples must be uniformly spaced")
    gmax = float(np.max(np.abs(Gs)))
    if gmax == 0.0:
        raise ValueError("degenerate sample: G vanishes identically")
    cuts = sorted({c for a, b, _ in to_pieces(s) for c in (a, b)
                   if math.isfinite(c)})
    d2 = (Gs[2:] - 2.0 * Gs[1:-1] + Gs[:-2]) / (h * h)
    xin = xs[1:-1]
    keep = np.ones(len(xin), dtype=bool)
    for c in cuts:
        keep &= np.abs(xin - c) > 1.5 * h
    if not keep.any():
        raise ValueError("no interior points clear of breakpoints")
    dphi = np.empty(len(xin))
    for i, x in enumerate(xin):
        for a, b, terms in to_pieces(s):
            if a < x <= b:
                dt = derivative_terms(terms)
                dphi[i] = float(np.real(eval_terms(dt, np.array([x]))[0])) \
                    if dt else 0.0
                break
        else:
            dphi[i] = 0.0
    resid = np.abs(lam * d2 - dphi * Gs[1:-1])[keep]
    scale = max(abs(lam) / (h * h), float(np.max(np.abs(dphi)))) * gmax
    return float(np.max(resid) / scale)


def sum_with_tail(s: Symbol, K: int = 200, fit_block: int = 50,
                  precomputed=None) -> tuple[float, dict]:
    """sum_n lambda_n estimated from K computed eigenvalues plus a fitted
    polygamma tail; converges to the trace int phi for nonincreasing phi.

    The tail fits lambda_n = A u^2 + B u^3 with u = 1/(n + 1/2) on the last
    fit_block indices, then sums both powers in closed form.  precomputed
    accepts an EigenResult list from an earlier eigenvalues() call (at least
    K entries) to avoid re-solving.
    """
    res = list(precomputed)[:K] if precomputed is not None \
        else eigenvalues(s, K)
    if len(res) < K:
        raise ValueError(f"need {K} precomputed eigenvalues, got {len(res)}")
    lam = np.array([r.lam for r in res])
    n = np.arange(K)
    u = 1.0 / (n + 0.5)
    blk = slice(K - fit_block, K)
    A_mat = np.stack([u[blk] ** 2, u[blk] ** 3], axis=1)
    (A, B), *_ = np.linalg.lstsq(A_mat, lam[blk], rcond=None)
    tail = A * float(polygamma(1, K + 0.5)) \
        - 0.5 * B * float(polygamma(2, K + 0.5))
    return float(lam.sum() + tail), {
        "partial_sum": float(lam.sum()), "tail": float(tail),
        "A": float(A), "B": float(B),
        "max_boundary_residual": max(r.boundary_residual for r in res)}
