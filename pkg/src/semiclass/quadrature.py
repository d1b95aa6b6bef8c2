"""Quadrature engine for the classical integrals.

All well integrals here have integrands (lam - v)^p with p = +-1/2, singular
or sqrt-kinked at the turning points.  Substituting x = x_pm -+ t^2 makes the
integrand smooth in t, after which plain Gauss-Legendre with order doubling
converges geometrically; the difference between the last two refinement
levels is the reported error estimate.  Interior singular points and piece
boundaries of the potential split the integration range.

Near t = 0 the ratio (lam - v)/t^2 is evaluated from the one-sided Taylor
model |v'| -+ (v''/2) t^2 instead of the cancellation-prone direct
difference; the crossover is far enough out that both branches agree to
~1e-10 relative.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .potential import Potential

__all__ = ["QuadratureError", "gl_adaptive", "well_integral", "forbidden_integral"]


class QuadratureError(RuntimeError):
    """Requested tolerance not reached at the maximum refinement level."""


@lru_cache(maxsize=32)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gl_adaptive(f, a: float, b: float, tol: float, n0: int = 16, n_max: int = 4096):
    """Integrate a vectorized callable on [a, b], doubling the order until
    two consecutive levels agree to tol (absolute).  Returns (value, error)."""
    if a == b:
        return 0.0, 0.0
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    prev = None
    n = n0
    while n <= n_max:
        xg, wg = _leggauss(n)
        val = half * float(np.dot(wg, f(mid + half * xg)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol:
                return val, err
        prev = val
        n *= 2
    raise QuadratureError(f"no convergence to tol={tol} by n={n_max} nodes on [{a}, {b}]")


def _segments(pot: Potential, lo: float, hi: float, extra_breaks=()):
    """Split [lo, hi] at interior piece boundaries and caller breakpoints."""
    cuts = {float(b) for b in extra_breaks if lo < b < hi}
    for p in pot.pieces[:-1]:
        if lo < p.hi < hi:
            cuts.add(p.hi)
    pts = [lo] + sorted(cuts) + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _sqrt_ratio(pot: Potential, lam: float, x0: float, inward: float, side: str):
    """Stable evaluator of r(t) = |lam - v(x0 + inward*t^2)| / t^2.

    x0 is a point with v(x0) = lam; inward is +-1.  Below the crossover the
    one-sided Taylor model r = |v'| - inward*sign(v')*(v''/2) t^2 is used.
    """
    _, d1, d2 = pot.eval(x0, side)
    slope = abs(d1)
    # r(t) = |v'| - eps*(v''/2) t^2 where eps = +1 when moving into the well
    # from a turning point, -1 when moving out (see module docstring).
    curv_sign = 1.0 if inward * d1 < 0 else -1.0
    t_c = 1.5e-3

    def ratio(t):
        x = x0 + inward * t * t
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.abs(lam - pot.value(x)) / (t * t)
        model = slope - curv_sign * 0.5 * d2 * t * t
        return np.where(t < t_c, model, direct)

    return ratio


def well_integral(pot: Potential, lam: float, power: float, lo: float, hi: float,
                  sqrt_lo: bool = False, sqrt_hi: bool = False, tol: float = 1e-10,
                  weight=None, weight_breaks=()):
    """Integral of w(x) (lam - v(x))^power over [lo, hi] inside the well.

    sqrt_lo / sqrt_hi declare that the corresponding endpoint is a turning
    point (lam - v vanishes linearly there); the touching segment then uses
    the x = endpoint -+ t^2 substitution.  Returns (value, error_estimate).
    """
    if hi < lo:
        raise ValueError("hi < lo in well_integral")

    def wfac(x):
        return np.asarray(weight(x), dtype=float) if weight is not None else 1.0

    breaks = set(weight_breaks)
    if sqrt_lo and sqrt_hi:
        breaks.add(0.5 * (lo + hi))  # never desingularize both ends of one segment
    segs = _segments(pot, lo, hi, breaks)

    def plain(x):
        g = lam - pot.value(x)
        return g**power * wfac(x)

    total = 0.0
    err = 0.0
    for a, b in segs:
        seg_tol = tol / len(segs)
        if sqrt_hi and b == hi:
            ratio = _sqrt_ratio(pot, lam, hi, -1.0, "-")
            f = lambda t: 2.0 * t ** (1.0 + 2.0 * power) * ratio(t) ** power * wfac(hi - t * t)
            v, e = gl_adaptive(f, 0.0, np.sqrt(hi - a), seg_tol)
        elif sqrt_lo and a == lo:
            ratio = _sqrt_ratio(pot, lam, lo, +1.0, "+")
            f = lambda t: 2.0 * t ** (1.0 + 2.0 * power) * ratio(t) ** power * wfac(lo + t * t)
            v, e = gl_adaptive(f, 0.0, np.sqrt(b - lo), seg_tol)
        else:
            v, e = gl_adaptive(plain, a, b, seg_tol)
        total += v
        err += e
    return total, err


def forbidden_integral(pot: Potential, lam: float, x_turn: float, x: float,
                       tol: float = 1e-10):
    """Integral of (v - lam)^(1/2) between a turning point and an outside x.

    Works on either flank: x > x_turn (right of x_plus) or x < x_turn (left
    of x_minus).  Returns (value, error_estimate); the value is >= 0.
    """
    if x == x_turn:
        return 0.0, 0.0
    outward = 1.0 if x > x_turn else -1.0
    lo, hi = (x_turn, x) if outward > 0 else (x, x_turn)
    cuts = [p.hi for p in pot.pieces[:-1] if lo < p.hi < hi]
    if outward > 0:
        first_end = min(cuts) if cuts else hi
        rest_lo, rest_hi = first_end, hi
    else:
        first_end = max(cuts) if cuts else lo
        rest_lo, rest_hi = lo, first_end

    ratio = _sqrt_ratio(pot, lam, x_turn, outward, "+" if outward > 0 else "-")
    f = lambda t: 2.0 * t * t * np.sqrt(ratio(t))
    total, err = gl_adaptive(f, 0.0, np.sqrt(abs(first_end - x_turn)), tol)

    def plain(xx):
        return np.sqrt(np.maximum(pot.value(xx) - lam, 0.0))

    for a, b in _segments(pot, rest_lo, rest_hi):
        v, e = gl_adaptive(plain, a, b, tol)
        total += v
        err += e
    return total, err
