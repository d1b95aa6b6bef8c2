"""Evaluation of the Airy functions Ai, Bi and their derivatives on the real line.

The evaluator is self-contained.  On a core interval the four values are
obtained from Taylor series of the defining equation -w'' + t w = 0,
recentred on a precomputed grid of nodes; the node table itself is built once
at import time by marching the same Taylor recurrence along the grid
(downward for Ai, so the decaying solution is tracked stably, upward and
downward for Bi).  Outside the core interval the standard exponential and
oscillatory asymptotic expansions take over; at the switch points both
branches agree to ~1e-14.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AiryValues",
    "ScaledAiry",
    "airy_eval",
    "airy_many",
    "airy_scaled",
    "AI_ZERO",
    "AIP_ZERO",
    "BI_ZERO",
    "BIP_ZERO",
    "T_SWITCH_PLUS",
    "T_SWITCH_MINUS",
]

# Values at t=0: Ai(0)=3^(-2/3)/Gamma(2/3) and friends, to full double precision.
AI_ZERO = 0.3550280538878172
AIP_ZERO = -0.2588194037928068
BI_ZERO = 0.6149266274460007
BIP_ZERO = 0.4482883573538264

# Handoff points between the grid-Taylor core and the asymptotic expansions.
# Beyond T_SWITCH_PLUS the exponential expansions are converged below 1e-16
# at optimal truncation; below T_SWITCH_MINUS the oscillatory ones are.
T_SWITCH_PLUS = 12.0
T_SWITCH_MINUS = -32.0

_GRID_STEP = 0.25
_EVAL_TERMS = 26  # local Taylor degree used per evaluation (|delta| <= step/2)
_MARCH_TERMS = 34  # degree used for the import-time march (delta = step)
_ASYM_TERMS = 20


@dataclass(frozen=True)
class AiryValues:
    """Ai, Bi and derivatives at one point, plus the evaluation branch used."""

    ai: float
    ai_prime: float
    bi: float
    bi_prime: float
    method_tag: str  # "series" | "asymptotic-plus" | "asymptotic-minus"


@dataclass(frozen=True)
class ScaledAiry:
    """Exponentially rescaled values: ai*e^{+z}, bi*e^{-z} with z = 2t^(3/2)/3."""

    ai: float
    ai_prime: float
    bi: float
    bi_prime: float
    exponent: float


def _asym_coeffs(count: int) -> tuple[np.ndarray, np.ndarray]:
    # u_k, v_k of the standard large-|t| expansions; v_k = -(6k+1)/(6k-1) u_k.
    u = np.empty(count)
    v = np.empty(count)
    u[0] = 1.0
    v[0] = 1.0
    for k in range(1, count):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -u[k] * (6 * k + 1) / (6 * k - 1)
    return u, v


_U, _V = _asym_coeffs(_ASYM_TERMS + 4)


def _taylor_pair(t0, w, wp, delta, terms):
    """Advance w, w' of -w''+tw=0 from t0 to t0+delta by recentred Taylor series.

    Works elementwise on arrays (t0, w, wp, delta may be broadcastable arrays).
    """
    t0 = np.asarray(t0, dtype=float)
    shape = np.broadcast(t0, w, wp, delta).shape
    a = np.zeros((terms + 1,) + shape)
    a[0] = w
    a[1] = wp
    for k in range(terms - 1):
        prev = a[k - 1] if k >= 1 else 0.0
        a[k + 2] = (t0 * a[k] + prev) / ((k + 2) * (k + 1))
    val = a[terms].copy()
    for k in range(terms - 1, -1, -1):
        val = val * delta + a[k]
    der = terms * a[terms]
    for k in range(terms - 1, 0, -1):
        der = der * delta + k * a[k]
    return val, der


def _asym_plus_scaled(t):
    """Series factors of the t->+inf expansions, with exponentials removed.

    Returns (ai*e^{z}, ai'*e^{z}, bi*e^{-z}, bi'*e^{-z}, z), z = 2 t^(3/2)/3.
    """
    t = np.asarray(t, dtype=float)
    z = 2.0 / 3.0 * t**1.5
    zk = np.ones_like(z)
    su = np.zeros_like(z)
    sv = np.zeros_like(z)
    sbu = np.zeros_like(z)
    sbv = np.zeros_like(z)
    sign = 1.0
    for k in range(_ASYM_TERMS):
        su += sign * _U[k] * zk
        sv += sign * _V[k] * zk
        sbu += _U[k] * zk
        sbv += _V[k] * zk
        zk = zk / z
        sign = -sign
    pref = 0.5 / np.sqrt(np.pi)
    tq = t**0.25
    ai_s = pref / tq * su
    aip_s = -pref * tq * sv
    bi_s = 2.0 * pref / tq * sbu
    bip_s = 2.0 * pref * tq * sbv
    return ai_s, aip_s, bi_s, bip_s, z


def _asym_minus(t):
    """Oscillatory expansions for t <= T_SWITCH_MINUS."""
    s = -np.asarray(t, dtype=float)
    z = 2.0 / 3.0 * s**1.5
    # P,Q carry the even/odd u-coefficients, R,S the v-coefficients.
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    r = np.zeros_like(z)
    w = np.zeros_like(z)
    zk = np.ones_like(z)
    for k in range(_ASYM_TERMS):
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sgn * _U[k] * zk
            r += sgn * _V[k] * zk
        else:
            q += sgn * _U[k] * zk
            w += sgn * _V[k] * zk
        zk = zk / z
    c = np.cos(z + 0.25 * np.pi)
    sn = np.sin(z + 0.25 * np.pi)
    pref = 1.0 / np.sqrt(np.pi)
    sq = s**0.25
    ai = pref / sq * (sn * p - c * q)
    bi = pref / sq * (c * p + sn * q)
    aip = -pref * sq * (c * r + sn * w)
    bip = pref * sq * (sn * r - c * w)
    return ai, aip, bi, bip


def _build_tables():
    n_nodes = int(round((T_SWITCH_PLUS - T_SWITCH_MINUS) / _GRID_STEP))
    ts = T_SWITCH_MINUS + _GRID_STEP * np.arange(n_nodes + 1)
    ai = np.empty(n_nodes + 1)
    aip = np.empty(n_nodes + 1)
    bi = np.empty(n_nodes + 1)
    bip = np.empty(n_nodes + 1)
    i_hi = n_nodes
    i_zero = int(round((0.0 - T_SWITCH_MINUS) / _GRID_STEP))

    # Ai marches downward from the asymptotic seed; the unwanted growing
    # component shrinks in that direction, so the march is stable.
    a_s, ap_s, _, _, z = _asym_plus_scaled(T_SWITCH_PLUS)
    ai[i_hi] = a_s * np.exp(-z)
    aip[i_hi] = ap_s * np.exp(-z)
    w, wp = ai[i_hi], aip[i_hi]
    for i in range(i_hi, 0, -1):
        w, wp = _taylor_pair(ts[i], w, wp, -_GRID_STEP, _MARCH_TERMS)
        ai[i - 1], aip[i - 1] = w, wp

    # Bi marches away from t=0 in both directions (growing mode upward).
    bi[i_zero], bip[i_zero] = BI_ZERO, BIP_ZERO
    w, wp = BI_ZERO, BIP_ZERO
    for i in range(i_zero, i_hi):
        w, wp = _taylor_pair(ts[i], w, wp, _GRID_STEP, _MARCH_TERMS)
        bi[i + 1], bip[i + 1] = w, wp
    w, wp = BI_ZERO, BIP_ZERO
    for i in range(i_zero, 0, -1):
        w, wp = _taylor_pair(ts[i], w, wp, -_GRID_STEP, _MARCH_TERMS)
        bi[i - 1], bip[i - 1] = w, wp
    return ts, ai, aip, bi, bip


_NODES_T, _NODES_AI, _NODES_AIP, _NODES_BI, _NODES_BIP = _build_tables()


def _core_eval(t):
    t = np.asarray(t, dtype=float)
    idx = np.rint((t - T_SWITCH_MINUS) / _GRID_STEP).astype(int)
    idx = np.clip(idx, 0, len(_NODES_T) - 1)
    t0 = _NODES_T[idx]
    d = t - t0
    ai, aip = _taylor_pair(t0, _NODES_AI[idx], _NODES_AIP[idx], d, _EVAL_TERMS)
    bi, bip = _taylor_pair(t0, _NODES_BI[idx], _NODES_BIP[idx], d, _EVAL_TERMS)
    return ai, aip, bi, bip


def airy_many(t):
    """Vectorized Ai, Ai', Bi, Bi' for a float array of arguments.

    Returns four arrays.  For t large enough that e^{+z} overflows, Bi and
    Bi' are +inf; use airy_scaled for an overflow-safe representation.
    """
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("airy_many requires finite arguments")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    ai = np.empty_like(t)
    aip = np.empty_like(t)
    bi = np.empty_like(t)
    bip = np.empty_like(t)

    core = (t >= T_SWITCH_MINUS) & (t <= T_SWITCH_PLUS)
    plus = t > T_SWITCH_PLUS
    minus = t < T_SWITCH_MINUS
    if np.any(core):
        ai[core], aip[core], bi[core], bip[core] = _core_eval(t[core])
    if np.any(plus):
        a_s, ap_s, b_s, bp_s, z = _asym_plus_scaled(t[plus])
        with np.errstate(over="ignore", under="ignore"):
            em = np.exp(-z)
            ep = np.exp(z)
            ai[plus] = a_s * em
            aip[plus] = ap_s * em
            bi[plus] = b_s * ep
            bip[plus] = bp_s * ep
    if np.any(minus):
        ai[minus], aip[minus], bi[minus], bip[minus] = _asym_minus(t[minus])
    if scalar:
        return ai[0], aip[0], bi[0], bip[0]
    return ai, aip, bi, bip


def airy_eval(t: float) -> AiryValues:
    """Evaluate Ai, Bi and derivatives at a finite real point."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("airy_eval requires a finite argument")
    ai, aip, bi, bip = airy_many(t)
    if t > T_SWITCH_PLUS:
        tag = "asymptotic-plus"
    elif t < T_SWITCH_MINUS:
        tag = "asymptotic-minus"
    else:
        tag = "series"
    return AiryValues(float(ai), float(aip), float(bi), float(bip), tag)


def airy_scaled(t: float) -> ScaledAiry:
    """Overflow-safe values for t >= 0.

    Returns (Ai e^{+z}, Ai' e^{+z}, Bi e^{-z}, Bi' e^{-z}, z) with
    z = 2 t^(3/2)/3, so that multiplying by e^{-z} (resp. e^{+z}) recovers
    the plain values whenever those are representable.
    """
    t = float(t)
    if not (t >= 0.0):
        raise ValueError("airy_scaled requires t >= 0")
    z = 2.0 / 3.0 * t**1.5
    if t > T_SWITCH_PLUS:
        a_s, ap_s, b_s, bp_s, z = _asym_plus_scaled(t)
        return ScaledAiry(float(a_s), float(ap_s), float(b_s), float(bp_s), float(z))
    ai, aip, bi, bip = airy_many(t)
    ep = np.exp(z)
    return ScaledAiry(float(ai * ep), float(aip * ep), float(bi / ep), float(bip / ep), float(z))
