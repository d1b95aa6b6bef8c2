"""Classical-mechanics integrals over a potential well.

Everything a quantization condition or an eigenfunction normalization needs:
the action Phi(lam) = int (lam - v)^(1/2) dx between the turning points, its
lam-derivative, one-sided partial actions, period, microcanonical averages
of observables, the classical kinetic energy, and the Beta-function closed
forms available for power-law wells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .gammafn import beta
from .potential import (
    Potential,
    TurningPoints,
    halfline_turning_point,
    turning_points,
)
from .quadrature import well_integral

__all__ = [
    "TOL_QUAD",
    "ActionProfile",
    "phi",
    "phi_value",
    "phi_prime",
    "partial_action",
    "classical_average",
    "kinetic_cl",
    "classical_period",
    "halfline_action",
    "halfline_action_prime",
    "PowerLawForms",
    "power_law_closed_forms",
]

TOL_QUAD = 1e-10  # default absolute quadrature tolerance


@dataclass(frozen=True)
class ActionProfile:
    """Action data at one energy: Phi, Phi' and the turning points used."""

    lam: float
    phi: float
    phi_prime: float
    turning: TurningPoints
    quadrature_error: float


def _tp(pot: Potential, lam: float, tp: Optional[TurningPoints]) -> TurningPoints:
    return tp if tp is not None else turning_points(pot, lam)


def phi_value(pot: Potential, lam: float, tp: Optional[TurningPoints] = None,
              tol: float = TOL_QUAD) -> float:
    """Phi(lam) = int_{x-}^{x+} (lam - v)^(1/2) dx."""
    tp = _tp(pot, lam, tp)
    val, _ = well_integral(pot, lam, 0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return val


def phi_prime(pot: Potential, lam: float, tp: Optional[TurningPoints] = None,
              tol: float = TOL_QUAD) -> float:
    """Phi'(lam) = (1/2) int (lam - v)^(-1/2) dx > 0."""
    tp = _tp(pot, lam, tp)
    val, _ = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return 0.5 * val


def phi(pot: Potential, lam: float, tp: Optional[TurningPoints] = None,
        tol: float = TOL_QUAD) -> ActionProfile:
    """Action profile (Phi, Phi') at lam with a quadrature error estimate."""
    tp = _tp(pot, lam, tp)
    val, e1 = well_integral(pot, lam, 0.5, tp.x_minus, tp.x_plus, True, True, tol)
    der, e2 = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return ActionProfile(lam, val, 0.5 * der, tp, e1 + 0.5 * e2)


def partial_action(pot: Potential, lam: float, x: float, side: str,
                   tp: Optional[TurningPoints] = None, tol: float = TOL_QUAD) -> float:
    """phi_pm(x; lam): action between x and the turning point on the given side.

    side "+" integrates over [x, x+], side "-" over [x-, x]; both are >= 0
    and phi_plus + phi_minus = Phi.
    """
    tp = _tp(pot, lam, tp)
    if not tp.x_minus < x < tp.x_plus:
        raise ValueError(f"x={x} is not strictly inside the well ({tp.x_minus}, {tp.x_plus})")
    if side in ("+", "+0"):
        val, _ = well_integral(pot, lam, 0.5, x, tp.x_plus, False, True, tol)
    elif side in ("-", "-0"):
        val, _ = well_integral(pot, lam, 0.5, tp.x_minus, x, True, False, tol)
    else:
        raise ValueError(f"bad side {side!r}")
    return val


def classical_average(pot: Potential, lam: float, w: Callable,
                      w_breaks=(), tp: Optional[TurningPoints] = None,
                      tol: float = TOL_QUAD) -> float:
    """Microcanonical average of w at energy lam.

    int w (lam-v)^(-1/2) dx / int (lam-v)^(-1/2) dx over the well; this is
    the leading term of int w psi^2 as hbar -> 0.  Discontinuity points of w
    go in w_breaks so quadrature panels can split there.
    """
    tp = _tp(pot, lam, tp)
    num, _ = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol,
                           weight=w, weight_breaks=w_breaks)
    den, _ = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return num / den


def kinetic_cl(pot: Potential, lam: float, tp: Optional[TurningPoints] = None,
               tol: float = TOL_QUAD) -> float:
    """Classical kinetic energy: int (lam-v)^(1/2) / int (lam-v)^(-1/2).

    Equals lam - <v>_cl and Phi/(2 Phi') = (2 d ln Phi/d lam)^(-1).
    """
    tp = _tp(pot, lam, tp)
    num, _ = well_integral(pot, lam, 0.5, tp.x_minus, tp.x_plus, True, True, tol)
    den, _ = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return num / den


def classical_period(pot: Potential, lam: float, mass: float,
                     tp: Optional[TurningPoints] = None, tol: float = TOL_QUAD) -> float:
    """Oscillation period T = sqrt(2m) int (lam-v)^(-1/2) dx; T(m=1/2) = 2 Phi'."""
    if mass <= 0.0:
        raise ValueError("mass must be positive")
    tp = _tp(pot, lam, tp)
    den, _ = well_integral(pot, lam, -0.5, tp.x_minus, tp.x_plus, True, True, tol)
    return np.sqrt(2.0 * mass) * den


def halfline_action(pot: Potential, lam: float, tol: float = TOL_QUAD) -> float:
    """int_0^{x+} (lam - v)^(1/2) dx for a half-line well (0, x+)."""
    x_plus, _ = halfline_turning_point(pot, lam)
    val, _ = well_integral(pot, lam, 0.5, 0.0, x_plus, False, True, tol)
    return val


def halfline_action_prime(pot: Potential, lam: float, tol: float = TOL_QUAD) -> float:
    """(1/2) int_0^{x+} (lam - v)^(-1/2) dx."""
    x_plus, _ = halfline_turning_point(pot, lam)
    val, _ = well_integral(pot, lam, -0.5, 0.0, x_plus, False, True, tol)
    return 0.5 * val


@dataclass(frozen=True)
class PowerLawForms:
    """Beta-function closed forms for the two-branch power-law well."""

    phi_plus0: float
    phi_minus0: float
    phi: float
    phi_prime: float
    kinetic: float


def _half_actions(a: float, v: float, alpha: float, lam: float) -> tuple[float, float]:
    # int_0^{x+} (lam - a - v x^alpha)^(+-1/2) dx in closed form
    mu = lam - a
    s = (mu / v) ** (1.0 / alpha) / alpha
    up = mu**0.5 * s * beta(1.5, 1.0 / alpha)
    dn = mu**-0.5 * s * beta(0.5, 1.0 / alpha)
    return up, dn


def power_law_closed_forms(a_plus: float, v_plus: float, alpha_plus: float,
                           a_minus: float, v_minus: float, alpha_minus: float,
                           lam: float) -> PowerLawForms:
    """Closed-form actions for v = a_pm + v_pm |x|^alpha_pm at energy lam."""
    if lam <= max(a_plus, a_minus):
        raise ValueError(f"lam={lam} is not above the well bottom on both sides")
    up_p, dn_p = _half_actions(a_plus, v_plus, alpha_plus, lam)
    up_m, dn_m = _half_actions(a_minus, v_minus, alpha_minus, lam)
    return PowerLawForms(
        phi_plus0=up_p,
        phi_minus0=up_m,
        phi=up_p + up_m,
        phi_prime=0.5 * (dn_p + dn_m),
        kinetic=(up_p + up_m) / (dn_p + dn_m),
    )
