"""Langer charts and the uniform Airy representation of the decaying solutions.

A chart packages the variable change xi(x) for one side of the well, with
sign convention xi < 0 inside the well and xi(x_tp) = 0 at the turning
point.  xi is defined through the action integral
(3/2 int |lam-v|^(1/2))^(2/3); its derivative comes from the exact relation
xi'^2 xi = q with q = v - lam.  Inside a collar around the turning point,
where the quadrature route loses accuracy, a short Taylor model built from
v'(x_tp), v''(x_tp) takes over.

The leading uniform approximation on each side is
u(x) = pi |xi'(x)|^(-1/2) Ai(hbar^(-2/3) xi(x)), normalized so that its
oscillatory envelope is pi^(1/2) hbar^(1/6) |q|^(-1/4) (see chart_u); the
remainder of this representation is never modeled, only measured against
the brute-force reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from . import quantize as _quantize_mod  # deferred use; no import cycle (quantize avoids langer)
from .airy import AI_ZERO, airy_many
from .action import phi_prime, halfline_action_prime
from .potential import Potential, TurningPoints, halfline_turning_point, turning_points
from .quadrature import forbidden_integral, well_integral

__all__ = [
    "LangerChart",
    "ChartDomainError",
    "build_chart",
    "chart_for",
    "error_control",
    "error_control_core",
    "chart_u",
    "chart_u_prime",
    "uniform_u",
    "uniform_u_prime",
    "Normalization",
    "normalization",
    "UniformWave",
    "Eigenfunction",
    "eigenfunction",
    "peak_coefficient",
    "export_eigenfunction_csv",
]

_N_CHEB = 64


class ChartDomainError(ValueError):
    """Evaluation outside the half-domain covered by the chart."""


def _cheb_nodes(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * k / n)


@dataclass
class LangerChart:
    """One-sided Langer variable xi and its derivatives.

    side "+" covers [x1, inf), side "-" covers (-inf, x1].  Beyond x_far the
    chart falls back to direct quadrature per point.  Construction is the
    only stateful step; a built chart is immutable and safe to share across
    threads.
    """

    side: str
    lam: float
    pot: Potential
    x_tp: float  # turning point of this side
    x1: float  # matching point bounding the half-domain
    slope: float  # |v'(x_tp)|
    curv: float  # v''(x_tp)
    collar: float
    x_far: float
    turning: Optional[TurningPoints]
    _interp_in: BarycentricInterpolator
    _interp_out: BarycentricInterpolator

    # -- xi -----------------------------------------------------------------

    def _xi_series(self, x):
        """Collar Taylor model of xi from the action integral's expansion."""
        s = np.asarray(x, dtype=float) - self.x_tp
        if self.side == "-":
            s = -s
        # s > 0 is the forbidden side; eta carries the v'' correction
        eta = 3.0 * self.curv / (20.0 * self.slope)
        return np.sign(s) * self.slope ** (1.0 / 3.0) * np.abs(s) * np.abs(1.0 + np.sign(s) * eta * np.abs(s)) ** (2.0 / 3.0)

    def _xi_quad(self, x: float) -> float:
        if (x < self.x_tp) if self.side == "+" else (x > self.x_tp):
            lo, hi = (x, self.x_tp) if self.side == "+" else (self.x_tp, x)
            val, _ = well_integral(self.pot, self.lam, 0.5, lo, hi,
                                   sqrt_lo=(self.side == "-"), sqrt_hi=(self.side == "+"))
            return -(1.5 * val) ** (2.0 / 3.0)
        val, _ = forbidden_integral(self.pot, self.lam, self.x_tp, x)
        return (1.5 * val) ** (2.0 / 3.0)

    def _in_domain(self, x: np.ndarray) -> np.ndarray:
        return x >= self.x1 if self.side == "+" else x <= self.x1

    def xi(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if not np.all(self._in_domain(x)):
            raise ChartDomainError(f"x outside the side-{self.side} chart domain (x1={self.x1})")
        out = np.empty_like(x)
        d = x - self.x_tp if self.side == "+" else self.x_tp - x
        collar = np.abs(x - self.x_tp) < self.collar
        inside = (d < 0) & ~collar
        outer = (d >= 0) & ~collar & (np.abs(x - self.x_tp) <= abs(self.x_far - self.x_tp))
        far = (d >= 0) & ~collar & ~outer
        if np.any(collar):
            out[collar] = self._xi_series(x[collar])
        if np.any(inside):
            out[inside] = self._interp_in(x[inside])
        if np.any(outer):
            out[outer] = self._interp_out(x[outer])
        if np.any(far):
            out[far] = [self._xi_quad(float(xx)) for xx in x[far]]
        return out[0] if scalar else out

    # -- xi', xi'' ----------------------------------------------------------

    def _q_model(self, x):
        s = np.asarray(x, dtype=float) - self.x_tp
        sgn = 1.0 if self.side == "+" else -1.0
        a = sgn * self.slope  # signed v'(x_tp)
        return a * s + 0.5 * self.curv * s * s

    def xi_prime(self, x):
        """xi'(x) from xi'^2 xi = q; at the turning point, +-|v'|^(1/3)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        xi = np.atleast_1d(self.xi(x))
        at_tp = x == self.x_tp
        collar = (np.abs(x - self.x_tp) < self.collar) & ~at_tp
        q = np.empty_like(x)
        if np.any(collar):
            q[collar] = self._q_model(x[collar])
        rest = ~collar & ~at_tp
        if np.any(rest):
            q[rest] = self.pot.value(x[rest]) - self.lam
        sgn = 1.0 if self.side == "+" else -1.0
        out = np.empty_like(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            out[~at_tp] = sgn * np.sqrt(q[~at_tp] / xi[~at_tp])
        out[at_tp] = sgn * self.slope ** (1.0 / 3.0)
        return out[0] if scalar else out

    def xi_second(self, x):
        """xi'' from differentiating xi'^2 xi = q; unreliable inside the collar."""
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(np.atleast_1d(x) - self.x_tp) < self.collar):
            raise ChartDomainError("xi_second is not defined inside the turning-point collar")
        xi = self.xi(x)
        xip = self.xi_prime(x)
        qp = self.pot.deriv(np.asarray(x, dtype=float))
        return (qp - xip**3) / (2.0 * xip * xi)


def build_chart(pot: Potential, lam: float, side: str, x1: Optional[float] = None,
                tol: float = 1e-10, n_nodes: int = _N_CHEB) -> LangerChart:
    """Construct the Langer chart for one side of the well at energy lam.

    For full-line potentials x1 defaults to the well midpoint (the jump
    point x0 for a discontinuous well); for half-line potentials only
    side "+" exists and x1 = 0.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    turning = None
    if pot.domain == "half_line":
        if side != "+":
            raise ChartDomainError("half-line problems only carry the '+' chart")
        x_tp, _ = halfline_turning_point(pot, lam)
        width = x_tp
        if x1 is None:
            x1 = 0.0
    else:
        turning = turning_points(pot, lam)
        width = turning.width
        if x1 is None:
            jumps = [s.x for s in pot.singular_points if turning.x_minus < s.x < turning.x_plus]
            x1 = jumps[0] if jumps else 0.5 * (turning.x_minus + turning.x_plus)
        x_tp = turning.x_plus if side == "+" else turning.x_minus
    toward_well = "-" if side == "+" else "+"
    _, d1, d2 = pot.eval(x_tp, toward_well)
    collar = max(1e-3, tol ** (1.0 / 3.0)) * width
    x_far = x_tp + (width + 2.0) * (1.0 if side == "+" else -1.0)

    chart = LangerChart(
        side=side, lam=lam, pot=pot, x_tp=x_tp, x1=float(x1),
        slope=abs(d1), curv=float(d2), collar=collar, x_far=x_far,
        turning=turning, _interp_in=None, _interp_out=None,
    )

    def node_values(xs):
        vals = np.empty_like(xs)
        for i, xx in enumerate(xs):
            if abs(xx - x_tp) < collar:
                vals[i] = chart._xi_series(xx)
            else:
                vals[i] = chart._xi_quad(float(xx))
        return vals

    if side == "+":
        nod_in = _cheb_nodes(float(x1), x_tp, n_nodes)
        nod_out = _cheb_nodes(x_tp, x_far, n_nodes)
    else:
        nod_in = _cheb_nodes(x_tp, float(x1), n_nodes)
        nod_out = _cheb_nodes(x_far, x_tp, n_nodes)
    chart._interp_in = BarycentricInterpolator(nod_in, node_values(nod_in))
    chart._interp_out = BarycentricInterpolator(nod_out, node_values(nod_out))
    return chart


@lru_cache(maxsize=128)
def chart_for(pot: Potential, lam: float, side: str, x1: Optional[float] = None) -> LangerChart:
    """Memoized chart construction (Potential is immutable and hashable)."""
    return build_chart(pot, lam, side, x1)


# ---------------------------------------------------------------------------
# error-control function


def error_control_core(xi: float, q: float, qp: float, qpp: float) -> float:
    """p(x) from -16 p = 5 xi^-2 + xi (4 q^-2 q'' - 5 q^-3 q'^2)."""
    return -(5.0 * xi**-2.0 + xi * (4.0 * qpp / q**2 - 5.0 * qp**2 / q**3)) / 16.0


def error_control(pot: Potential, lam: float, x: float, side: str,
                  chart: Optional[LangerChart] = None) -> float:
    """Local approximation-quality diagnostic p_pm(x); not defined at x_tp."""
    chart = chart or chart_for(pot, lam, side)
    if x == chart.x_tp:
        raise ValueError("error_control has a removable singularity at the turning point")
    v, d1, d2 = pot.eval(x)
    return error_control_core(float(chart.xi(x)), v - lam, d1, d2)


# ---------------------------------------------------------------------------
# uniform representation


def chart_u(chart: LangerChart, hbar: float, x):
    """Leading uniform solution pi |xi'|^(-1/2) Ai(hbar^(-2/3) xi) on a chart.

    The factor pi fixes the overall normalization of the decaying solution:
    with it, u decays as 2^(-1) pi^(1/2) hbar^(1/6) q^(-1/4) e^(-S/hbar)
    outside the well, oscillates with envelope pi^(1/2) hbar^(1/6) |q|^(-1/4)
    inside, and int_{x1}^{inf} u^2 = 2^(-1) pi hbar^(1/3) int (lam-v)^(-1/2),
    which is the convention the normalization constants c_pm assume.
    """
    xi = chart.xi(x)
    xip = chart.xi_prime(x)
    t = xi / hbar ** (2.0 / 3.0)
    ai, _, _, _ = airy_many(t)
    return math.pi * np.abs(xip) ** -0.5 * ai


def chart_u_prime(chart: LangerChart, hbar: float, x):
    """x-derivative of the leading term; requires |x - x_tp| >= collar."""
    xi = chart.xi(x)
    xip = chart.xi_prime(x)
    xis = chart.xi_second(x)
    t = xi / hbar ** (2.0 / 3.0)
    ai, aip, _, _ = airy_many(t)
    amp = np.abs(xip) ** -0.5
    damp = -0.5 * np.abs(xip) ** -1.5 * np.sign(xip) * xis
    return math.pi * (amp * aip * xip / hbar ** (2.0 / 3.0) + damp * ai)


def uniform_u(pot: Potential, lam: float, hbar: float, x, side: str):
    """chart_u through the memoized chart for (pot, lam, side)."""
    return chart_u(chart_for(pot, float(lam), side), float(hbar), x)


def uniform_u_prime(pot: Potential, lam: float, hbar: float, x, side: str):
    """chart_u_prime through the memoized chart for (pot, lam, side)."""
    return chart_u_prime(chart_for(pot, float(lam), side), float(hbar), x)


# ---------------------------------------------------------------------------
# normalization and assembly


@dataclass(frozen=True)
class Normalization:
    c_plus: float  # |c_+|
    c_minus: float  # |c_-|
    a: float  # relative sign/amplitude u_- = a u_+


def normalization(pot: Potential, lam: float, hbar: float, n: int,
                  tp: Optional[TurningPoints] = None) -> Normalization:
    """Leading-order |c_pm| = (2/pi)^(1/2) hbar^(-1/6) (int (lam-v)^(-1/2))^(-1/2),
    with a = (-1)^n for a smooth well."""
    if n is None:
        raise ValueError("normalization needs the quantum number n")
    total = 2.0 * phi_prime(pot, lam, tp)
    c = math.sqrt(2.0 / math.pi) * hbar ** (-1.0 / 6.0) / math.sqrt(total)
    return Normalization(c_plus=c, c_minus=c, a=(-1.0) ** (n % 2))


def peak_coefficient(pot: Potential, lam: float, side: str = "+") -> float:
    """alpha_pm: |psi(x_tp)| ~ alpha_pm hbar^(-1/6) at the turning point.

    Composition of |c_pm| with u(x_tp) = pi |v'(x_tp)|^(-1/6) Ai(0), i.e.
    (2 pi)^(1/2) (int (lam-v)^(-1/2))^(-1/2) |v'(x_tp)|^(-1/6) Ai(0).
    """
    tp = turning_points(pot, lam)
    total = 2.0 * phi_prime(pot, lam, tp)
    slope = tp.slope_plus if side == "+" else -tp.slope_minus
    return math.sqrt(2.0 * math.pi) / math.sqrt(total) * slope ** (-1.0 / 6.0) * AI_ZERO


@dataclass
class UniformWave:
    """One evaluable side of the assembled eigenfunction: c * u on a chart."""

    side: str
    chart: LangerChart
    hbar: float
    c: float  # signed normalization constant
    match_point: float

    def __call__(self, x):
        return self.c * chart_u(self.chart, self.hbar, x)

    def amplitude(self, x):
        """Slowly varying envelope factor |xi'(x)|^(-1/2)."""
        return np.abs(self.chart.xi_prime(x)) ** -0.5


@dataclass
class Eigenfunction:
    """Assembled normalized eigenfunction approximation psi(x).

    psi = c_+ u_+ right of the matching point x1, c_- u_- left of it; the
    residual value mismatch at x1 is exposed as a diagnostic.
    """

    level: "object"
    x1: float
    plus: UniformWave
    minus: Optional[UniformWave]

    @property
    def c_plus(self) -> float:
        return self.plus.c

    @property
    def c_minus(self) -> float:
        return self.minus.c if self.minus is not None else 0.0

    @property
    def chart_plus(self) -> LangerChart:
        return self.plus.chart

    @property
    def chart_minus(self) -> Optional[LangerChart]:
        return self.minus.chart if self.minus is not None else None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        right = x >= self.x1
        if np.any(right):
            out[right] = self.plus(x[right])
        if np.any(~right):
            if self.minus is None:
                raise ChartDomainError("half-line eigenfunction evaluated at x < 0")
            out[~right] = self.minus(x[~right])
        return out[0] if scalar else out

    def mismatch(self) -> float:
        """|psi(x1+) - psi(x1-)| relative to the local oscillation amplitude."""
        if self.minus is None:
            return 0.0
        up = self.plus(self.x1)
        um = self.minus(self.x1)
        q1 = abs(float(self.plus.chart.pot.value(np.asarray(self.x1, dtype=float))) - self.level.lam)
        amp = abs(self.c_plus) * math.pi ** 1.5 * self.level.hbar ** (1.0 / 6.0) * q1 ** (-0.25)
        return abs(float(up) - float(um)) / amp


def eigenfunction(pot: Potential, level) -> Eigenfunction:
    """Assemble psi for a level produced by the quantize module."""
    lam, hbar = level.lam, level.hbar
    kind = level.kind
    if kind == "smooth":
        tp = turning_points(pot, lam)
        x1 = 0.5 * (tp.x_minus + tp.x_plus)
        norm = normalization(pot, lam, hbar, level.n, tp)
        plus = UniformWave("+", chart_for(pot, lam, "+", x1), hbar, norm.c_plus, x1)
        minus = UniformWave("-", chart_for(pot, lam, "-", x1), hbar, norm.a * norm.c_minus, x1)
        return Eigenfunction(level, x1, plus, minus)
    if kind == "discontinuous":
        x1 = pot.singular_points[0].x
        dn = _quantize_mod.disc_normalization(pot, level, hbar)
        plus = UniformWave("+", chart_for(pot, lam, "+", x1), hbar, dn.c_plus, x1)
        minus = UniformWave("-", chart_for(pot, lam, "-", x1), hbar,
                            math.copysign(dn.c_minus, dn.a_signed), x1)
        return Eigenfunction(level, x1, plus, minus)
    if kind in ("halfline_dirichlet", "halfline_robin"):
        total = 2.0 * halfline_action_prime(pot, lam)
        c_plus = math.sqrt(2.0 / math.pi) * hbar ** (-1.0 / 6.0) / math.sqrt(total)
        plus = UniformWave("+", chart_for(pot, lam, "+", 0.0), hbar, c_plus, 0.0)
        return Eigenfunction(level, 0.0, plus, None)
    raise ValueError(f"unknown level kind {kind!r}")


def export_eigenfunction_csv(path, x, psi, psi_oracle=None) -> None:
    """Write (x, psi, psi_oracle, abs_err) rows for plotting."""
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=float)
    with open(path, "w") as fh:
        fh.write("x,psi,psi_oracle,abs_err\n")
        for i in range(len(x)):
            if psi_oracle is None:
                fh.write(f"{x[i]!r},{psi[i]!r},,\n")
            else:
                fh.write(f"{x[i]!r},{psi[i]!r},{psi_oracle[i]!r},{abs(psi[i]-psi_oracle[i])!r}\n")
