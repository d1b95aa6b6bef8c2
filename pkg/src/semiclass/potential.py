"""Potentials for -hbar^2 d^2/dx^2 + v(x): definition, evaluation, certification.

A Potential is an ordered set of smooth branches partitioning the domain,
plus markers for interior points where v, v' or v'' may jump.  All
operations here are pure; Potential instances are immutable and hashable so
downstream modules can memoize charts and certificates keyed on them.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "PolyBranch",
    "PowerBranch",
    "ExpQuadBranch",
    "Piece",
    "SingularPoint",
    "Potential",
    "TurningPoints",
    "WellCertificate",
    "HalfLineCertificate",
    "PotentialError",
    "CertificationError",
    "TurningPointError",
    "make_power_law",
    "halfline_power_law",
    "make_polynomial",
    "turning_points",
    "halfline_turning_point",
    "certify_well",
    "certify_halfline_well",
    "potential_from_spec",
    "load_potential",
    "TOL_X",
]

TOL_X = 1e-12  # absolute tolerance for turning-point location


class PotentialError(ValueError):
    """Invalid potential construction or evaluation request."""


class TurningPointError(RuntimeError):
    """Turning-point search failed (wrong crossing count or critical point)."""


class CertificationError(RuntimeError):
    """Single-well certification failed; .clause names the violated condition."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


# ---------------------------------------------------------------------------
# branches


@dataclass(frozen=True)
class PolyBranch:
    """Polynomial branch, coefficients in ascending order."""

    coeffs: tuple[float, ...]

    def value(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def deriv(self, x):
        c = np.polynomial.polynomial.polyder(self.coeffs)
        return np.polynomial.polynomial.polyval(x, c) if len(c) else np.zeros_like(np.asarray(x, float))

    def deriv2(self, x):
        c = np.polynomial.polynomial.polyder(self.coeffs, 2)
        return np.polynomial.polynomial.polyval(x, c) if len(c) else np.zeros_like(np.asarray(x, float))


@dataclass(frozen=True)
class PowerBranch:
    """offset + coeff * |x|^exponent (one side of a power-law well)."""

    offset: float
    coeff: float
    exponent: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.offset + self.coeff * np.abs(x) ** self.exponent

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        a = self.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.coeff * a * np.abs(x) ** (a - 1.0) * np.sign(x)
        if a == 1.0:
            out = np.where(x == 0.0, self.coeff, out)  # limit from within the branch side
        return out

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        a = self.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.coeff * a * (a - 1.0) * np.abs(x) ** (a - 2.0)
        if a == 2.0:
            out = np.where(x == 0.0, 2.0 * self.coeff, out)
        return out


@dataclass(frozen=True)
class ExpQuadBranch:
    """offset + amplitude * exp(c2 x^2 + c1 x + c0)."""

    offset: float
    amplitude: float
    c2: float
    c1: float
    c0: float

    def _expq(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(self.c2 * x * x + self.c1 * x + self.c0)

    def value(self, x):
        return self.offset + self._expq(x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return (2.0 * self.c2 * x + self.c1) * self._expq(x)

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        g = 2.0 * self.c2 * x + self.c1
        return (g * g + 2.0 * self.c2) * self._expq(x)


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    branch: PolyBranch | PowerBranch | ExpQuadBranch


@dataclass(frozen=True)
class SingularPoint:
    """Interior point where the potential loses smoothness.

    kind: "jump" (v itself jumps), "kink" (v continuous, v' jumps),
    "curvature" (v, v' continuous, v'' jumps or is unbounded).
    """

    x: float
    kind: str


@dataclass(frozen=True)
class Potential:
    pieces: tuple[Piece, ...]
    singular_points: tuple[SingularPoint, ...] = ()
    domain: str = "full_line"  # or "half_line", meaning [0, inf)
    decay_exponent: Optional[float] = None

    def __post_init__(self):
        if not self.pieces:
            raise PotentialError("potential needs at least one piece")
        lo0 = self.pieces[0].lo
        hi_last = self.pieces[-1].hi
        if self.domain == "full_line" and lo0 != -math.inf:
            raise PotentialError("full-line potential must start at -inf")
        if self.domain == "half_line" and lo0 != 0.0:
            raise PotentialError("half-line potential must start at 0")
        if hi_last != math.inf:
            raise PotentialError("potential must extend to +inf")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.hi != b.lo:
                raise PotentialError("pieces must partition the domain without gaps")
        bpts = self._boundaries()
        for s in self.singular_points:
            if s.x not in bpts:
                raise PotentialError("singular points must sit on piece boundaries")
            if s.kind not in ("jump", "kink", "curvature"):
                raise PotentialError(f"unknown singular kind {s.kind!r}")

    def _boundaries(self) -> tuple[float, ...]:
        return tuple(p.hi for p in self.pieces[:-1])

    @property
    def x_min(self) -> float:
        return self.pieces[0].lo

    def _index_right(self, x: float) -> int:
        # piece whose closure contains x, boundary points resolving right
        return bisect_right(self._boundaries(), x)

    def _index_left(self, x: float) -> int:
        # piece whose closure contains x, boundary points resolving left
        return bisect_left(self._boundaries(), x)

    def eval(self, x: float, side: Optional[str] = None) -> tuple[float, float, float]:
        """(v, v', v'') at x; side "+"/"-" selects a one-sided limit.

        Raises if x lies outside the domain or exactly on a singular point
        with no side selector.
        """
        x = float(x)
        if self.domain == "half_line" and x < 0.0:
            raise PotentialError(f"x={x} outside half-line domain")
        singular_xs = {s.x for s in self.singular_points}
        if side is None:
            if x in singular_xs:
                raise PotentialError(f"x={x} is a singular point; pass side='+' or '-'")
            i = self._index_right(x)
            sgn = 1.0
        elif side in ("+", "+0"):
            i = self._index_right(x)
            sgn = 1.0
        elif side in ("-", "-0"):
            i = self._index_left(x)
            sgn = -1.0
        else:
            raise PotentialError(f"bad side selector {side!r}")
        return _one_sided_limits(self.pieces[i].branch, x, sgn)

    def _vectorized(self, fn_name: str, x) -> np.ndarray:
        """Branch-resolved vectorized evaluation; boundary points use the right piece."""
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        bounds = np.array(self._boundaries())
        idx = np.searchsorted(bounds, x, side="right")
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if np.any(m):
                out[m] = getattr(piece.branch, fn_name)(x[m])
        return out

    def value(self, x) -> np.ndarray:
        return self._vectorized("value", x)

    def deriv(self, x) -> np.ndarray:
        return self._vectorized("deriv", x)

    def deriv2(self, x) -> np.ndarray:
        return self._vectorized("deriv2", x)

    def jump_points(self) -> tuple[SingularPoint, ...]:
        return tuple(s for s in self.singular_points if s.kind == "jump")


# ---------------------------------------------------------------------------
# constructors


def _one_sided_limits(branch, x: float, sgn: float) -> tuple[float, float, float]:
    """Limits of (v, v', v'') at x from one side; sgn=-1 approaches from below.

    Branches are smooth on the closure of their piece except a PowerBranch at
    its center x=0, where the limits are taken in closed form.
    """
    if isinstance(branch, PowerBranch) and x == 0.0:
        a, c = branch.exponent, branch.coeff
        if a > 1.0:
            d = 0.0
        elif a == 1.0:
            d = c * sgn
        else:
            d = math.inf * sgn
        if a > 2.0 or a == 1.0:
            d2 = 0.0
        elif a == 2.0:
            d2 = 2.0 * c
        else:
            d2 = math.inf
        return branch.offset, d, d2
    return float(branch.value(x)), float(branch.deriv(x)), float(branch.deriv2(x))


def _classify_boundary(left, right, x: float) -> Optional[SingularPoint]:
    vl, dl, d2l = _one_sided_limits(left, x, -1.0)
    vr, dr, d2r = _one_sided_limits(right, x, +1.0)
    if abs(vl - vr) > 1e-14 * (1.0 + abs(vl) + abs(vr)):
        return SingularPoint(x, "jump")
    if not np.isfinite(dl) or not np.isfinite(dr) or abs(dl - dr) > 1e-12 * (1.0 + abs(dl) + abs(dr)):
        return SingularPoint(x, "kink")
    if not np.isfinite(d2l) or not np.isfinite(d2r) or abs(d2l - d2r) > 1e-12 * (1.0 + abs(d2l) + abs(d2r)):
        return SingularPoint(x, "curvature")
    return None


def make_power_law(a_plus: float, v_plus: float, alpha_plus: float,
                   a_minus: float, v_minus: float, alpha_minus: float) -> Potential:
    """Two-branch power-law well a_+- + v_+- |x|^alpha_+- glued at x=0.

    Marks x=0 singular unless the branches agree there to second order.
    """
    if v_plus <= 0 or v_minus <= 0:
        raise PotentialError("v_plus and v_minus must be positive")
    if alpha_plus <= 0 or alpha_minus <= 0:
        raise PotentialError("alpha_plus and alpha_minus must be positive")
    left = PowerBranch(a_minus, v_minus, alpha_minus)
    right = PowerBranch(a_plus, v_plus, alpha_plus)
    sing = []
    if a_plus != a_minus:
        sing.append(SingularPoint(0.0, "jump"))
    else:
        dl = -v_minus if alpha_minus == 1.0 else (0.0 if alpha_minus > 1.0 else math.inf)
        dr = +v_plus if alpha_plus == 1.0 else (0.0 if alpha_plus > 1.0 else math.inf)
        if dl != dr:
            sing.append(SingularPoint(0.0, "kink"))
        else:
            d2l = 2.0 * v_minus if alpha_minus == 2.0 else (0.0 if alpha_minus > 2.0 else math.inf)
            d2r = 2.0 * v_plus if alpha_plus == 2.0 else (0.0 if alpha_plus > 2.0 else math.inf)
            if d2l != d2r:
                sing.append(SingularPoint(0.0, "curvature"))
    return Potential(
        pieces=(Piece(-math.inf, 0.0, left), Piece(0.0, math.inf, right)),
        singular_points=tuple(sing),
        decay_exponent=2.0,
    )


def halfline_power_law(a: float, v: float, alpha: float) -> Potential:
    """Power-law potential a + v x^alpha on the half line [0, inf)."""
    if v <= 0 or alpha <= 0:
        raise PotentialError("v and alpha must be positive")
    return Potential(
        pieces=(Piece(0.0, math.inf, PowerBranch(a, v, alpha)),),
        domain="half_line",
        decay_exponent=2.0,
    )


def make_polynomial(coeffs, domain: str = "full_line") -> Potential:
    """Single polynomial branch over the whole domain."""
    lo = -math.inf if domain == "full_line" else 0.0
    return Potential(
        pieces=(Piece(lo, math.inf, PolyBranch(tuple(float(c) for c in coeffs))),),
        domain=domain,
        decay_exponent=2.0,
    )


# ---------------------------------------------------------------------------
# turning points and certification


@dataclass(frozen=True)
class TurningPoints:
    x_minus: float
    x_plus: float
    slope_minus: float
    slope_plus: float

    def __post_init__(self):
        if not self.x_minus < self.x_plus:
            raise TurningPointError("turning points out of order")
        if not (self.slope_minus < 0.0 < self.slope_plus):
            raise TurningPointError(
                f"critical turning point: v'(x-)={self.slope_minus}, v'(x+)={self.slope_plus}"
            )

    @property
    def width(self) -> float:
        return self.x_plus - self.x_minus


def _growth_bound(pot: Potential, target: float, side: int, start: float = 1.0) -> float:
    """A point in the given direction with v >= target (truncation bound).

    Found by doubling then solving v(X) = target, so the bound hugs the
    potential rather than overshooting it.
    """
    x = side * max(start, 1.0)
    for _ in range(200):
        if float(pot.value(np.array(x))) >= target:
            lo = 0.0 if pot.domain == "half_line" and side > 0 else x / 2.0
            f = lambda y: float(pot.value(np.array(y))) - target
            if f(lo) >= 0.0:
                return abs(x)
            return abs(brentq(f, min(lo, x), max(lo, x), xtol=1e-10))
        x *= 2.0
    raise CertificationError("growth", f"v never reaches {target} in direction {side:+d}")


def _search_box(pot: Potential, lam_hi: float, margin: float = 10.0) -> tuple[float, float]:
    """Truncation bounds where v exceeds lam_hi + margin (the 'infinity' proxy)."""
    hi = _growth_bound(pot, lam_hi + margin, +1)
    if pot.domain == "half_line":
        return 0.0, hi
    lo = -_growth_bound(pot, lam_hi + margin, -1)
    return lo, hi


def _sign_changes(x: np.ndarray, f: np.ndarray):
    s = np.sign(f)
    nz = s != 0
    xs, ss = x[nz], s[nz]
    flips = np.nonzero(ss[1:] * ss[:-1] < 0)[0]
    return [(xs[i], xs[i + 1]) for i in flips]


def _scalar_q(pot: Potential, lam: float) -> Callable[[float], float]:
    return lambda x: float(pot.value(np.array(x))) - lam


def _newton_polish(pot: Potential, lam: float, x: float, steps: int = 2) -> float:
    # drive |v(x)-lam| to rounding level so that downstream endpoint
    # desingularization sees a machine-accurate root; the bracketing root is
    # already accurate to TOL_X, so any large step means a broken derivative
    # (e.g. the bracket closed onto a jump) and is refused
    cap = 1e-6 * max(1.0, abs(x))
    for _ in range(steps):
        d = float(pot.deriv(np.array(x)))
        if d == 0.0 or not np.isfinite(d):
            break
        step = (float(pot.value(np.array(x))) - lam) / d
        if not np.isfinite(step) or abs(step) > cap:
            break
        x = x - step
    return x


def turning_points(pot: Potential, lam: float, grid_size: int = 2048,
                   box: Optional[tuple[float, float]] = None) -> TurningPoints:
    """Locate the two solutions of v(x) = lam and the slopes there.

    Brackets by sign change of v - lam on an audit grid over the truncation
    box, then refines each root with Brent's method to TOL_X.
    """
    if pot.domain != "full_line":
        raise PotentialError("turning_points expects a full-line potential")
    if box is None:
        box = _search_box(pot, lam)
    x = np.linspace(box[0], box[1], grid_size)
    f = pot.value(x) - lam
    brackets = _sign_changes(x, f)
    if len(brackets) != 2:
        raise TurningPointError(
            f"expected exactly 2 crossings of v(x)={lam}, found {len(brackets)}"
        )
    g = _scalar_q(pot, lam)
    roots = [
        _newton_polish(pot, lam, brentq(g, a, b, xtol=TOL_X, rtol=4 * np.finfo(float).eps))
        for a, b in brackets
    ]
    x_minus, x_plus = sorted(roots)
    slope_minus = float(pot.deriv(np.array(x_minus)))
    slope_plus = float(pot.deriv(np.array(x_plus)))
    return TurningPoints(x_minus, x_plus, slope_minus, slope_plus)


def halfline_turning_point(pot: Potential, lam: float, grid_size: int = 2048) -> tuple[float, float]:
    """Single right turning point of a half-line well (0, x_plus)."""
    if pot.domain != "half_line":
        raise PotentialError("halfline_turning_point expects a half-line potential")
    v0 = float(pot.value(np.array(0.0)))
    if not v0 < lam:
        raise TurningPointError(f"v(0)={v0} is not below lam={lam}")
    _, hi = _search_box(pot, lam)
    x = np.linspace(0.0, hi, grid_size)
    brackets = _sign_changes(x, pot.value(x) - lam)
    if len(brackets) != 1:
        raise TurningPointError(f"expected exactly 1 crossing, found {len(brackets)}")
    g = _scalar_q(pot, lam)
    root = _newton_polish(pot, lam, brentq(g, *brackets[0], xtol=TOL_X, rtol=4 * np.finfo(float).eps))
    slope = float(pot.deriv(np.array(root)))
    if slope <= 0.0:
        raise TurningPointError(f"critical turning point: v'(x+)={slope}")
    return float(root), slope


@dataclass(frozen=True)
class WellCertificate:
    """Verified single-well geometry for every lam in lambda_window.

    The certification is sampling-based on an audit grid; a pathological
    potential tuned between grid points could evade it.
    """

    potential: Potential
    lambda_window: tuple[float, float]
    turning_map: Callable[[float], TurningPoints]
    interior_singularities: tuple[SingularPoint, ...]
    criticality_margin: float
    x_bounds: tuple[float, float]


@dataclass(frozen=True)
class HalfLineCertificate:
    potential: Potential
    lambda_window: tuple[float, float]
    turning_map: Callable[[float], tuple[float, float]]
    criticality_margin: float
    x_bounds: tuple[float, float]


def certify_well(pot: Potential, lam_lo: float, lam_hi: float,
                 audit_grid_size: int = 1024, lam_samples: int = 9) -> WellCertificate:
    """Check the single-well assumptions on [lam_lo, lam_hi].

    Verifies, at the window edges and on a lam audit grid between them:
    exactly two non-critical turning points, v < lam strictly inside the
    well and v > lam outside it (on an x audit grid), growth past the
    truncation bounds, and monotonicity of x_pm in lam.
    """
    if not lam_lo < lam_hi:
        raise CertificationError("window", f"need lam_lo < lam_hi, got ({lam_lo}, {lam_hi})")
    if pot.domain != "full_line":
        raise CertificationError("domain", "use certify_halfline_well for half-line potentials")
    box = _search_box(pot, lam_hi)
    for edge in box:
        if float(pot.value(np.array(edge))) <= lam_hi:
            raise CertificationError("growth", "insufficient growth at the truncation bound")

    lams = np.linspace(lam_lo, lam_hi, lam_samples)
    margin = math.inf
    tps = []
    for lam in lams:
        try:
            tp = turning_points(pot, float(lam), grid_size=audit_grid_size, box=box)
        except TurningPointError as exc:
            raise CertificationError("well-geometry", f"lam={lam}: {exc}") from exc
        tps.append(tp)
        margin = min(margin, min(-tp.slope_minus, tp.slope_plus))
        xg = np.linspace(box[0], box[1], audit_grid_size)
        v = pot.value(xg)
        pad = 1e-9 * max(1.0, tp.width)
        inside = (xg > tp.x_minus + pad) & (xg < tp.x_plus - pad)
        outside = (xg < tp.x_minus - pad) | (xg > tp.x_plus + pad)
        if np.any(v[inside] >= lam):
            raise CertificationError("well-geometry", f"v >= lam inside the well at lam={lam}")
        if np.any(v[outside] <= lam):
            raise CertificationError("well-geometry", f"v <= lam outside the well at lam={lam}")
    for a, b in zip(tps, tps[1:]):
        if not (b.x_plus >= a.x_plus - TOL_X and b.x_minus <= a.x_minus + TOL_X):
            raise CertificationError("monotonicity", "x_pm(lam) not monotone across the window")
    if not margin > 0.0:
        raise CertificationError("criticality", "vanishing slope at a turning point")

    tp_lo, tp_hi = tps[0], tps[-1]
    interior = tuple(
        s for s in pot.singular_points if tp_lo.x_minus < s.x < tp_lo.x_plus
    )
    crossing = [
        s for s in pot.singular_points
        if s not in interior and tp_hi.x_minus < s.x < tp_hi.x_plus
    ]
    if crossing:
        raise CertificationError(
            "singularity", f"singular point at {crossing[0].x} enters the well inside the window"
        )
    return WellCertificate(
        potential=pot,
        lambda_window=(lam_lo, lam_hi),
        turning_map=lambda lam: turning_points(pot, lam, box=box),
        interior_singularities=interior,
        criticality_margin=float(margin),
        x_bounds=box,
    )


def certify_halfline_well(pot: Potential, lam_lo: float, lam_hi: float,
                          audit_grid_size: int = 1024, lam_samples: int = 9) -> HalfLineCertificate:
    """Half-line analogue of certify_well: single turning point, v(0) < lam."""
    if not lam_lo < lam_hi:
        raise CertificationError("window", f"need lam_lo < lam_hi, got ({lam_lo}, {lam_hi})")
    if pot.domain != "half_line":
        raise CertificationError("domain", "potential is not half-line")
    box = _search_box(pot, lam_hi)
    margin = math.inf
    for lam in np.linspace(lam_lo, lam_hi, lam_samples):
        try:
            _, slope = halfline_turning_point(pot, float(lam), grid_size=audit_grid_size)
        except TurningPointError as exc:
            raise CertificationError("well-geometry", f"lam={lam}: {exc}") from exc
        margin = min(margin, slope)
    return HalfLineCertificate(
        potential=pot,
        lambda_window=(lam_lo, lam_hi),
        turning_map=lambda lam: halfline_turning_point(pot, lam),
        criticality_margin=float(margin),
        x_bounds=box,
    )


# ---------------------------------------------------------------------------
# JSON ingestion


_BRANCH_BUILDERS = {
    "poly": lambda d: PolyBranch(tuple(float(c) for c in d["coeffs"])),
    "power": lambda d: PowerBranch(float(d.get("offset", 0.0)), float(d["coeff"]), float(d["exponent"])),
    "exp-quadratic": lambda d: ExpQuadBranch(
        float(d.get("offset", 0.0)), float(d["amplitude"]),
        float(d.get("c2", 0.0)), float(d.get("c1", 0.0)), float(d.get("c0", 0.0)),
    ),
}


def _parse_bound(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "+inf"):
            return math.inf
        if v == "-inf":
            return -math.inf
        raise PotentialError(f"bad interval bound {v!r}")
    return float(v)


def potential_from_spec(spec: dict) -> Potential:
    """Build a Potential from its JSON document form.

    Two kinds are accepted: {"kind": "power_law", "a_plus": ..., ...} and
    {"kind": "table", "branches": [{"lo", "hi", "type", ...}, ...]}.
    """
    kind = spec.get("kind")
    if kind == "power_law":
        pot = make_power_law(
            float(spec["a_plus"]), float(spec["v_plus"]), float(spec["alpha_plus"]),
            float(spec["a_minus"]), float(spec["v_minus"]), float(spec["alpha_minus"]),
        )
    elif kind == "halfline_power_law":
        pot = halfline_power_law(float(spec.get("a", 0.0)), float(spec["v"]), float(spec["alpha"]))
    elif kind == "table":
        domain = spec.get("domain", "full_line")
        pieces = []
        for b in spec["branches"]:
            btype = b.get("type")
            if btype not in _BRANCH_BUILDERS:
                raise PotentialError(f"unknown branch type {btype!r}")
            pieces.append(Piece(_parse_bound(b["lo"]), _parse_bound(b["hi"]), _BRANCH_BUILDERS[btype](b)))
        pieces.sort(key=lambda p: p.lo)
        sing = []
        for left, right in zip(pieces, pieces[1:]):
            mark = _classify_boundary(left.branch, right.branch, left.hi)
            if mark is not None:
                sing.append(mark)
        pot = Potential(
            pieces=tuple(pieces),
            singular_points=tuple(sing),
            domain=domain,
            decay_exponent=spec.get("decay_exponent"),
        )
    else:
        raise PotentialError(f"unknown potential kind {kind!r}")
    if "decay_exponent" in spec and spec["decay_exponent"] is not None:
        pot = Potential(pot.pieces, pot.singular_points, pot.domain, float(spec["decay_exponent"]))
    return pot


def load_potential(path) -> Potential:
    with open(path) as fh:
        return potential_from_spec(json.load(fh))
