"""Brute-force reference spectra by grid diagonalization.

Independent of every semiclassical module: the operator
-hbar^2 d^2/dx^2 + v is discretized with the 3-point Laplacian on a uniform
grid with Dirichlet truncation, eigenvalues inside the requested window are
extracted by Sturm-sequence bisection (LAPACK *stebz via
scipy.linalg.eigh_tridiagonal), and grids are doubled until two successive
Richardson extrapolants agree below the requested tolerance.  A Numerov
shooting solver provides an independent cross-check of the default scheme.

Interior jump points of v are snapped onto grid nodes, where v takes the
mean of its one-sided limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .potential import Potential, halfline_turning_point, turning_points

__all__ = [
    "OracleSpectrum",
    "OracleError",
    "solve_spectrum",
    "eigenvector",
    "observable",
    "kinetic_energy",
    "numerov_levels",
    "spectrum_to_csv",
    "eigenvector_to_csv",
]

DEFAULT_TOL = 1e-8
_MAX_N = 2**22
_TAIL_DECADES = 20.0  # WKB tail exponent required beyond the window top


class OracleError(RuntimeError):
    """Non-convergence or an invalid oracle request."""


# ---------------------------------------------------------------------------
# domain and grid construction


def _tail_bound(pot: Potential, lam: float, hbar: float, side: int) -> float:
    """Truncation point: v >= lam + 1 and WKB tail integral >= _TAIL_DECADES*hbar."""
    if pot.domain == "half_line" and side < 0:
        return 0.0
    if pot.domain == "half_line":
        x_t, _ = halfline_turning_point(pot, lam)
    else:
        tp = turning_points(pot, lam)
        x_t = tp.x_plus if side > 0 else tp.x_minus
    x = x_t + side * 0.25
    need = _TAIL_DECADES * hbar
    for _ in range(400):
        if float(pot.value(np.array(x))) >= lam + 1.0:
            g = np.linspace(min(x_t, x), max(x_t, x), 257)
            s = float(np.trapezoid(np.sqrt(np.maximum(pot.value(g) - lam, 0.0)), g))
            if s >= need:
                return x
        x = x_t + (x - x_t) * 1.3
    raise OracleError("could not place the truncation bound")


def _grid(pot: Potential, x_lo: float, x_hi: float, n: int):
    """Uniform grid with any jump point snapped onto a node."""
    jumps = [s.x for s in pot.singular_points if s.kind == "jump" and x_lo < s.x < x_hi]
    if jumps:
        x0 = jumps[0]
        h = (x_hi - x_lo) / n
        m = int(math.ceil((x0 - x_lo) / h))
        k = int(math.ceil((x_hi - x0) / h))
        x_lo = x0 - m * h
        x_hi = x0 + k * h
        n = m + k
    x = np.linspace(x_lo, x_hi, n + 1)
    return x


def _potential_on_grid(pot: Potential, x: np.ndarray) -> np.ndarray:
    v = pot.value(x)
    for s in pot.singular_points:
        hit = np.nonzero(np.isclose(x, s.x, rtol=0.0, atol=1e-12 * max(1.0, abs(s.x))))[0]
        for i in hit:
            vm = pot.eval(s.x, "-")[0]
            vp = pot.eval(s.x, "+")[0]
            v[i] = 0.5 * (vm + vp)
    return v


def _tridiag(pot: Potential, hbar: float, x: np.ndarray, bc: str, robin_b: float):
    """Symmetric tridiagonal (d, e) for the chosen boundary conditions.

    dirichlet_both / halfline_dirichlet drop the boundary nodes; for
    halfline_robin the x=0 node stays, with the ghost-point row symmetrized
    by the half-cell weight (the physical psi_0 is sqrt(2) times the
    eigenvector entry)."""
    h = x[1] - x[0]
    c = hbar * hbar / (h * h)
    v = _potential_on_grid(pot, x)
    if bc in ("dirichlet_both", "halfline_dirichlet"):
        d = 2.0 * c + v[1:-1]
        e = np.full(len(x) - 3, -c)
        return d, e
    if bc == "halfline_robin":
        d = np.concatenate(([2.0 * c + 2.0 * hbar * hbar * robin_b / h + v[0]], 2.0 * c + v[1:-1]))
        e = np.full(len(x) - 2, -c)
        e[0] = -math.sqrt(2.0) * c
        return d, e
    raise OracleError(f"unknown boundary condition {bc!r}")


def _window_eigs(pot, hbar, x, bc, robin_b, lo, hi):
    d, e = _tridiag(pot, hbar, x, bc, robin_b)
    return eigh_tridiagonal(d, e, select="v", select_range=(lo, hi), eigvals_only=True)


def _pair(a: np.ndarray, b: np.ndarray):
    """Match two ascending eigenvalue lists by nearest value."""
    if len(a) == 0 or len(b) == 0:
        return np.empty(0), np.empty(0)
    ia = np.searchsorted(a, b)
    left = np.clip(ia - 1, 0, len(a) - 1)
    right = np.clip(ia, 0, len(a) - 1)
    nearest = np.where(np.abs(b - a[left]) <= np.abs(b - a[right]), left, right)
    if len(b) > 1:
        guard = 0.25 * np.min(np.diff(b))
    else:
        guard = np.inf
    keep = np.abs(b - a[nearest]) <= guard
    # drop duplicate matches (two b's to one a): keep the closer one
    chosen: dict[int, int] = {}
    for j in np.nonzero(keep)[0]:
        i = nearest[j]
        if i not in chosen or abs(b[j] - a[i]) < abs(b[chosen[i]] - a[i]):
            chosen[i] = j
    js = sorted(chosen.values())
    return a[[nearest[j] for j in js]], b[js]


@dataclass
class OracleSpectrum:
    """Converged reference eigenvalues in a window plus the grid to rebuild
    matrices/eigenvectors on demand."""

    hbar: float
    window: tuple[float, float]
    bc: str
    robin_b: float
    x_min: float
    x_max: float
    n: int  # finest grid intervals used
    eigenvalues: np.ndarray  # Richardson-extrapolated, ascending
    est_error: np.ndarray
    raw_fine: np.ndarray  # same levels, raw values on the finest grid
    potential: Potential
    _vectors: dict = field(default_factory=dict, repr=False)

    @property
    def grid(self) -> np.ndarray:
        return _grid(self.potential, self.x_min, self.x_max, self.n)


def solve_spectrum(pot: Potential, hbar: float, window: tuple[float, float],
                   tol_oracle: float = DEFAULT_TOL, bc: str = "dirichlet_both",
                   robin_b: float = 0.0, n0: Optional[int] = None,
                   x_span: Optional[tuple[float, float]] = None) -> OracleSpectrum:
    """Reference eigenvalues of -hbar^2 psi'' + v psi = lam psi in a window.

    Doubles the grid until successive Richardson extrapolants of the
    (second-order) scheme agree below tol_oracle for every window level.
    """
    if hbar <= 0.0:
        raise OracleError("hbar must be positive")
    if tol_oracle < 1e-10:
        raise OracleError("tol_oracle below 1e-10 is not resolvable by this scheme")
    lo, hi = window
    if not lo < hi:
        raise OracleError("empty window")
    if pot.domain == "half_line" and bc == "dirichlet_both":
        bc = "halfline_dirichlet"
    if x_span is not None:
        x_lo, x_hi = x_span
    else:
        x_lo = _tail_bound(pot, hi, hbar, -1) if pot.domain == "full_line" else 0.0
        x_hi = _tail_bound(pot, hi, hbar, +1)
    for edge in (x_lo, x_hi):
        if pot.domain == "half_line" and edge == 0.0:
            continue
        if float(pot.value(np.array(edge))) < hi:
            raise OracleError("window reaches the truncation-induced spectrum edge")

    if n0 is None:
        vg = pot.value(np.linspace(x_lo, x_hi, 513))
        depth = max(hi - float(vg.min()), 1e-12)
        wavelength = math.pi * hbar / math.sqrt(depth)
        n0 = max(2048, int(24.0 * (x_hi - x_lo) / wavelength))

    pad = 0.05 * (hi - lo)
    n = n0
    seq: list[np.ndarray] = []
    extr_prev = None
    est = None
    vals_prev = _window_eigs(pot, hbar, _grid(pot, x_lo, x_hi, n), bc, robin_b, lo - pad, hi + pad)
    while True:
        n *= 2
        if n > _MAX_N:
            raise OracleError(
                f"no convergence below tol={tol_oracle} by N={_MAX_N}; last estimate "
                f"{np.max(est) if est is not None else math.nan}"
            )
        vals = _window_eigs(pot, hbar, _grid(pot, x_lo, x_hi, n), bc, robin_b, lo - pad, hi + pad)
        coarse, fine = _pair(vals_prev, vals)
        extr = fine + (fine - coarse) / 3.0
        if extr_prev is not None:
            e_old, e_new = _pair(extr_prev, extr)
            inside = (e_new > lo) & (e_new < hi)
            est_all = np.abs(e_new - e_old)
            if np.all(est_all[inside] <= tol_oracle):
                keep = inside
                eigs = e_new[keep]
                est = est_all[keep]
                raws = _pair(vals, e_new[keep])[0] if len(e_new[keep]) else np.empty(0)
                return OracleSpectrum(
                    hbar=hbar, window=(lo, hi), bc=bc, robin_b=robin_b,
                    x_min=x_lo, x_max=x_hi, n=n, eigenvalues=eigs,
                    est_error=est, raw_fine=raws, potential=pot,
                )
            est = est_all[inside]
        extr_prev = extr
        vals_prev = vals


# ---------------------------------------------------------------------------
# eigenvectors and observables


def eigenvector(spec: OracleSpectrum, k: int):
    """(x, psi) for the k-th window level, trapezoid-normalized to 1.

    Shifted inverse iteration on the finest grid; the sign is fixed so that
    psi is positive at the grid node nearest the right turning point.
    """
    if k < 0 or k >= len(spec.eigenvalues):
        raise OracleError(f"level index {k} outside the window list")
    if k in spec._vectors:
        return spec._vectors[k]
    x = spec.grid
    h = x[1] - x[0]
    d, e = _tridiag(spec.potential, spec.hbar, x, spec.bc, spec.robin_b)
    m = len(d)
    sigma = float(spec.raw_fine[k]) + 1e-9 * max(1.0, abs(spec.raw_fine[k]))
    ab = np.zeros((3, m))
    ab[0, 1:] = e
    ab[1, :] = d - sigma
    ab[2, :-1] = e
    rng = np.random.default_rng(20260810)
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    resid = math.inf
    for _ in range(6):
        try:
            w = solve_banded((1, 1), ab, v)
        except np.linalg.LinAlgError as exc:  # exact singular shift
            raise OracleError(f"inverse iteration stagnated: {exc}")
        v = w / np.linalg.norm(w)
        rho = float(v @ (d * v) + 2.0 * np.sum(e * v[:-1] * v[1:]))
        r = d * v - rho * v
        r[:-1] += e * v[1:]
        r[1:] += e * v[:-1]
        resid = float(np.linalg.norm(r))
        if resid < 1e-10 * max(1.0, abs(rho)):
            break
    if resid > 1e-6 * max(1.0, abs(sigma)):
        raise OracleError(f"inverse iteration stagnated: residual {resid}")

    if spec.bc == "halfline_robin":
        psi = np.concatenate((v, [0.0]))
        psi[0] *= math.sqrt(2.0)  # undo the half-cell symmetrization weight
    else:
        psi = np.concatenate(([0.0], v, [0.0]))
    psi = psi / math.sqrt(float(np.trapezoid(psi * psi, x)))

    lam = float(spec.eigenvalues[k])
    if spec.potential.domain == "half_line":
        x_plus, _ = halfline_turning_point(spec.potential, lam)
    else:
        x_plus = turning_points(spec.potential, lam).x_plus
    i_plus = int(np.argmin(np.abs(x - x_plus)))
    if psi[i_plus] < 0.0:
        psi = -psi
    spec._vectors[k] = (x, psi)
    return x, psi


def observable(spec: OracleSpectrum, k: int, w: Callable) -> float:
    """Trapezoid integral of w(x) psi_k(x)^2 on the oracle grid."""
    x, psi = eigenvector(spec, k)
    wx = np.asarray(w(x), dtype=float)
    return float(np.trapezoid(wx * psi * psi, x))


def kinetic_energy(spec: OracleSpectrum, k: int) -> float:
    """hbar^2 int psi'^2 via energy conservation: lam - int v psi^2."""
    return float(spec.eigenvalues[k]) - observable(spec, k, lambda x: _potential_on_grid(spec.potential, x))


# ---------------------------------------------------------------------------
# Numerov shooting cross-check


def _numerov_sweep(f: np.ndarray, h: float, u0: float, u1: float) -> np.ndarray:
    """March (1 + h^2 f/12) u via the Numerov recurrence for u'' = -f u."""
    n = len(f)
    u = np.empty(n)
    u[0], u[1] = u0, u1
    c = 1.0 + (h * h / 12.0) * f
    for i in range(1, n - 1):
        u[i + 1] = ((12.0 - 10.0 * c[i]) * u[i] - c[i - 1] * u[i - 1]) / c[i + 1]
        if abs(u[i + 1]) > 1e250:
            u[: i + 2] *= 1e-250
    return u


def _numerov_nodes(pot: Potential, hbar: float, lam: float, x: np.ndarray,
                   v: np.ndarray, bc: str, robin_b: float) -> int:
    """Sturm count: sign changes of the left shooting solution equal the
    number of discrete eigenvalues below lam."""
    h = x[1] - x[0]
    f = (lam - v) / (hbar * hbar)
    if bc == "halfline_robin":
        u0 = 1.0
        f0p = float(pot.deriv(np.array(x[0] + 1e-9))) / (hbar * hbar)
        u1 = u0 * (1.0 + h * robin_b - h * h * f[0] / 2.0 - h**3 * (f0p + f[0] * robin_b) / 6.0)
    else:
        u0, u1 = 0.0, h
    ul = _numerov_sweep(f, h, u0, u1)
    s = np.sign(ul[1:])
    s = s[s != 0]
    return int(np.sum(s[1:] * s[:-1] < 0))


def numerov_levels(pot: Potential, hbar: float, window: tuple[float, float],
                   n: int = 6000, bc: str = "dirichlet_both", robin_b: float = 0.0,
                   x_span: Optional[tuple[float, float]] = None,
                   xtol: float = 1e-10) -> np.ndarray:
    """Eigenvalues in the window from two-sided Numerov shooting.

    Node-count bisection: the count of sign changes of the glued solution
    increments by one exactly at each discrete eigenvalue, so bisection on
    it converges to the eigenvalue itself.  O(h^4) scheme; used to
    cross-validate the default finite-difference oracle.
    """
    lo, hi = window
    if pot.domain == "half_line" and bc == "dirichlet_both":
        bc = "halfline_dirichlet"
    if x_span is not None:
        x_lo, x_hi = x_span
    else:
        x_lo = _tail_bound(pot, hi, hbar, -1) if pot.domain == "full_line" else 0.0
        x_hi = _tail_bound(pot, hi, hbar, +1)
    x = _grid(pot, x_lo, x_hi, n)
    v = _potential_on_grid(pot, x)
    count = lambda lam: _numerov_nodes(pot, hbar, lam, x, v, bc, robin_b)
    k_lo, k_hi = count(lo), count(hi)
    out = []
    for k in range(k_lo, k_hi):
        a, b = lo, hi
        while b - a > xtol * max(1.0, abs(b)):
            mid = 0.5 * (a + b)
            if count(mid) <= k:
                a = mid
            else:
                b = mid
        out.append(0.5 * (a + b))
    return np.array(out)


# ---------------------------------------------------------------------------
# exports


def spectrum_to_csv(spec: OracleSpectrum, path) -> None:
    with open(path, "w") as fh:
        fh.write("index,lambda,est_error\n")
        for i, (lam, err) in enumerate(zip(spec.eigenvalues, spec.est_error)):
            fh.write(f"{i},{float(lam)!r},{float(err)!r}\n")


def eigenvector_to_csv(spec: OracleSpectrum, k: int, path) -> None:
    x, psi = eigenvector(spec, k)
    with open(path, "w") as fh:
        fh.write("x,psi\n")
        for xi, pi in zip(x, psi):
            fh.write(f"{float(xi)!r},{float(pi)!r}\n")
