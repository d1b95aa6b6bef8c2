"""Batch front end: levels, counts, eigenfunction exports, observables and
hbar-scaling studies driven by a JSON config.

Exit codes: 0 success, 2 config error, 3 certification failure,
4 numerical non-convergence.  Output tables are deterministic: floats are
written with shortest round-trip reprs and sweep results are assembled in
sorted order however the worker pool schedules them.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import action, langer, oracle, quantize
from .potential import (
    CertificationError,
    PotentialError,
    potential_from_spec,
    turning_points,
)
from .quadrature import QuadratureError

__all__ = ["main", "run"]


class ConfigError(ValueError):
    pass


def _threads() -> int:
    raw = os.environ.get("SEMICLASS_THREADS", "")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, min(cap, int(raw)))
        except ValueError:
            raise ConfigError(f"SEMICLASS_THREADS must be an integer, got {raw!r}")
    return cap


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest exact round-trip form
    if v is None:
        return ""
    return str(v)


def _emit(table: dict, out_path, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(table, indent=2, default=float) + "\n"
    else:
        lines = [",".join(table["columns"])]
        for row in table["rows"]:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


# ---------------------------------------------------------------------------
# config


class RunConfig:
    """Validated view of the JSON run configuration."""

    def __init__(self, raw: dict, base_dir: Path, use_oracle: bool):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        self.raw = raw
        if "potential" in raw:
            try:
                self.potential = potential_from_spec(raw["potential"])
            except (PotentialError, KeyError) as exc:
                raise ConfigError(f"field 'potential': {exc}")
        elif "potential_path" in raw:
            path = base_dir / raw["potential_path"]
            try:
                self.potential = potential_from_spec(json.loads(path.read_text()))
            except FileNotFoundError:
                raise ConfigError(f"field 'potential_path': no such file {path}")
            except (PotentialError, KeyError, json.JSONDecodeError) as exc:
                raise ConfigError(f"field 'potential_path': {exc}")
        else:
            raise ConfigError("config needs 'potential' or 'potential_path'")

        hbar = raw.get("hbar")
        if hbar is None:
            raise ConfigError("field 'hbar' is required")
        self.hbars = [float(h) for h in (hbar if isinstance(hbar, list) else [hbar])]
        if any(h <= 0 for h in self.hbars) or len(set(self.hbars)) != len(self.hbars):
            raise ConfigError("field 'hbar': values must be positive and distinct")

        window = raw.get("window")
        if (not isinstance(window, list)) or len(window) != 2 or not float(window[0]) < float(window[1]):
            raise ConfigError("field 'window' must be [lo, hi] with lo < hi")
        self.window = (float(window[0]), float(window[1]))

        ns = raw.get("n", "all")
        if ns == "all":
            self.n_filter = None
        elif isinstance(ns, list) and all(isinstance(k, int) and k >= 0 for k in ns):
            self.n_filter = sorted(set(ns))
        else:
            raise ConfigError("field 'n' must be 'all' or a list of nonnegative integers")

        self.method = raw.get("method", "auto")
        if self.method not in ("auto", "bs", "disc", "halfline"):
            raise ConfigError(f"field 'method': unknown value {self.method!r}")
        self.bc = raw.get("bc", "dirichlet")
        if self.bc not in ("dirichlet", "robin"):
            raise ConfigError(f"field 'bc': unknown value {self.bc!r}")
        self.robin_b = float(raw.get("robin_b", 0.0))
        self.oracle = bool(raw.get("oracle", True)) and use_oracle
        self.tol_oracle = float(raw.get("tol_oracle", oracle.DEFAULT_TOL))
        self.weights = raw.get("weights", [{"name": "v", "kind": "potential"}])
        self.lambda_ref = raw.get("lambda_ref")
        self.study = raw.get("study", "levels")
        self.grid = raw.get("grid", {})

    def resolve_method(self) -> str:
        if self.method != "auto":
            return self.method
        if self.potential.domain == "half_line":
            return "halfline"
        if self.potential.jump_points():
            return "disc"
        return "bs"

    def levels_for(self, hbar: float):
        method = self.resolve_method()
        if method == "bs":
            lv = quantize.bs_levels(self.potential, self.window, hbar)
        elif method == "disc":
            lv = quantize.disc_levels(self.potential, self.window, hbar)
        else:
            lv = quantize.halfline_levels(self.potential, self.window, hbar,
                                          bc=self.bc, robin_b=self.robin_b)
        if self.n_filter is not None:
            lv = [l for l in lv if l.n in self.n_filter]
        return lv

    def oracle_for(self, hbar: float):
        bc = "dirichlet_both"
        if self.potential.domain == "half_line":
            bc = "halfline_dirichlet" if self.bc == "dirichlet" else "halfline_robin"
        return oracle.solve_spectrum(self.potential, hbar, self.window,
                                     tol_oracle=self.tol_oracle, bc=bc, robin_b=self.robin_b)


def _action_residual(cfg: RunConfig, level, lam: float, hbar: float) -> float:
    """Defect of the quantization condition evaluated at lam (e.g. an oracle
    eigenvalue) for the level's quantum number."""
    pot = cfg.potential
    if level.kind == "smooth":
        return abs(action.phi_value(pot, lam) - math.pi * (level.n + 0.5) * hbar)
    if level.kind == "halfline_dirichlet":
        return abs(action.halfline_action(pot, lam) - math.pi * (level.n + 0.75) * hbar)
    if level.kind == "halfline_robin":
        return abs(action.halfline_action(pot, lam) - math.pi * (level.n + 0.25) * hbar)
    # discontinuous: defect of F at lam
    x0 = pot.singular_points[0].x
    fp = action.partial_action(pot, lam, x0, "+")
    fm = action.partial_action(pot, lam, x0, "-")
    vm = pot.eval(x0, "-")[0]
    vp = pot.eval(x0, "+")[0]
    p = ((lam - vm) / (lam - vp)) ** 0.25
    tp_ = fp / hbar + math.pi / 4
    tm_ = fm / hbar + math.pi / 4
    return abs(p * math.sin(tp_) * math.cos(tm_) + math.sin(tm_) * math.cos(tp_) / p)


def _nearest(arr, x):
    i = int(np.argmin(np.abs(np.asarray(arr) - x)))
    return i


def _map_hbars(cfg: RunConfig, fn):
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = dict(zip(cfg.hbars, pool.map(fn, cfg.hbars)))
    return [results[h] for h in sorted(cfg.hbars)]


# ---------------------------------------------------------------------------
# commands


def cmd_levels(cfg: RunConfig) -> dict:
    def work(hbar):
        lv = cfg.levels_for(hbar)
        spec = cfg.oracle_for(hbar) if (cfg.oracle and lv) else None
        rows = []
        for l in lv:
            lam_o = delta = act_res = None
            if spec is not None and len(spec.eigenvalues):
                k = _nearest(spec.eigenvalues, l.lam)
                lam_o = float(spec.eigenvalues[k])
                delta = l.lam - lam_o
                act_res = _action_residual(cfg, l, lam_o, hbar)
            rows.append([hbar, l.n, l.kind, l.lam, l.residual, lam_o, delta, act_res])
        return rows

    rows = [r for chunk in _map_hbars(cfg, work) for r in chunk]
    return {
        "command": "levels",
        "columns": ["hbar", "n", "kind", "lambda_sc", "residual", "lambda_oracle",
                    "delta", "action_residual"],
        "rows": rows,
    }


def cmd_count(cfg: RunConfig) -> dict:
    a1, a2 = cfg.window

    def work(hbar):
        cr = quantize.weyl_count(cfg.potential, a1, a2, hbar)
        count_o = eps_o = None
        if cfg.oracle:
            spec = cfg.oracle_for(hbar)
            count_o = int(len(spec.eigenvalues))
            eps_o = count_o - cr.predicted
        return [hbar, a1, a2, cr.predicted, cr.count, cr.epsilon, count_o, eps_o,
                cr.phase_volume]

    rows = _map_hbars(cfg, work)
    return {
        "command": "count",
        "columns": ["hbar", "a1", "a2", "predicted", "count_sc", "epsilon_sc",
                    "count_oracle", "epsilon_oracle", "phase_volume"],
        "rows": rows,
    }


def cmd_wavefunction(cfg: RunConfig) -> dict:
    rows = []
    sup_lines = []
    for hbar in sorted(cfg.hbars):
        levels = cfg.levels_for(hbar)
        if not levels:
            continue
        spec = cfg.oracle_for(hbar) if cfg.oracle else None
        for l in levels:
            psi = langer.eigenfunction(cfg.potential, l)
            if spec is not None and len(spec.eigenvalues):
                k = _nearest(spec.eigenvalues, l.lam)
                xg, po = oracle.eigenvector(spec, k)
                lo = float(cfg.grid.get("lo", psi.x1))
                hi = float(cfg.grid.get("hi", xg[-1]))
                mask = (xg >= lo) & (xg <= hi)
                xs = xg[mask]
                ps = psi(xs)
                po = po[mask]
                sup = float(np.max(np.abs(ps - po)))
                sup_lines.append(f"hbar={hbar!r} n={l.n} sup|psi-psi_oracle|={sup!r}")
                rows.extend([hbar, l.n, float(x), float(a), float(b), abs(float(a) - float(b))]
                            for x, a, b in zip(xs, ps, po))
            else:
                tp = turning_points(cfg.potential, l.lam) if cfg.potential.domain == "full_line" else None
                lo = float(cfg.grid.get("lo", psi.x1))
                hi = float(cfg.grid.get("hi", (tp.x_plus + 1.0) if tp else l.lam))
                npts = int(cfg.grid.get("n", 801))
                xs = np.linspace(lo, hi, npts)
                ps = psi(xs)
                rows.extend([hbar, l.n, float(x), float(a), None, None] for x, a in zip(xs, ps))
    for line in sup_lines:
        print(line, file=sys.stderr)
    return {
        "command": "wavefunction",
        "columns": ["hbar", "n", "x", "psi", "psi_oracle", "abs_err"],
        "rows": rows,
    }


def _weight_fn(cfg: RunConfig, wspec: dict):
    kind = wspec.get("kind")
    if kind == "potential":
        pot = cfg.potential
        return (lambda x: pot.value(np.asarray(x, dtype=float))), ()
    if kind == "indicator":
        lo = float(wspec.get("lo", -math.inf))
        hi = float(wspec.get("hi", math.inf))
        breaks = tuple(b for b in (lo, hi) if math.isfinite(b))
        return (lambda x: ((np.asarray(x) > lo) & (np.asarray(x) <= hi)).astype(float)), breaks
    if kind == "poly":
        coeffs = tuple(float(c) for c in wspec["coeffs"])
        return (lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)), ()
    raise ConfigError(f"unknown weight kind {kind!r}")


def cmd_observable(cfg: RunConfig) -> dict:
    rows = []
    for hbar in sorted(cfg.hbars):
        levels = cfg.levels_for(hbar)
        spec = cfg.oracle_for(hbar) if (cfg.oracle and levels) else None
        for l in levels:
            # classical column at the semiclassical level, reference column at
            # the matched brute-force state: both sides come from their own
            # pipeline end to end
            k = None
            if spec is not None and len(spec.eigenvalues):
                k = _nearest(spec.eigenvalues, l.lam)
            for wspec in cfg.weights:
                w, breaks = _weight_fn(cfg, wspec)
                cls = action.classical_average(cfg.potential, l.lam, w, breaks)
                obs = oracle.observable(spec, k, w) if k is not None else None
                err = abs(obs - cls) if obs is not None else None
                rows.append([hbar, l.n, wspec.get("name", wspec["kind"]), cls, obs, err])
            k_cl = action.kinetic_cl(cfg.potential, l.lam)
            k_or = oracle.kinetic_energy(spec, k) if k is not None else None
            err = abs(k_or - k_cl) if k_or is not None else None
            rows.append([hbar, l.n, "kinetic", k_cl, k_or, err])
    return {
        "command": "observable",
        "columns": ["hbar", "n", "weight", "classical", "oracle", "abs_err"],
        "rows": rows,
    }


_STUDY_CLASSES = {"levels": 2.0, "disc-levels": 5.0 / 3.0, "observable": 1.0 / 3.0,
                  "kinetic": 1.0 / 3.0, "wavefunction": 1.0 / 6.0}


def cmd_scaling(cfg: RunConfig) -> dict:
    """Fit the log-log slope of an error metric against hbar."""
    study = cfg.study
    if study not in _STUDY_CLASSES:
        raise ConfigError(f"field 'study': unknown study {study!r}")
    if len(cfg.hbars) < 2:
        raise ConfigError("scaling study needs at least two hbar values")
    if not cfg.oracle:
        raise ConfigError("scaling studies require the oracle")
    lam_ref = cfg.lambda_ref
    if lam_ref is None:
        lam_ref = 0.5 * (cfg.window[0] + cfg.window[1])

    def err_for(hbar: float) -> float:
        spec = cfg.oracle_for(hbar)
        if study in ("levels", "disc-levels"):
            lv = cfg.levels_for(hbar)
            if study == "levels":
                worst = 0.0
                for lam in spec.eigenvalues:
                    ph = action.phi_value(cfg.potential, float(lam))
                    frac = ph / (math.pi * hbar) - 0.5
                    worst = max(worst, abs(frac - round(frac)) * math.pi * hbar)
                return worst
            lams = np.array([l.lam for l in lv])
            if len(lams) != len(spec.eigenvalues):
                raise QuantizeError(
                    f"count mismatch at hbar={hbar}: {len(lams)} predicted vs "
                    f"{len(spec.eigenvalues)} reference levels"
                )
            return float(np.max(np.abs(lams - spec.eigenvalues)))
        lv = cfg.levels_for(hbar)
        if not lv:
            raise QuantizeError(f"no levels in window at hbar={hbar}")
        l = lv[_nearest([x.lam for x in lv], lam_ref)]
        k = _nearest(spec.eigenvalues, l.lam)
        if study == "kinetic":
            return abs(oracle.kinetic_energy(spec, k) - action.kinetic_cl(cfg.potential, l.lam))
        if study == "observable":
            w, breaks = _weight_fn(cfg, cfg.weights[0])
            return abs(oracle.observable(spec, k, w)
                       - action.classical_average(cfg.potential, l.lam, w, breaks))
        psi = langer.eigenfunction(cfg.potential, l)
        xg, po = oracle.eigenvector(spec, k)
        tp = turning_points(cfg.potential, l.lam)
        mask = (xg >= psi.x1) & (xg <= tp.x_plus + 1.0)
        return float(np.max(np.abs(psi(xg[mask]) - po[mask])))

    errs = _map_hbars(cfg, err_for)
    hbars = sorted(cfg.hbars)
    logh = np.log(hbars)
    loge = np.log(np.maximum(errs, 1e-300))
    slope = float(np.polyfit(logh, loge, 1)[0])
    predicted = _STUDY_CLASSES[study]
    print(f"study={study} fitted_slope={slope!r} predicted_class={predicted!r}", file=sys.stderr)
    return {
        "command": "scaling",
        "study": study,
        "columns": ["hbar", "error"],
        "rows": [[h, e] for h, e in zip(hbars, errs)],
        "fitted_slope": slope,
        "predicted_class": predicted,
    }


_COMMANDS = {
    "levels": cmd_levels,
    "count": cmd_count,
    "wavefunction": cmd_wavefunction,
    "observable": cmd_observable,
    "scaling": cmd_scaling,
}


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="semiclass",
        description="Semiclassical spectra and eigenfunctions of 1D Schrodinger operators",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--no-oracle", action="store_true", help="skip reference computations")
    args = parser.parse_args(argv)

    try:
        cfg_path = Path(args.config)
        try:
            raw = json.loads(cfg_path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"no such config file: {cfg_path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON (line {exc.lineno}, col {exc.colno})")
        cfg = RunConfig(raw, cfg_path.resolve().parent, use_oracle=not args.no_oracle)
        table = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return 3
    except (QuadratureError, oracle.OracleError, quantize.QuantizeError) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 4
    _emit(table, args.out, args.format)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
