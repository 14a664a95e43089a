"""Command-line front end: analysis, simulation, optimization, and sweeps.

All output is CSV (RFC-4180 style, '.' decimal separator, fixed column
order) with '#' comment headers echoing the full configuration, seed, and
version, so any file can be reproduced byte-for-byte by re-running the
command it records.  Plotting is left to external tools.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .analytics import (outage_primary, outage_secondary, transmission_probability,
                        wit_transmission_probability, zone_probabilities)
from .optimize import InfeasibleError, solve_p1_closed_form, solve_p1_numeric, solve_p2
from .params import (NetworkParams, ParameterError, charging_geometry, load_params,
                     params_from_dict, params_to_dict, validate)
from .sim import (ConditioningTooRareError, SimConfig, estimate_outage, estimate_p_t,
                  interference_samples, outage_curve)

__all__ = ["main", "SweepSpec", "parse_sweep"]

SIM_TARGETS = ("p_t", "outage-primary", "outage-secondary", "outage-wit",
               "interference", "interference-cdf")

_PARAM_NAMES = {f.name for f in fields(NetworkParams)}


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: name=start:stop:n_points[:log]."""

    name: str
    start: float
    stop: float
    n_points: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.n_points)
        return np.linspace(self.start, self.stop, self.n_points)


def parse_sweep(text: str) -> SweepSpec:
    try:
        name, rest = text.split("=", 1)
        parts = rest.split(":")
        if len(parts) not in (3, 4):
            raise ValueError
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
        scale = parts[3] if len(parts) == 4 else "linear"
    except ValueError:
        raise ValueError(f"bad sweep {text!r}; expected name=start:stop:npoints[:log]")
    if name not in _PARAM_NAMES:
        raise ValueError(f"unknown sweep parameter {name!r}")
    if n < 2:
        raise ValueError("sweep needs at least 2 points")
    if not start < stop:
        raise ValueError("sweep start must be below stop")
    if scale not in ("linear", "log"):
        raise ValueError(f"unknown sweep scale {scale!r}")
    if scale == "log" and start <= 0:
        raise ValueError("log sweep requires start > 0")
    return SweepSpec(name=name, start=start, stop=stop, n_points=n, scale=scale)


def _sweep_points(sweeps: list[SweepSpec]) -> list[dict]:
    if not sweeps:
        return [{}]
    grids = [s.values() for s in sweeps]
    names = [s.name for s in sweeps]
    return [dict(zip(names, combo)) for combo in itertools.product(*grids)]


def _point_params(base: NetworkParams, overrides: dict) -> NetworkParams:
    p = replace(base, **{k: float(v) for k, v in overrides.items()})
    return validate(p, warn=False)


def _point_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return format(v, ".12g")
    return str(v)


def _write_csv(path, header_lines, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _headers(command: str, params: NetworkParams, *, sweeps=(), seed=None,
             replications=None, slots=None, mode=None, target=None,
             extra=()) -> list[str]:
    lines = [f"rfharvest {__version__}", f"command: {command}",
             "config: " + json.dumps(params_to_dict(params), sort_keys=True,
                                     separators=(",", ":"))]
    for s in sweeps:
        lines.append(f"sweep: {s.name}={s.start:g}:{s.stop:g}:{s.n_points}"
                     + (":log" if s.scale == "log" else ""))
    if seed is not None:
        lines.append(f"seed: {seed}")
    if replications is not None:
        lines.append(f"replications: {replications}")
    if slots is not None:
        lines.append(f"slots: {slots}")
    if mode is not None:
        lines.append(f"mode: {mode}")
    if target is not None:
        lines.append(f"target: {target}")
    lines.extend(extra)
    return lines


def _n_workers() -> int:
    env = os.environ.get("RFH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pooled_map(fn, jobs):
    workers = min(_n_workers(), len(jobs))
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# -- analyze -------------------------------------------------------------------

ANALYZE_COLUMNS = ("m_slots", "p_g", "p_h", "p_t_exact", "p_t_lower", "p_t_upper",
                   "active_density", "tau_p", "outage_p", "tau_s", "outage_s",
                   "outage_s_clamped")


def _analyze_row(params: NetworkParams) -> list:
    geom = charging_geometry(params)
    z = zone_probabilities(params, geom)
    tp = transmission_probability(params)
    # Conservative (largest) transmit probability drives the outage columns.
    active = tp.upper * params.lambda_s
    op = outage_primary(params, active)
    osec = outage_secondary(params, active)
    return [geom.m_slots, z.p_g, z.p_h,
            tp.value if tp.exact else float("nan"), tp.lower, tp.upper,
            active, op.tau, op.probability, osec.tau, osec.probability,
            int(osec.clamped)]


def cmd_analyze(args) -> int:
    base = load_params(args.config)
    sweeps = [parse_sweep(s) for s in args.sweep]
    points = _sweep_points(sweeps)
    names = [s.name for s in sweeps]
    rows = []
    for overrides in points:
        p = _point_params(base, overrides)
        rows.append([overrides[n] for n in names] + _analyze_row(p))
    headers = _headers("analyze", base, sweeps=sweeps)
    _write_csv(args.out, headers, tuple(names) + ANALYZE_COLUMNS, rows)
    return 0


# -- simulate ------------------------------------------------------------------


def _simulate_point(job) -> list:
    params_dict, config_kwargs, target, seed = job
    params = params_from_dict(params_dict, warn=False)
    config = SimConfig(master_seed=seed, **config_kwargs)
    if target == "p_t":
        est = estimate_p_t(params, config)
    elif target == "outage-primary":
        est = estimate_outage(params, config, "primary")
    elif target == "outage-secondary":
        est = estimate_outage(params, config, "secondary")
    else:
        est = estimate_outage(params, config, "wit")
    return [est.mean, est.half_width, est.n_samples]


def cmd_simulate(args) -> int:
    base = load_params(args.config)
    sweeps = [parse_sweep(s) for s in args.sweep]
    config_kwargs = dict(n_slots=args.slots, n_replications=args.replications)
    if args.window is not None:
        config_kwargs["window_side"] = args.window
    if args.warmup is not None:
        config_kwargs["warmup"] = args.warmup
    SimConfig(master_seed=0, **config_kwargs)  # fail fast on bad values
    headers = _headers("simulate", base, sweeps=sweeps, seed=args.seed,
                       replications=args.replications, slots=args.slots,
                       mode=args.mode, target=args.target)

    if args.target in ("interference", "interference-cdf"):
        if sweeps:
            raise ValueError(f"target {args.target} does not support sweeps")
        config = SimConfig(master_seed=_point_seed(args.seed, 0), **config_kwargs)
        if args.target == "interference":
            samples = interference_samples(base, config, args.mode)
            _write_csv(args.out, headers, ("i_s",), [[v] for v in samples])
            return 0
        exact = np.sort(interference_samples(base, config, "exact"))
        approx = np.sort(interference_samples(base, config, "approx"))
        n = min(len(exact), len(approx))
        qs = (np.arange(1, n + 1)) / n
        rows = [[qs[i], exact[i], approx[i]] for i in range(n)]
        _write_csv(args.out, headers, ("quantile", "i_s_exact", "i_s_approx"), rows)
        return 0

    points = _sweep_points(sweeps)
    names = [s.name for s in sweeps]
    jobs = []
    for i, overrides in enumerate(points):
        p = _point_params(base, overrides)
        jobs.append((params_to_dict(p), config_kwargs, args.target,
                     _point_seed(args.seed, i)))
    results = _pooled_map(_simulate_point, jobs)
    rows = [[overrides[n] for n in names] + res
            for overrides, res in zip(points, results)]
    _write_csv(args.out, headers, tuple(names) + ("estimate", "half_width", "n_samples"),
               rows)
    return 0


# -- optimize ------------------------------------------------------------------

OPTIMIZE_COLUMNS = ("status", "problem", "p_s_star", "m_at_optimum", "active_density",
                    "lambda_s_star", "lambda_s_lower", "lambda_s_upper", "c_s_star",
                    "mu_p", "mu_s", "binding")


def _optimize_row(params: NetworkParams) -> list:
    problem = "p2" if params.r_g == 0 else "p1"
    try:
        if problem == "p2":
            res = solve_p2(params)
        elif params.noise > 0:
            res = solve_p1_numeric(params)
        else:
            res = solve_p1_closed_form(params)
    except InfeasibleError:
        return ["infeasible", problem] + [float("nan")] * 9 + [""]
    lo, hi = res.lambda_s_interval if res.lambda_s_interval else (float("nan"),) * 2
    return ["ok", problem, res.p_s_star, res.m_at_optimum, res.active_density,
            res.lambda_s_star, lo, hi, res.throughput,
            float("nan") if res.mu_p is None else res.mu_p, res.mu_s,
            "+".join(res.binding)]


def cmd_optimize(args) -> int:
    base = load_params(args.config)
    sweeps = [parse_sweep(s) for s in args.sweep]
    points = _sweep_points(sweeps)
    names = [s.name for s in sweeps]
    rows = []
    for overrides in points:
        p = _point_params(base, overrides)
        rows.append([overrides[n] for n in names] + _optimize_row(p))
    headers = _headers("optimize", base, sweeps=sweeps)
    _write_csv(args.out, headers, tuple(names) + OPTIMIZE_COLUMNS, rows)
    return 0


# -- canned studies -------------------------------------------------------------
# Each study id reproduces one standard experiment with its conventional
# parameter set; analytic curves always, simulated curves where they exist.

def _study_params(**kw) -> NetworkParams:
    base = dict(lambda_p_total=0.01, lambda_s=0.2, power_p=2.0, power_s=0.1,
                alpha=4.0, eta=0.1, r_g=4.0, r_h=1.5, d_p=0.5, d_s=0.5,
                theta_p=5.0, theta_s=5.0, eps_p=0.2, eps_s=0.3,
                access_prob=1.0, noise=0.0)
    base.update(kw)
    return validate(NetworkParams(**base), warn=False)


def _sim_cfg(args, *, replications, slots, seed_index=0, window=None) -> SimConfig:
    kw = dict(n_replications=replications if args.replications is None else args.replications,
              n_slots=slots if args.slots is None else args.slots,
              master_seed=_point_seed(args.seed, seed_index))
    if args.window is not None:
        kw["window_side"] = args.window
    elif window is not None:
        kw["window_side"] = window
    return SimConfig(**kw)


def _pt_columns(tp) -> list:
    return [tp.m_slots, tp.value if tp.exact else float("nan"), tp.lower, tp.upper]


def _figure_5(args, out_dir) -> list[str]:
    base = _study_params(r_g=4.0, r_h=1.5, power_p=2.0)
    grid = np.linspace(0.01, 0.16, 20)
    tps = [transmission_probability(replace(base, power_s=float(ps))) for ps in grid]
    hdr = _headers("figure 5", base, seed=args.seed)
    files = [
        _emit(out_dir, "fig5_pt_exact.csv", hdr, ("power_s", "p_t"),
              [[float(ps), tp.value if tp.exact else float("nan")]
               for ps, tp in zip(grid, tps)]),
        _emit(out_dir, "fig5_pt_lower.csv", hdr, ("power_s", "p_t"),
              [[float(ps), tp.lower] for ps, tp in zip(grid, tps)]),
        _emit(out_dir, "fig5_pt_upper.csv", hdr, ("power_s", "p_t"),
              [[float(ps), tp.upper] for ps, tp in zip(grid, tps)]),
    ]
    rows = []
    for i, ps in enumerate(grid):
        p = replace(base, power_s=float(ps))
        cfg = _sim_cfg(args, replications=4, slots=60, seed_index=i)
        est = estimate_p_t(p, cfg)
        rows.append([float(ps), est.mean, est.half_width, est.n_samples])
    files.append(_emit(out_dir, "fig5_pt_sim.csv", hdr,
                       ("power_s", "estimate", "half_width", "n_samples"), rows))
    return files


def _figure_6(args, out_dir) -> list[str]:
    base = _study_params(r_g=3.0, r_h=1.0, power_p=1.0, lambda_s=2.0)
    grid = np.linspace(0.002, 0.2, 40)
    files = []
    for label, ps in (("m1", 0.1), ("m2", 0.2)):
        rows = []
        for lam in grid:
            p = replace(base, lambda_p_total=float(lam), power_s=ps)
            rows.append([float(lam)] + _pt_columns(transmission_probability(p)))
        hdr = _headers(f"figure 6 ({label})", replace(base, power_s=ps))
        files.append(_emit(out_dir, f"fig6_pt_{label}.csv", hdr,
                           ("lambda_p", "m_slots", "p_t_exact", "p_t_lower", "p_t_upper"),
                           rows))
    return files


def _figure_7(args, out_dir) -> list[str]:
    base = _study_params(r_h=1.0, power_p=1.0)
    grid = np.linspace(1.25, 8.0, 24)
    files = []
    for label, ps in (("m1", 0.1), ("m2", 0.2)):
        rows = []
        for rg in grid:
            p = replace(base, r_g=float(rg), power_s=ps)
            rows.append([float(rg)] + _pt_columns(transmission_probability(p)))
        hdr = _headers(f"figure 7 ({label})", replace(base, power_s=ps))
        files.append(_emit(out_dir, f"fig7_pt_{label}.csv", hdr,
                           ("r_g", "m_slots", "p_t_exact", "p_t_lower", "p_t_upper"),
                           rows))
    return files


def _figure_8(args, out_dir) -> list[str]:
    base = _study_params(r_g=3.0, r_h=1.0, power_p=2.0, power_s=0.1, lambda_s=0.2)
    cfg = _sim_cfg(args, replications=10, slots=200)
    exact = np.sort(interference_samples(base, cfg, "exact"))
    approx = np.sort(interference_samples(base, cfg, "approx"))
    n = min(len(exact), len(approx))
    qs = np.arange(1, n + 1) / n
    rows = [[qs[i], exact[i], approx[i]] for i in range(n)]
    hdr = _headers("figure 8", base, seed=args.seed,
                   replications=cfg.n_replications, slots=cfg.n_slots)
    return [_emit(out_dir, "fig8_interference_cdf.csv", hdr,
                  ("quantile", "i_s_exact", "i_s_approx"), rows)]


def _figure_9(args, out_dir) -> list[str]:
    base = _study_params(r_g=3.0, r_h=1.0, power_p=1.0, power_s=0.1, lambda_s=0.1)
    thetas = np.geomspace(1.0, 1000.0, 13)
    tp = transmission_probability(base)
    active = tp.upper * base.lambda_s
    hdr = _headers("figure 9", base, seed=args.seed)
    prim, sec = [], []
    for th in thetas:
        op = outage_primary(replace(base, theta_p=float(th)), active)
        prim.append([float(th), op.probability])
        osec = outage_secondary(replace(base, theta_s=float(th)), active)
        sec.append([float(th), osec.probability, int(osec.clamped)])
    files = [
        _emit(out_dir, "fig9_outage_primary_analytic.csv", hdr, ("theta", "outage"), prim),
        _emit(out_dir, "fig9_outage_secondary_analytic.csv", hdr,
              ("theta", "outage", "clamped"), sec),
    ]
    for idx, side in enumerate(("primary", "secondary")):
        cfg = _sim_cfg(args, replications=8, slots=150, seed_index=idx)
        ests = outage_curve(base, cfg, side, thetas)
        rows = [[float(th), e.mean, e.half_width, e.n_samples]
                for th, e in zip(thetas, ests)]
        files.append(_emit(out_dir, f"fig9_outage_{side}_sim.csv", hdr,
                           ("theta", "estimate", "half_width", "n_samples"), rows))
    return files


def _figure_10(args, out_dir) -> list[str]:
    base = _study_params(r_g=4.0, r_h=1.0, power_p=2.0, lambda_s=0.2)
    grid = np.linspace(0.02, 0.4, 10)
    actives = [transmission_probability(replace(base, power_s=float(ps))).upper
               * base.lambda_s for ps in grid]
    hdr = _headers("figure 10", base, seed=args.seed)
    prim, sec = [], []
    for ps, active in zip(grid, actives):
        p = replace(base, power_s=float(ps))
        prim.append([float(ps), outage_primary(p, active).probability])
        out = outage_secondary(p, active)
        sec.append([float(ps), out.probability, int(out.clamped)])
    files = [
        _emit(out_dir, "fig10_outage_primary_analytic.csv", hdr, ("power_s", "outage"), prim),
        _emit(out_dir, "fig10_outage_secondary_analytic.csv", hdr,
              ("power_s", "outage", "clamped"), sec),
    ]
    for side_idx, side in enumerate(("primary", "secondary")):
        rows = []
        for i, ps in enumerate(grid):
            p = replace(base, power_s=float(ps))
            cfg = _sim_cfg(args, replications=6, slots=120,
                           seed_index=side_idx * len(grid) + i)
            est = estimate_outage(p, cfg, side)
            rows.append([float(ps), est.mean, est.half_width, est.n_samples])
        files.append(_emit(out_dir, f"fig10_outage_{side}_sim.csv", hdr,
                           ("power_s", "estimate", "half_width", "n_samples"), rows))
    return files


def _optimum_curves(args, out_dir, prefix, field, grid):
    base = _study_params(r_g=3.0, r_h=1.0, power_p=2.0, eps_s=0.3)
    files = []
    for eps in (0.1, 0.2, 0.3):
        rows = []
        for lam in grid:
            p = replace(base, lambda_p_total=float(lam), eps_p=eps)
            try:
                rows.append([float(lam), getattr(solve_p1_closed_form(p), field)])
            except InfeasibleError:
                rows.append([float(lam), float("nan")])
        hdr = _headers(f"{prefix} (eps_p={eps:g})", replace(base, eps_p=eps),
                       seed=args.seed)
        name = f"{prefix.replace(' ', '')}_eps{eps:g}.csv"
        files.append(_emit(out_dir, name, hdr, ("lambda_p", field), rows))
    return files


def _figure_11(args, out_dir) -> list[str]:
    return _optimum_curves(args, out_dir, "fig11_ps_star", "p_s_star",
                           np.linspace(0.001, 0.036, 30))


def _figure_12(args, out_dir) -> list[str]:
    return _optimum_curves(args, out_dir, "fig12_cs_star", "throughput",
                           np.linspace(0.002, 0.075, 30))


def _figure_13(args, out_dir) -> list[str]:
    base = _study_params(r_g=0.0, r_h=1.0, power_p=1.0, lambda_s=2.0)
    grid = np.linspace(0.005, 0.3, 30)
    files = []
    for label, ps in (("m1", 0.1), ("m2", 0.2)):
        rows = []
        for lam in grid:
            p = replace(base, lambda_p_total=float(lam), power_s=ps)
            rows.append([float(lam)] + _pt_columns(wit_transmission_probability(p)))
        hdr = _headers(f"figure 13 ({label})", replace(base, power_s=ps))
        files.append(_emit(out_dir, f"fig13_wit_pt_{label}.csv", hdr,
                           ("lambda_p", "m_slots", "p_t_exact", "p_t_lower", "p_t_upper"),
                           rows))
    return files


_FIGURES = {5: _figure_5, 6: _figure_6, 7: _figure_7, 8: _figure_8, 9: _figure_9,
            10: _figure_10, 11: _figure_11, 12: _figure_12, 13: _figure_13}


def _emit(out_dir, name, header_lines, columns, rows) -> str:
    path = os.path.join(out_dir, name)
    _write_csv(path, header_lines, columns, rows)
    return path


def cmd_figure(args) -> int:
    if args.id not in _FIGURES:
        raise ValueError(f"unknown figure id {args.id}; known: {sorted(_FIGURES)}")
    os.makedirs(args.out_dir, exist_ok=True)
    written = _FIGURES[args.id](args, args.out_dir)
    for path in written:
        print(path)
    return 0


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rfharvest",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rfharvest {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_out=True):
        sp.add_argument("--config", required=True, help="JSON parameter document")
        if needs_out:
            sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--sweep", action="append", default=[],
                        help="name=start:stop:npoints[:log]; repeatable (cartesian)")

    sp = sub.add_parser("analyze", help="closed-form curves")
    common(sp)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates")
    common(sp)
    sp.add_argument("--target", choices=SIM_TARGETS, default="p_t")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replications", type=int, default=10)
    sp.add_argument("--slots", type=int, default=200)
    sp.add_argument("--mode", choices=("exact", "approx"), default="exact")
    sp.add_argument("--window", type=float, default=None)
    sp.add_argument("--warmup", type=int, default=None)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("optimize", help="throughput maximization")
    common(sp)
    sp.set_defaults(fn=cmd_optimize)

    sp = sub.add_parser("figure", help="canned reference studies")
    sp.add_argument("--id", type=int, required=True,
                    help=f"study id, one of {sorted(_FIGURES)}")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replications", type=int, default=None)
    sp.add_argument("--slots", type=int, default=None)
    sp.add_argument("--window", type=float, default=None)
    sp.set_defaults(fn=cmd_figure)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterError, InfeasibleError, ConditioningTooRareError, ValueError,
            OSError, json.JSONDecodeError) as exc:
        print(f"rfharvest: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
