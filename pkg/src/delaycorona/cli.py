"""Command line entry point: ``delaycorona <subcommand> --config cfg.json``.

Exit codes: 0 pass/holds, 1 fail, 2 inconclusive, 3 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bezout_solver import measure_bezout
from .config import AnalysisConfig, ScanConfig, parse_config
from .corona_checker import FAILS, HOLDS, CoronaInstance, corona_decide
from .errors import ConfigError, CoronaViolated, DelayCoronaError, Unreachable
from .hautus_checker import FAIL, PASS, hautus_decide
from .lags import format_lag
from .lcdde_sim import build_reachability, simulate, steer

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
SUBCOMMANDS = ("analyze", "corona", "bezout", "simulate", "steer")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _c(z) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _f(x: float):
    """JSON has no infinities; keep them readable as strings."""
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _cells(f) -> list[list[str]]:
    return [[str(x) for x in v] for v in f.values]


def _exit_for(verdict: str) -> int:
    if verdict in (PASS, HOLDS):
        return EXIT_PASS
    if verdict in (FAIL, FAILS):
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE


def _scan_kwargs(sc: ScanConfig) -> dict:
    return dict(window=sc.window, n_sigma=sc.grid[0], n_torus=sc.grid[1], refine=sc.refine, workers=sc.workers)


def _grid_rows(grid, value_name: str):
    q = grid["angles"].shape[1]
    header = ["sigma", *[f"theta{k + 1}" for k in range(q)], value_name]
    rows = [[repr(float(s)), *[repr(float(a)) for a in ang], repr(float(v))]
            for s, ang, v in zip(grid["sigma"], grid["angles"], grid["values"])]
    return header, rows


def run_analyze(cfg: AnalysisConfig, want_csv: bool):
    spec = cfg.system
    kw = _scan_kwargs(cfg.scan)
    rep = hautus_decide(spec, pass_tol=cfg.scan.tol, keep_grid=want_csv, **kw)
    ci = rep.cond_i
    verdicts = {"cond_i": ci.verdict, "cond_ii": rep.cond_ii, "overall": rep.overall}
    numerics = {
        "min_sigma_min": _f(ci.min_sigma_min),
        "polished_min": _f(ci.polished_min),
        "endpoint_plus": _f(ci.endpoint_plus),
        "endpoint_minus": _f(ci.endpoint_minus),
        "cond_ii_rank": rep.cond_ii_rank,
        "window": [_f(ci.window[0]), _f(ci.window[1])],
        "pass_tol": ci.pass_tol,
        "fail_tol": ci.fail_tol,
        "evaluations": ci.scan.n_evaluations,
    }
    if spec.commensurable:
        op = build_reachability(spec)
        numerics["reachability"] = {
            "mesh_step": str(op.mesh_step),
            "horizon": str(op.horizon),
            "rows": len(op.matrix),
            "rank": op.rank,
        }
        verdicts["reachability_full_rank"] = op.full_row_rank
    witnesses = {
        "argmin": {"sigma": ci.argmin.sigma, "angles": list(ci.argmin.angles)},
        "polished_argmin": {"sigma": ci.polished_argmin.sigma, "angles": list(ci.polished_argmin.angles)},
    }
    certificates = {}
    if ci.witness_matrix is not None:
        certificates["rank_drop_matrix"] = [[_c(z) for z in row] for row in ci.witness_matrix]
    csv_data = _grid_rows(ci.scan.grid, "sigma_min") if want_csv else None
    return _exit_for(rep.overall), verdicts, numerics, witnesses, certificates, csv_data


def run_corona(cfg: AnalysisConfig, want_csv: bool):
    inst = CoronaInstance.from_measures(cfg.corona)
    kw = _scan_kwargs(cfg.scan)
    sigma_window = kw.pop("window")
    rep = corona_decide(inst, sigma_window, threshold=cfg.scan.tol, keep_grid=want_csv, **kw)
    verdicts = {"corona": rep.verdict, "exact": inst.q == 1}
    numerics = {
        "alpha_hat": _f(rep.alpha_hat),
        "threshold": rep.threshold,
        "q": inst.q,
        "generators": [g.label for g in inst.decomposition.basis.generators],
        "lag_zero_limit": inst.lag_zero_limit(),
        "evaluations": rep.scan.n_evaluations,
    }
    w = rep.witness
    witnesses = {"scan_min": {"sigma": _f(w.sigma), "angles": list(w.angles), "value": w.value}}
    if w.s is not None:
        witnesses["scan_min"]["s"] = _c(w.s)
    certificates = {}
    if rep.gcd is not None:
        certificates["gcd"] = [str(c) for c in rep.gcd.coefficients]
    if rep.certificate:
        certificates["violation"] = [
            {"epsilon": e.epsilon, "s": _c(e.s), "value": e.value, "bound": e.bound} for e in rep.certificate
        ]
    csv_data = _grid_rows(rep.scan.grid, "G") if want_csv else None
    return _exit_for(rep.verdict), verdicts, numerics, witnesses, certificates, csv_data


def run_bezout(cfg: AnalysisConfig, want_csv: bool):
    inst = CoronaInstance.from_measures(cfg.corona)
    try:
        cert = measure_bezout(inst)
    except CoronaViolated as exc:
        return (EXIT_FAIL, {"bezout": "not_coprime"}, {}, {},
                {"gcd": [str(c) for c in exc.gcd.coefficients]}, None)
    certificates = {
        "cofactors": [g.to_pairs() for g in cert.cofactors],
        "residual": cert.residual.to_pairs(),
        "verified": cert.verified,
    }
    return EXIT_PASS, {"bezout": "coprime"}, {"K": len(cert.cofactors)}, {}, certificates, None


def _traj_csv(spec, traj):
    header = ["t_cell_start", *[f"x{i + 1}" for i in range(spec.d)], *[f"u{i + 1}" for i in range(spec.m)]]
    return header, [[str(v) for v in row] for row in traj.rows()]


def run_simulate(cfg: AnalysisConfig, want_csv: bool):
    spec, sec = cfg.system, cfg.simulate
    traj = simulate(spec, sec["x0"], sec["u"])
    numerics = {"mesh_step": str(traj.mesh_step), "cells": traj.u.n_cells, "x": _cells(traj.x)}
    return EXIT_PASS, {"simulate": "ok"}, numerics, {}, {}, _traj_csv(spec, traj) if want_csv else None


def run_steer(cfg: AnalysisConfig, want_csv: bool):
    spec, sec = cfg.system, cfg.steer
    op = build_reachability(spec, sec.get("horizon"), sec["x0"].mesh_step)
    numerics = {"mesh_step": str(op.mesh_step), "horizon": str(op.horizon), "rank": op.rank, "rows": len(op.matrix)}
    try:
        u = steer(spec, sec["x0"], sec["target"], operator=op)
    except Unreachable as exc:
        cert = exc.certificate
        return (EXIT_FAIL, {"steer": "unreachable"}, numerics, {},
                {"left_null_vector": [str(x) for x in cert.w], "pairing": str(cert.value)}, None)
    traj = simulate(spec, sec["x0"], u)
    hit = traj.window(op.n_controls, op.n_window) == list(sec["target"].values)
    numerics["u"] = _cells(u)
    verdicts = {"steer": "reached", "verified": hit}
    csv_data = _traj_csv(spec, traj) if want_csv else None
    return (EXIT_PASS if hit else EXIT_FAIL), verdicts, numerics, {}, {}, csv_data


RUNNERS = {
    "analyze": (run_analyze, "system"),
    "corona": (run_corona, "corona"),
    "bezout": (run_bezout, "corona"),
    "simulate": (run_simulate, "simulate"),
    "steer": (run_steer, "steer"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="delaycorona", description="Corona, Bezout and Hautus analyses for delay systems.")
    ap.add_argument("--version", action="version", version=f"delaycorona {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON analysis config")
        p.add_argument("--out", help="report path (default: config output.report, else stdout)")
        p.add_argument("--csv", help="CSV of the scan grid or trajectory")
        p.add_argument("--window", nargs=2, type=float, metavar=("A", "B"))
        p.add_argument("--grid", nargs=2, type=int, metavar=("N_SIGMA", "N_TORUS"))
        p.add_argument("--tol", type=float, help="absolute pass threshold for scan minima")
        p.add_argument("--refine", type=int)
        p.add_argument("--workers", type=int)
    return ap


def _apply_overrides(cfg: AnalysisConfig, args) -> list[str]:
    errors = []
    sc = cfg.scan
    if args.window is not None:
        if not args.window[0] < args.window[1]:
            errors.append("--window: need A < B")
        sc.window = (args.window[0], args.window[1])
    if args.grid is not None:
        if min(args.grid) < 2:
            errors.append("--grid: resolutions must be >= 2")
        sc.grid = tuple(args.grid)
    if args.tol is not None:
        if not args.tol > 0:
            errors.append("--tol: must be positive")
        sc.tol = args.tol
    if args.refine is not None:
        if args.refine < 0:
            errors.append("--refine: must be >= 0")
        sc.refine = args.refine
    if args.workers is not None:
        if args.workers < 1:
            errors.append("--workers: must be >= 1")
        sc.workers = args.workers
    return errors


def _scan_meta(sc: ScanConfig) -> dict:
    # worker count is excluded: it must not change the report
    return {"window": list(sc.window) if sc.window else None, "grid": list(sc.grid), "tol": sc.tol, "refine": sc.refine}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    errors = _apply_overrides(cfg, args)
    runner, needed = RUNNERS[args.command]
    if getattr(cfg, needed) is None:
        errors.append(f"{args.command}: config has no '{needed}' section")
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE

    want_csv = bool(args.csv or cfg.output.get("csv"))
    try:
        code, verdicts, numerics, witnesses, certificates, csv_data = runner(cfg, want_csv)
    except DelayCoronaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = {
        "meta": {
            "tool": "delaycorona",
            "version": __version__,
            "subcommand": args.command,
            "config_hash": cfg.config_hash,
            "scan": _scan_meta(cfg.scan),
        },
        "verdicts": verdicts,
        "numerics": numerics,
        "witnesses": witnesses,
        "certificates": certificates,
    }
    if cfg.system is not None:
        report["meta"]["system"] = cfg.system.describe()
    else:
        report["meta"]["measures"] = [m.to_pairs() for m in cfg.corona]
    text = json.dumps(report, indent=2) + "\n"
    out = args.out or cfg.output.get("report")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)

    csv_path = args.csv or cfg.output.get("csv")
    if csv_path and csv_data is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_data[0])
        w.writerows(csv_data[1])
        Path(csv_path).write_text(buf.getvalue())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
