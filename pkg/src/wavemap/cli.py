"""Command line interface: run orchestration and output writing."""
from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import sys

import numpy as np

from . import analysis, diagnostics, io
from .config import ConfigError, RunConfig, parse_config
from .grid import GridError
from .integrate import Status, build_initial_state, evolve


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=pathlib.Path, help="key = value config file")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--method", choices=("rk4", "rattle"))
    p.add_argument("--domain", choices=("full", "quarter"))
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--n", dest="n", type=int, help="ring exponent")
    p.add_argument("--sample-stride", dest="sample_stride", type=int)
    p.add_argument("--snapshot-times", dest="snapshot_times",
                   help="comma separated times")
    p.add_argument("--initial", choices=("ring", "static"))
    p.add_argument("--no-energy-correction", dest="energy_correction",
                   action="store_false", default=None)
    p.add_argument("--stop-on-flip", dest="stop_on_flip",
                   action="store_true", default=None)
    p.add_argument("--out", help="output directory")


def _config_from_args(args, require_amplitude: bool = True) -> RunConfig:
    kwargs: dict = {}
    if args.config is not None:
        base = parse_config(args.config.read_text())
        kwargs = dataclasses.asdict(base)
        kwargs["snapshot_times"] = tuple(kwargs["snapshot_times"])
    for key in ("amplitude", "grid_n", "method", "domain", "cfl", "t_end",
                "tol", "max_iter", "r1", "r2", "n", "sample_stride",
                "initial", "energy_correction", "stop_on_flip", "out"):
        value = getattr(args, key, None)
        if value is not None:
            kwargs[key] = value
    if getattr(args, "snapshot_times", None) is not None:
        kwargs["snapshot_times"] = tuple(
            float(tok) for tok in args.snapshot_times.split(",") if tok.strip())
    if "amplitude" not in kwargs:
        if not require_amplitude:
            kwargs["amplitude"] = 0.0
        else:
            raise ConfigError("missing required key 'amplitude'")
    if "grid_n" not in kwargs:
        raise ConfigError("missing required key 'grid_n'")
    return RunConfig(**kwargs)


def _out_dir(config: RunConfig) -> pathlib.Path:
    out = pathlib.Path(config.out if config.out else "results")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _summary_line(tag: str, record) -> str:
    last = record.samples[-1]
    return (f"{tag}: status={record.status.value} t={last.t:.6g} "
            f"phi_max={last.phi_max:.3e} psi_max={last.psi_max:.3e} "
            f"energy={last.energy:.9g} energy_rel={last.energy_rel:.3e} "
            f"delta_e={last.delta_e:.3e} min_w={record.min_w_overall:.6g}")


def run_command(config: RunConfig) -> int:
    grid = config.build_grid()
    record = evolve(config, grid)
    try:
        out = _out_dir(config)
        io.write_series(record.samples, out / "series.csv")
        for t_req, snap in record.snapshots.items():
            io.write_snapshot(snap, grid, config, out / f"snapshot_t{t_req:g}")
        io.write_snapshot(record.final_state, grid, config, out / "final")
    except OSError as exc:
        print(f"error writing outputs: {exc}", file=sys.stderr)
        return 2
    print(_summary_line("run", record))
    return 0 if record.status is Status.COMPLETED else 1


def compare_command(config: RunConfig) -> int:
    grid = config.build_grid()
    records = {}
    status_ok = True
    for method in ("rk4", "rattle"):
        cfg = dataclasses.replace(config, method=method)
        rec = evolve(cfg, grid)
        records[method] = rec
        print(_summary_line(method, rec))
        status_ok &= rec.status is Status.COMPLETED
    try:
        out = _out_dir(config)
        for method, rec in records.items():
            io.write_series(rec.samples, out / f"series_{method}.csv")
        _write_merged(records, out / "series_compare.csv")
    except OSError as exc:
        print(f"error writing outputs: {exc}", file=sys.stderr)
        return 2
    return 0 if status_ok else 1


def _write_merged(records, path) -> None:
    import csv
    cols = ["phi_max", "psi_max", "origin_dev", "energy", "energy_rel", "delta_e"]
    rk4, rtl = records["rk4"].samples, records["rattle"].samples
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"{c}_{m}" for m in ("rk4", "rattle") for c in cols])
        for a, b in zip(rk4, rtl):
            row = [f"{a.t:.17g}"]
            for rec in (a, b):
                row += [f"{getattr(rec, c):.17g}" for c in cols]
            writer.writerow(row)


def critical_search_command(config: RunConfig, a_lo: float, a_hi: float,
                            tol_a: float) -> int:
    result = analysis.critical_search(config, a_lo, a_hi, tol_a, verbose=True)
    print(f"a_star={result.a_star:.8f} "
          f"bracket=[{result.bracket[0]:.8f}, {result.bracket[1]:.8f}] "
          f"runs={result.runs}")
    if config.out:
        out = _out_dir(config)
        payload = {
            "a_star": result.a_star,
            "bracket": list(result.bracket),
            "runs": result.runs,
            "classifications": [[a, c.value] for a, c in result.classifications],
        }
        (out / "critical_search.json").write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def fit_scaling_command(series_path, window: tuple[float, float]) -> int:
    records = io.read_series(series_path)
    fit = analysis.fit_scaling(((r.t, r.s) for r in records), window)
    print(f"T={fit.T:.8f} b={fit.b:.8f} residual={fit.residual:.8e} "
          f"iterations={fit.iterations} converged={fit.converged}")
    return 0 if fit.converged else 1


def static_check_command(config: RunConfig) -> int:
    config = dataclasses.replace(config, initial="static", amplitude=0.0)
    grid = config.build_grid()
    w0 = build_initial_state(config, grid).w.interior.copy()
    record = evolve(config, grid)
    if record.status is not Status.COMPLETED:
        print(f"static-check: evolution failed ({record.status.value})")
        return 1
    dev = np.abs(record.final_state.w.interior - w0)
    X, Y = grid.mesh()
    core = (X ** 2 + Y ** 2) <= 0.25
    print(f"static-check: max|w-w0|={dev.max():.3e} "
          f"core(r<=0.5) max|w-w0|={dev[core].max():.3e} t_end={config.t_end}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wavemap",
        description="2+1 equivariant wave-map simulator (RK4 vs Rattle)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve one configuration")
    _add_config_flags(p_run)

    p_cmp = sub.add_parser("compare", help="run both methods on one configuration")
    _add_config_flags(p_cmp)

    p_cs = sub.add_parser("critical-search", help="bisect for the critical amplitude")
    _add_config_flags(p_cs)
    p_cs.add_argument("--a-lo", type=float, required=True)
    p_cs.add_argument("--a-hi", type=float, required=True)
    p_cs.add_argument("--tol-a", type=float, default=1e-4)

    p_fit = sub.add_parser("fit-scaling", help="fit the blow-up scaling law to a series file")
    p_fit.add_argument("--series", type=pathlib.Path, required=True)
    p_fit.add_argument("--window-start", type=float, default=0.836)
    p_fit.add_argument("--window-end", type=float, default=0.85)

    p_static = sub.add_parser("static-check", help="stationarity test on the static solution")
    _add_config_flags(p_static)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_command(_config_from_args(args))
        if args.command == "compare":
            return compare_command(_config_from_args(args))
        if args.command == "critical-search":
            config = _config_from_args(args, require_amplitude=False)
            return critical_search_command(config, args.a_lo, args.a_hi, args.tol_a)
        if args.command == "fit-scaling":
            return fit_scaling_command(args.series, (args.window_start, args.window_end))
        if args.command == "static-check":
            args.initial = "static"
            return static_check_command(_config_from_args(args, require_amplitude=False))
    except (ConfigError, GridError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
