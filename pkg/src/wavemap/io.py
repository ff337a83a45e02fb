"""CSV/JSON serialization of diagnostics series and field snapshots."""
from __future__ import annotations

import csv
import dataclasses
import json
import pathlib

import numpy as np

from .config import RunConfig, format_config
from .diagnostics import DiagnosticsRecord
from .grid import Grid2D
from .model import FieldState

SERIES_HEADER = ["t", "phi_max", "psi_max", "origin_dev", "energy",
                 "energy_rel", "delta_e", "s", "min_w"]
SNAPSHOT_FIELDS = ("u", "v", "w", "ut", "vt", "wt")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_series(records, path) -> None:
    path = pathlib.Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_HEADER)
        for r in records:
            writer.writerow([
                _fmt(r.t), _fmt(r.phi_max), _fmt(r.psi_max), _fmt(r.origin_dev),
                _fmt(r.energy), _fmt(r.energy_rel), _fmt(r.delta_e),
                "" if r.s is None else _fmt(r.s), _fmt(r.min_w),
            ])


def read_series(path) -> list[DiagnosticsRecord]:
    path = pathlib.Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SERIES_HEADER:
            raise ValueError(f"{path}: unexpected series header {header}")
        for row in reader:
            records.append(DiagnosticsRecord(
                t=float(row[0]), phi_max=float(row[1]), psi_max=float(row[2]),
                origin_dev=float(row[3]), energy=float(row[4]),
                energy_rel=float(row[5]), delta_e=float(row[6]),
                s=None if row[7] == "" else float(row[7]),
                min_w=float(row[8]),
            ))
    return records


def write_snapshot(state: FieldState, grid: Grid2D, config: RunConfig,
                   prefix) -> None:
    """One CSV per field (interior values) plus a JSON metadata sidecar."""
    prefix = pathlib.Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    for name in SNAPSHOT_FIELDS:
        field = getattr(state, name)
        np.savetxt(f"{prefix}_{name}.csv", field.interior,
                   delimiter=",", fmt="%.17g")
    meta = {
        "time": state.time,
        "grid": {"n": grid.n, "h": grid.h, "domain": grid.domain.value,
                 "x_min": grid.x_min},
        "config": format_config(config),
    }
    with open(f"{prefix}_meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def read_snapshot_field(prefix, name: str) -> np.ndarray:
    return np.loadtxt(f"{pathlib.Path(prefix)}_{name}.csv", delimiter=",")
