"""Result files: demand.csv, cells.csv and the run manifest."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable

from . import __version__
from .orchestrator import DemandCurve, DemandPoint

DEMAND_FILE = "demand.csv"
CELLS_FILE = "cells.csv"
MANIFEST_FILE = "manifest.json"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_demand_csv(path: Path, curve: DemandCurve) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["load", "demand", "status"])
        for p in curve.points:
            w.writerow([p.load, "" if p.demand is None else p.demand, p.status])


def read_demand_csv(path: Path) -> list[DemandPoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no demand rows")
    return [DemandPoint(int(r["load"]), int(r["demand"]) if r["demand"] else None) for r in rows]


def write_cells_csv(path: Path, curve: DemandCurve) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["load", "resources", "repetition", "slope", "dropped_ratio", "passed"])
        for cell in curve.cells:
            if cell.experiment is None:
                continue
            for trial in cell.experiment.trials:
                w.writerow([cell.load, cell.resources, trial.repetition, _fmt(trial.slope),
                            _fmt(trial.dropped_ratio), str(trial.passed).lower()])


def write_manifest(path: Path, resolved_config: dict[str, Any], curve: DemandCurve) -> None:
    doc = dict(resolved_config)
    doc["manifest"] = {"scalebench_version": __version__, "experiments_run": curve.experiments_run}
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path: Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_results(out_dir: Path, resolved_config: dict[str, Any], curve: DemandCurve) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_demand_csv(out_dir / DEMAND_FILE, curve)
    write_cells_csv(out_dir / CELLS_FILE, curve)
    write_manifest(out_dir / MANIFEST_FILE, resolved_config, curve)
    return out_dir


def find_runs(results_dir: Path) -> list[Path]:
    """Run directories holding a demand.csv: ``results_dir`` itself or its children."""
    if (results_dir / DEMAND_FILE).is_file():
        return [results_dir]
    return sorted(p.parent for p in results_dir.glob(f"*/{DEMAND_FILE}"))


def read_lag_csv(path: Path) -> list[tuple[float, float]]:
    """Parse a ``t_seconds,lag`` file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_seconds", "lag"]:
            raise ValueError(f"{path}: expected header 't_seconds,lag'")
        rows: list[tuple[float, float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number") from None
    return rows


def write_lag_csv(path: Path, samples: Iterable[tuple[float, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_seconds", "lag"])
        for t, lag in samples:
            w.writerow([repr(float(t)), lag])
