"""CSV and JSON persistence with 17-significant-digit floats."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import IoFailure
from .radial import CumulativeMass, RadialGrid, RadialPotential


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_radial_csv(obj: RadialPotential | CumulativeMass, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "value"])
            for r, v in zip(obj.grid.nodes, obj.values):
                w.writerow([fmt(r), fmt(v)])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _read_columns(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not rows or set(rows[0]) != {"r", "value"}:
        raise IoFailure(f"{path}: expected columns r,value")
    r = np.array([float(row["r"]) for row in rows])
    v = np.array([float(row["value"]) for row in rows])
    return r, v


def read_radial_potential(path, n: int) -> RadialPotential:
    r, v = _read_columns(path)
    grid = RadialGrid(n, float(r[-1]), r)
    return RadialPotential(grid, v)


def read_cumulative_mass(path, n: int) -> CumulativeMass:
    r, v = _read_columns(path)
    grid = RadialGrid(n, float(r[-1]), r)
    return CumulativeMass(grid, v)


def _clean(obj):
    # JSON has no NaN/inf; emit null instead
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(obj: dict, path) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(_clean(obj), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
