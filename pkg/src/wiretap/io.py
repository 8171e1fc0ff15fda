"""CSV and JSON export of boundaries and curves, and re-validation on read."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SIG_DIGITS = 12
REGION_HEADER = ("mu", "R", "Re")
CURVE_HEADER = ("px", "f", "fmu", "dfmu", "d2fmu")


def fmt(x: float) -> str:
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return f"{x:.{SIG_DIGITS}g}"


def round_floats(obj):
    """Copy of a JSON-able structure with floats cut to 12 significant digits."""
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(fmt(obj))
    if isinstance(obj, np.floating):
        return round_floats(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    return obj


def dumps(obj) -> str:
    return json.dumps(round_floats(obj), indent=2, allow_nan=True)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([fmt(float(v)) for v in r])
    return path


def read_csv(path, header):
    with Path(path).open(newline="") as fh:
        rd = csv.reader(fh)
        got = tuple(next(rd))
        if got != tuple(header):
            raise ValueError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
        return np.array([[float(v) for v in row] for row in rd], dtype=float).reshape(-1, len(header))


def write_region(boundary, outdir, stem: str = "region"):
    """<stem>.csv with mu,R,Re and <stem>.json with the sidecar."""
    outdir = Path(outdir)
    mu, R, Re = boundary.arrays()
    csv_path = write_csv(outdir / f"{stem}.csv", REGION_HEADER, zip(mu, R, Re))
    json_path = outdir / f"{stem}.json"
    json_path.write_text(dumps(boundary.sidecar()))
    return csv_path, json_path


def validate_region_rows(rows, C_B: float, tol: float = 1e-9):
    """Raise ValueError if the rows break 0 <= Re <= R <= C_B or mu ordering."""
    rows = np.asarray(rows, dtype=float)
    slack = tol + 10.0 ** (1 - SIG_DIGITS)
    mu, R, Re = rows.T
    if np.any(np.diff(mu) < 0):
        raise ValueError("mu column is not ascending")
    if np.any(Re < -slack) or np.any(Re > R + slack):
        raise ValueError("equivocation outside [0, R]")
    if np.any(R > C_B + slack):
        raise ValueError("rate exceeds C_B")
    return rows


def write_curve(sample, path):
    return write_csv(path, CURVE_HEADER, sample.rows())


def validate_curve_rows(rows, tol: float = 1e-9):
    """Grid ascending on [0, 1] and f_mu = f = 0 at both ends."""
    rows = np.asarray(rows, dtype=float)
    px = rows[:, 0]
    if np.any(np.diff(px) <= 0) or abs(px[0]) > tol or abs(px[-1] - 1) > tol:
        raise ValueError("px grid must ascend from 0 to 1")
    ends = rows[[0, -1]][:, 1:3]
    if np.max(np.abs(ends)) > tol:
        raise ValueError("f and f_mu must vanish at degenerate inputs")
    return rows
