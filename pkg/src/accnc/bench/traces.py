"""Trace files: one row per recorded iteration, CSV or JSON.

CSV files start with ``#``-prefixed metadata lines (run id, solver,
problem, eps, seed and RNG name), then a header row with the fixed column
order in :data:`COLUMNS`.  Floats are written with ``repr`` so that a
write/read round trip is exact.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

from ..problems import RNG_NAME


@dataclass(frozen=True)
class TraceRow:
    run_id: str
    solver: str
    problem: str
    eps: float
    seed: int
    phase: str
    iteration: int
    f: float
    grad_norm: float
    grad_calls: int
    hvp_calls: int


COLUMNS = tuple(f.name for f in fields(TraceRow))
_TYPES = {f.name: f.type for f in fields(TraceRow)}
_META_KEYS = ("run_id", "solver", "problem", "eps", "seed", "rng")


def _cast(name: str, raw):
    t = _TYPES[name]
    if t == "int":
        return int(raw)
    if t == "float":
        return float(raw)
    return str(raw)


def _json_float(x: float):
    # JSON has no NaN/inf literals; keep them as strings
    return x if math.isfinite(x) else repr(x)


def write_trace(path, rows: list[TraceRow], meta: dict, fmt: str = "csv") -> Path:
    """Write ``rows`` to ``path``; ``meta`` must hold run_id, solver, problem, eps and seed."""
    path = Path(path)
    meta = {**meta, "rng": RNG_NAME}
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for key in _META_KEYS:
                fh.write(f"# {key}={meta[key]!r}\n" if key == "eps" else f"# {key}={meta[key]}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for r in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])
    elif fmt == "json":
        doc = {
            "meta": {k: meta[k] for k in _META_KEYS},
            "columns": list(COLUMNS),
            "rows": [[_json_float(v) if isinstance(v, float) else v for v in astuple(r)] for r in rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
    return path


def read_trace(path) -> tuple[dict, list[TraceRow]]:
    """Inverse of :func:`write_trace`; the format is taken from the suffix."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if tuple(doc["columns"]) != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {doc['columns']}")
        rows = [TraceRow(*(_cast(c, v) for c, v in zip(COLUMNS, r))) for r in doc["rows"]]
        meta = dict(doc["meta"])
        meta["eps"] = float(meta["eps"])
        meta["seed"] = int(meta["seed"])
        return meta, rows
    meta: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        else:
            body.append(line)
    reader = csv.reader(body)
    header = tuple(next(reader))
    if header != COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    rows = [TraceRow(*(_cast(c, v) for c, v in zip(COLUMNS, rec))) for rec in reader]
    if "eps" in meta:
        meta["eps"] = float(meta["eps"])
    if "seed" in meta:
        meta["seed"] = int(meta["seed"])
    return meta, rows
