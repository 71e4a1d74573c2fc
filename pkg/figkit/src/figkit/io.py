"""Readers for the trace CSV, ensemble CSV, and summary JSON schemas."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Raised when an input file does not match the documented schema."""


TRACE_FIXED_COLUMNS = (
    "condition",
    "trial",
    "t",
    "agent",
    "F_total",
    "rho_c",
    "rho_d",
    "sigma_c",
    "sigma_d",
    "eta_c",
    "eta_d",
    "G_c",
    "G_d",
    "gamma",
    "expected_G",
    "policy_c",
    "action",
    "ensemble_G",
)


def read_trace_csv(path) -> dict:
    """Load one trial trace into arrays keyed by column, shape (T, n_agents)."""
    path = Path(path)
    with path.open() as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in TRACE_FIXED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    agents = sorted({int(r["agent"]) for r in rows})
    n_agents = len(agents)
    horizon = max(int(r["t"]) for r in rows) + 1
    factor_cols = [c for c in header if c.startswith("F_factor_")]

    numeric = [c for c in TRACE_FIXED_COLUMNS if c not in ("condition",)] + factor_cols
    data = {c: np.full((horizon, n_agents), np.nan) for c in numeric}
    for r in rows:
        t = int(r["t"])
        a = int(r["agent"])
        for c in numeric:
            data[c][t, a] = float(r[c])
    data["condition"] = rows[0]["condition"]
    data["n_agents"] = n_agents
    data["horizon"] = horizon
    data["factor_columns"] = factor_cols
    return data


def read_ensemble_csv(path) -> dict:
    """Load an ensemble CSV into {trial: series} with the condition name."""
    path = Path(path)
    with path.open() as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ("condition", "trial", "t", "ensemble_G") if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    series = {}
    for r in rows:
        series.setdefault(int(r["trial"]), []).append((int(r["t"]), float(r["ensemble_G"])))
    out = {}
    for trial, pairs in series.items():
        pairs.sort()
        out[trial] = np.array([g for _, g in pairs])
    return {"condition": rows[0]["condition"], "series": out}


def read_summary_json(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    for key in ("condition", "config", "final_ensemble_G", "kde"):
        if key not in doc:
            raise SchemaError(f"{path}: missing key {key}")
    kde = doc["kde"]
    for key in ("bandwidth", "grid_start", "grid_step", "grid_size", "samples"):
        if key not in kde:
            raise SchemaError(f"{path}: missing key kde.{key}")
    return doc


def kde_grid(summary: dict) -> np.ndarray:
    kde = summary["kde"]
    return kde["grid_start"] + kde["grid_step"] * np.arange(kde["grid_size"])


def transition_times(summary: dict) -> list:
    return [int(t) for (t, _, _) in summary["config"].get("transitions", [])]
