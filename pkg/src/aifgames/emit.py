"""Bit-stable CSV and JSON emission of trial traces and condition summaries.

Floats are written with 17 significant digits, '.' decimal point, fixed
column order, and LF line endings regardless of locale.
"""

from __future__ import annotations

import json
from pathlib import Path

from .harness import KDE_GRID, ConditionSummary, TrialRecord


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trace_columns(n_agents: int) -> list:
    return (
        ["condition", "trial", "t", "agent", "F_total"]
        + [f"F_factor_{n}" for n in range(n_agents)]
        + [
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
        ]
    )


def write_trace_csv(path: Path, record: TrialRecord, trial_index: int) -> None:
    n_agents = record.config.n_agents
    lines = [",".join(trace_columns(n_agents))]
    for t, row in enumerate(record.steps):
        for agent_idx, m in enumerate(row):
            fields = [
                record.config.name,
                str(trial_index),
                str(t),
                str(agent_idx),
                _fmt(m.f_total),
                *(_fmt(f) for f in m.f_factors),
                _fmt(m.pragmatic[0]),
                _fmt(m.pragmatic[1]),
                _fmt(m.salience[0]),
                _fmt(m.salience[1]),
                _fmt(m.novelty[0]),
                _fmt(m.novelty[1]),
                _fmt(m.efe[0]),
                _fmt(m.efe[1]),
                _fmt(m.gamma),
                _fmt(m.expected_g),
                _fmt(m.policy[0]),
                str(m.action),
                _fmt(record.ensemble_series[t]),
            ]
            lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def write_ensemble_csv(path: Path, records: list, condition: str) -> None:
    lines = ["condition,trial,t,ensemble_G"]
    for trial_index, record in enumerate(records):
        if record is None:
            continue
        for t, g in enumerate(record.ensemble_series):
            lines.append(f"{condition},{trial_index},{t},{_fmt(g)}")
    path.write_text("\n".join(lines) + "\n", newline="\n")


def write_summary_json(
    path: Path,
    summary: ConditionSummary,
    records: list | None = None,
    include_b_counts: bool = False,
) -> None:
    doc = {
        "condition": summary.name,
        "config": summary.config.to_dict(),
        "n_trials": summary.n_trials,
        "trial_seeds": summary.trial_seeds,
        "final_ensemble_G": summary.final_ensemble_g,
        "classifications": summary.classifications,
        "classification_histogram": summary.histogram,
        "kde": {
            "bandwidth": 0.08,
            "grid_start": float(KDE_GRID[0]),
            "grid_step": 0.01,
            "grid_size": int(KDE_GRID.size),
            "samples": [float(v) for v in summary.kde_samples],
        },
        "failures": summary.failures,
    }
    if include_b_counts and records is not None:
        doc["final_b_counts"] = [
            None if r is None else r.final_b_counts for r in records
        ]
    path.write_text(json.dumps(doc, indent=2) + "\n", newline="\n")
