"""Multi-panel time-series and ensemble figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import kde_grid, transition_times

COOPERATE_COLOR = "#3465c0"
DEFECT_COLOR = "#e87ba8"


def gaussian_kde(values, bandwidth: float, grid) -> np.ndarray:
    """Gaussian-kernel density over a fixed grid; mirrors the harness formula."""
    values = np.asarray(list(values), dtype=float)
    grid = np.asarray(grid, dtype=float)
    if values.size == 0:
        raise ValueError("need at least one value")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    z = (grid[:, None] - values[None, :]) / bandwidth
    dens = np.exp(-0.5 * z**2) / (bandwidth * np.sqrt(2.0 * np.pi))
    return dens.mean(axis=1)


def _annotate_transitions(ax, times) -> None:
    for t_x in times:
        ax.axvline(t_x, color="0.4", linestyle="--", linewidth=0.8)


def plot_timeseries(trace: dict, out_path, summary: dict | None = None) -> Path:
    """Fig.-2-style panels: per-agent VFE, EFE components, gamma, policy heatmap.

    One column per agent; rows are VFE, -rho, sigma, eta, gamma, and the
    policy heatmap (lighter = more probable, top row = cooperate).
    """
    n_agents = trace["n_agents"]
    horizon = trace["horizon"]
    times = transition_times(summary) if summary else []
    t = np.arange(horizon)

    fig, axes = plt.subplots(
        6, n_agents, figsize=(4.2 * n_agents, 11), sharex=True, squeeze=False
    )
    for a in range(n_agents):
        col = axes[:, a]
        col[0].plot(t, trace["F_total"][:, a], color="0.15", linewidth=0.8)
        col[0].set_ylabel("F" if a == 0 else "")

        for row, key, label in ((1, "rho", "-rho"), (2, "sigma", "sigma"), (3, "eta", "eta")):
            c_vals = trace[f"{key}_c"][:, a]
            d_vals = trace[f"{key}_d"][:, a]
            if key == "rho":
                c_vals, d_vals = -c_vals, -d_vals
            col[row].plot(t, c_vals, color=COOPERATE_COLOR, linewidth=0.8, label="cooperate")
            col[row].plot(t, d_vals, color=DEFECT_COLOR, linewidth=0.8, label="defect")
            col[row].set_ylabel(label if a == 0 else "")

        col[4].plot(t, trace["gamma"][:, a], color="0.15", linewidth=0.8)
        col[4].set_ylabel("gamma" if a == 0 else "")

        policy = np.vstack([trace["policy_c"][:, a], 1.0 - trace["policy_c"][:, a]])
        col[5].imshow(
            policy, aspect="auto", cmap="gray", vmin=0.0, vmax=1.0,
            extent=(0, horizon, 1.5, -0.5), interpolation="nearest",
        )
        col[5].set_yticks([0, 1], ["C", "D"])
        col[5].set_ylabel("policy" if a == 0 else "")
        col[5].set_xlabel("t")
        col[0].set_title(f"agent {a}")
        for ax in col[:5]:
            _annotate_transitions(ax, times)
    axes[1, 0].legend(loc="upper right", fontsize=7)

    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_ensemble(ensembles: list, summaries: list, out_path) -> Path:
    """Fig.-3-style panels: superimposed ensemble series plus a final-value KDE.

    One panel per condition (series drawn with low opacity so overlaps read
    darker) and one shared KDE panel of the final values.
    """
    if not ensembles:
        raise ValueError("need at least one condition")
    n_panels = len(ensembles) + 1
    n_cols = min(3, n_panels)
    n_rows = -(-n_panels // n_cols)
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(4.2 * n_cols, 2.8 * n_rows), squeeze=False
    )
    flat = axes.ravel()

    by_name = {s["condition"]: s for s in summaries}
    kde_ax = flat[len(ensembles)]
    for idx, ens in enumerate(ensembles):
        ax = flat[idx]
        for series in ens["series"].values():
            ax.plot(series, color="0.2", alpha=0.25, linewidth=0.7)
        ax.set_title(ens["condition"], fontsize=9)
        ax.set_xlabel("t")
        ax.set_ylabel("ensemble G")
        summary = by_name.get(ens["condition"])
        if summary is not None:
            _annotate_transitions(ax, transition_times(summary))
            grid = kde_grid(summary)
            finals = [float(s[-1]) for s in ens["series"].values()]
            dens = gaussian_kde(finals, summary["kde"]["bandwidth"], grid)
            kde_ax.plot(grid, dens, linewidth=0.9, label=ens["condition"])
    kde_ax.set_title("final-value KDE", fontsize=9)
    kde_ax.set_xlabel("ensemble G at horizon")
    kde_ax.legend(fontsize=7)
    for ax in flat[n_panels:]:
        ax.set_visible(False)

    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
