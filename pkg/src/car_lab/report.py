"""Report emission: JSON-lines records, CSV sweeps, and matplotlib figures.

The delimited outputs are the machine contract (diffable, plot-able); the
figures are rendered next to them so a suite run leaves a human-readable
trace in the same directory.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def records_to_jsonl(records, timings: bool = False) -> str:
    return "\n".join(json.dumps(r.to_json_dict(timings=timings), sort_keys=True)
                     for r in records) + "\n"


def write_records_jsonl(records, path: str, timings: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(records_to_jsonl(records, timings=timings))


def write_summary_csv(records, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check_id", "pass", "residual", "tolerance", "window"])
        for r in records:
            writer.writerow([r.check_id, r.passed, _residual(r), r.tolerance, r.window])


def _residual(record) -> float:
    try:
        return abs(complex(record.value) - complex(record.expected))
    except (TypeError, ValueError):
        return 0.0 if record.passed else float("nan")


def render_suite_figure(records, path: str) -> None:
    """Residual-vs-tolerance chart, one bar per check, log scale."""
    ids = [r.check_id for r in records]
    residuals = np.array([max(_residual(r), 1e-18) for r in records])
    tols = np.array([max(r.tolerance, 1e-18) for r in records])
    colors = ["tab:green" if r.passed else "tab:red" for r in records]
    height = max(2.5, 0.22 * len(ids))
    fig, ax = plt.subplots(figsize=(9, height))
    y = np.arange(len(ids))
    ax.barh(y, residuals, color=colors, alpha=0.8)
    ax.plot(tols, y, "k|", markersize=8, label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels(ids, fontsize=6)
    ax.invert_yaxis()
    ax.set_xlabel("|value - expected| (bars) vs tolerance (ticks)")
    ax.set_title(f"verification records: {sum(r.passed for r in records)}/{len(records)} pass")
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_sweep_csv(rows, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "value", "delta_from_largest", "monotone_decreasing"])
        for row in rows:
            writer.writerow([row["window"], repr(row["value"]), repr(row["delta"]),
                             row.get("monotone_decreasing", "")])


def render_sweep_figure(rows, path: str, check_id: str = "") -> None:
    windows = [row["window"] for row in rows]
    values = [row["value"] for row in rows]
    deltas = [max(row["delta"], 1e-18) for row in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
    ax1.plot(windows, values, "o-")
    ax1.set_xlabel("n_max")
    ax1.set_ylabel("value")
    ax1.set_title(f"{check_id} vs window")
    ax2.semilogy(windows[:-1], deltas[:-1], "s-")
    ax2.set_xlabel("n_max")
    ax2.set_ylabel("|value - value(largest)|")
    ax2.set_title("convergence")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_report_dir(records, directory: str, timings: bool = False) -> dict:
    """Write records.jsonl, summary.csv, and records.png into a directory."""
    os.makedirs(directory, exist_ok=True)
    paths = {
        "jsonl": os.path.join(directory, "records.jsonl"),
        "csv": os.path.join(directory, "summary.csv"),
        "figure": os.path.join(directory, "records.png"),
    }
    write_records_jsonl(records, paths["jsonl"], timings=timings)
    write_summary_csv(records, paths["csv"])
    render_suite_figure(records, paths["figure"])
    return paths
