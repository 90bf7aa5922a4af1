"""Rendering fuzzing results to files: delimited trial data plus figures.

Each report directory receives a CSV with one row per trial/sample and PNG
figures summarising it.  Files are overwritten on re-run so a report
directory always reflects a single invocation.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import CiuResult, SuiteReport, TrialRecord


def write_equiv_report(result: CiuResult, records: Iterable[TrialRecord], outdir: str | Path) -> list[Path]:
    """equiv_trials.csv plus a step-count scatter and an outcome histogram."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "equiv_trials.csv"
    records = list(records)
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["trial", "state_len", "stack_depth",
             "left_kind", "left_steps", "right_kind", "right_steps"]
        )
        for r in records:
            writer.writerow(
                [r.trial, r.state_len, r.stack_depth,
                 r.left_kind, r.left_steps, r.right_kind, r.right_steps]
            )
    written.append(csv_path)

    both_done = [
        (r.left_steps, r.right_steps)
        for r in records
        if r.left_kind == "terminated" and r.right_kind == "terminated"
    ]
    fig, ax = plt.subplots(figsize=(5, 5))
    if both_done:
        xs, ys = zip(*both_done)
        ax.scatter(xs, ys, s=8, alpha=0.5)
        top = max(max(xs), max(ys))
        ax.plot([0, top], [0, top], lw=0.8, color="grey")
    ax.set_xlabel("left steps")
    ax.set_ylabel("right steps")
    ax.set_title(f"terminating trials: {len(both_done)}/{len(records)}")
    scatter_path = out / "equiv_steps.png"
    fig.savefig(scatter_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(scatter_path)

    counts: dict[str, int] = {}
    for r in records:
        key = f"{r.left_kind}/{r.right_kind}"
        counts[key] = counts.get(key, 0) + 1
    fig, ax = plt.subplots(figsize=(6, 3.5))
    keys = sorted(counts)
    ax.bar(keys, [counts[k] for k in keys])
    ax.set_ylabel("trials")
    ax.set_title(f"verdict: {result.verdict}")
    ax.tick_params(axis="x", rotation=20)
    hist_path = out / "equiv_outcomes.png"
    fig.savefig(hist_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(hist_path)
    return written


def write_safety_report(reports: Iterable[SuiteReport], outdir: str | Path) -> list[Path]:
    """safety_suites.csv plus a pass-rate bar chart across suites."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    reports = list(reports)

    csv_path = out / "safety_suites.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "passed", "total", "failures"])
        for r in reports:
            writer.writerow([r.name, r.passed, r.total, len(r.failures)])
    written.append(csv_path)

    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = [r.name for r in reports]
    rates = [r.passed / r.total if r.total else 1.0 for r in reports]
    ax.bar(names, rates)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("pass rate")
    ax.tick_params(axis="x", rotation=20)
    fig_path = out / "safety_pass_rates.png"
    fig.savefig(fig_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(fig_path)
    return written
