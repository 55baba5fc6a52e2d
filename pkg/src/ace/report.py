"""Project report: per-version quality metrics as CSV plus rendered figures."""

from __future__ import annotations

import csv
from pathlib import Path

from . import analyzer
from .store import Store

FIELDS = (
    "seq",
    "version_id",
    "origin",
    "clarity",
    "descriptive_words",
    "constraints",
    "examples",
)


def metric_rows(store: Store, project_id: str) -> list[dict]:
    rows = []
    for version in store.versions_of(project_id):
        report = analyzer.analyze(version.body)
        rows.append(
            {
                "seq": version.seq,
                "version_id": version.id,
                "origin": version.origin,
                "clarity": report.clarity.score,
                "descriptive_words": report.specificity.descriptive_words,
                "constraints": report.specificity.constraints,
                "examples": report.specificity.examples,
            }
        )
    return rows


def build_report(store: Store, project_id: str, out_dir: str) -> dict:
    """Write report.csv, clarity.png, and specificity.png under out_dir."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    project = store.get_project(project_id)
    rows = metric_rows(store, project_id)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    csv_path = out / "report.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=FIELDS)
        writer.writeheader()
        writer.writerows(rows)

    seqs = [r["seq"] for r in rows]

    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    ax.plot(seqs, [r["clarity"] for r in rows], marker="o", color="#2a6f97")
    ax.set_ylim(-0.2, 5.2)
    ax.set_xlabel("version")
    ax.set_ylabel("clarity (0-5)")
    ax.set_title(f"{project.name}: prompt clarity by version")
    if seqs:
        ax.set_xticks(seqs)
    fig.tight_layout()
    clarity_path = out / "clarity.png"
    fig.savefig(clarity_path, dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    for key, color in (
        ("descriptive_words", "#2a9d8f"),
        ("constraints", "#e76f51"),
        ("examples", "#577590"),
    ):
        ax.plot(seqs, [r[key] for r in rows], marker="o", label=key.replace("_", " "), color=color)
    ax.set_xlabel("version")
    ax.set_ylabel("count")
    ax.set_title(f"{project.name}: prompt specificity by version")
    if seqs:
        ax.set_xticks(seqs)
    ax.legend()
    fig.tight_layout()
    specificity_path = out / "specificity.png"
    fig.savefig(specificity_path, dpi=120)
    plt.close(fig)

    return {
        "csv": str(csv_path),
        "figures": [str(clarity_path), str(specificity_path)],
        "rows": rows,
    }
