"""Offline reports: delimited aggregation tables with rendered figures.

Mirrors what the UI's aggregation panel shows (documents and mentions over
time and by party) as files suitable for inclusion in a writeup.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .index import CorpusIndex, aggregate, frequencies
from .kb_graph import EntityId


def _plot_aggregate(grouped: dict, dimension: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if not grouped:
        ax.text(0.5, 0.5, "no matching documents", ha="center", va="center",
                transform=ax.transAxes)
        ax.set_axis_off()
    else:
        keys = list(grouped)
        documents = [grouped[k][0] for k in keys]
        mentions = [grouped[k][1] for k in keys]
        positions = range(len(keys))
        if dimension == "party":
            ax.barh([p + 0.2 for p in positions], documents, height=0.4, label="documents")
            ax.barh([p - 0.2 for p in positions], mentions, height=0.4, label="mentions")
            ax.set_yticks(list(positions))
            ax.set_yticklabels([str(k) for k in keys])
            ax.invert_yaxis()
            ax.set_xlabel("count")
        else:
            ax.bar([p - 0.2 for p in positions], documents, width=0.4, label="documents")
            ax.bar([p + 0.2 for p in positions], mentions, width=0.4, label="mentions")
            ax.set_xticks(list(positions))
            ax.set_xticklabels([str(k) for k in keys], rotation=45, ha="right")
            ax.set_ylabel("count")
        ax.set_title(f"Matched documents and mentions by {dimension}")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_aggregate_report(
    index: CorpusIndex,
    entities: Iterable[EntityId],
    out_dir,
) -> list[Path]:
    """Write frequency and aggregation tables plus one figure per dimension.

    Produces frequencies.csv, aggregate_by_year.{csv,png}, and
    aggregate_by_party.{csv,png} under out_dir; returns the written paths.
    """
    entities = sorted(set(entities))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    freq_path = out_dir / "frequencies.csv"
    report = frequencies(index, entities)
    with open(freq_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity", "documents", "mentions", "absent"])
        for entity in entities:
            row = report.rows[entity]
            writer.writerow([entity, row.documents, row.mentions, str(row.absent).lower()])
    written.append(freq_path)

    for dimension in ("year", "party"):
        grouped = aggregate(index, entities, dimension)
        csv_path = out_dir / f"aggregate_by_{dimension}.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([dimension, "documents", "mentions"])
            for key, (documents, mentions) in grouped.items():
                writer.writerow([key, documents, mentions])
        written.append(csv_path)
        png_path = out_dir / f"aggregate_by_{dimension}.png"
        _plot_aggregate(grouped, dimension, png_path)
        written.append(png_path)
    return written
