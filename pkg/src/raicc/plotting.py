"""Figures written next to the JSON/CSV reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path) -> None:
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def ranked_bars(path, labels, values, title: str, ylabel: str) -> None:
    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(labels) + 2), 4.5))
    xs = range(len(labels))
    ax.bar(xs, values, color="#4c72b0")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([l.rsplit(".", 1)[-1] for l in labels], rotation=60, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _save(fig, path)


def level_histogram(path, histogram: dict[int, int]) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    top = max(histogram, default=1)
    levels = list(range(1, top + 1))
    ax.bar(levels, [histogram.get(l, 0) for l in levels], color="#55a868")
    ax.set_xlabel("API level")
    ax.set_ylabel("AICC methods added")
    ax.set_title("AICC methods by API level of introduction")
    ax.set_xticks(levels)
    ax.tick_params(axis="x", labelsize=7)
    _save(fig, path)


def link_bars(path, rows) -> None:
    """Stacked before/added bars per component type."""
    names = [r.target_type for r in rows]
    before = [r.before for r in rows]
    added = [r.added for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, before, label="standard ICC", color="#4c72b0")
    ax.bar(names, added, bottom=before, label="revealed by instrumentation", color="#dd8452")
    ax.set_ylabel("ICC links")
    ax.set_title("ICC links before and after instrumentation")
    ax.legend()
    _save(fig, path)


def score_bars(path, before, after) -> None:
    names = ["precision", "recall", "F1"]
    b = [before.precision, before.recall, before.f1]
    a = [after.precision, after.recall, after.f1]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(names))
    ax.bar([x - 0.2 for x in xs], b, width=0.4, label="before", color="#8c8c8c")
    ax.bar([x + 0.2 for x in xs], a, width=0.4, label="after", color="#4c72b0")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names)
    ax.set_ylim(0, 1.05)
    ax.set_title("Leak detection on the benchmark corpus")
    ax.legend()
    _save(fig, path)
