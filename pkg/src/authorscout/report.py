"""Figure rendering for simulation reports.

Figures are written next to the delimited metrics output so a simulate run
leaves a self-contained report directory.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simharness import SimMetrics


def _by_policy(runs: list[SimMetrics]) -> dict[str, list[SimMetrics]]:
    grouped: dict[str, list[SimMetrics]] = {}
    for run in runs:
        grouped.setdefault(run.policy, []).append(run)
    return grouped


def _mean_series(runs: list[SimMetrics], attr: str) -> tuple[list[int], list[float]]:
    n_batches = min(len(r.batches) for r in runs)
    xs = list(range(n_batches))
    ys = [sum(getattr(r.batches[i], attr) for r in runs) / len(runs)
          for i in xs]
    return xs, ys


def render_figures(runs: list[SimMetrics], out_dir) -> list[str]:
    """Write the per-batch metric figures; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    grouped = _by_policy(runs)
    written = []

    panels = [
        ("community_hit_fraction", "Community-hit fraction per batch"),
        ("saved_author_count", "Cumulative saved authors per batch"),
        ("mean_saved_paper_score", "Mean model score of saved papers"),
    ]
    for attr, title in panels:
        fig, ax = plt.subplots(figsize=(6, 4))
        for policy in sorted(grouped):
            xs, ys = _mean_series(grouped[policy], attr)
            ax.plot(xs, ys, marker="o", label=policy)
        ax.set_xlabel("batch")
        ax.set_ylabel(attr.replace("_", " "))
        ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"{attr}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
