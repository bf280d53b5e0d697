"""Figure rendering for reports: per-character error profiles, pivot
rankings, and experiment-grid compositions.

Everything renders headless (Agg) straight to image files so reports can be
generated on machines without a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_per_char(
    per_char: dict[str, float],
    outliers,
    out_path: str | Path,
    threshold: float = 0.25,
    relative: bool = False,
    title: str = "Per-character substitution+deletion proportion",
) -> Path:
    """Bar chart of per-character error proportions with the outlier band."""
    out_path = Path(out_path)
    chars = sorted(per_char)
    values = [per_char[c] for c in chars]
    mean = sum(values) / len(values) if values else 0.0
    colors = ["#c0392b" if c in outliers else "#4878a8" for c in chars]

    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(chars) + 2.0), 4.0))
    ax.bar(range(len(chars)), values, color=colors)
    ax.set_xticks(range(len(chars)))
    ax.set_xticklabels([repr(c)[1:-1] if c.isspace() else c for c in chars])
    ax.axhline(mean, color="#333333", linewidth=1.0, linestyle="--", label=f"mean = {mean:.3f}")
    band = threshold * mean if relative else threshold
    ax.axhspan(max(0.0, mean - band), mean + band, color="#cccccc", alpha=0.4, label=f"±{band:.2f} band")
    ax.set_xlabel("reference character")
    ax.set_ylabel("proportion of occurrences")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_ranking(ranking, out_path: str | Path, title: str | None = None) -> Path:
    """Horizontal bars of composite distances, nearest pivot on top."""
    out_path = Path(out_path)
    codes = [code for code, _, _ in ranking.scored]
    scores = [score for _, score, _ in ranking.scored]

    fig, ax = plt.subplots(figsize=(6.0, max(2.5, 0.45 * len(codes) + 1.0)))
    pos = range(len(codes))
    ax.barh(pos, scores, color="#4878a8")
    ax.set_yticks(pos)
    ax.set_yticklabels(codes)
    ax.invert_yaxis()
    for i, score in enumerate(scores):
        ax.text(score, i, f" {score:.3f}", va="center", fontsize=8)
    ax.set_xlabel("composite distance (smaller is closer)")
    ax.set_title(title or f"Pivot candidates for {ranking.target}")
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_grid(grid, out_path: str | Path, title: str = "Training-set composition per grid cell") -> Path:
    """Stacked bars per cell: duplicated-authentic mass under synthetic mass."""
    out_path = Path(out_path)
    labels = [c.label for c in grid.cells]
    authentic = [c.duplication_factor * c.authentic_count for c in grid.cells]
    synthetic = [c.synthetic_count for c in grid.cells]

    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(labels) + 2.0), 4.0))
    pos = range(len(labels))
    ax.bar(pos, authentic, color="#4878a8", label="authentic x d")
    ax.bar(pos, synthetic, bottom=authentic, color="#e0a030", label="synthetic")
    ax.set_xticks(pos)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("training utterances")
    ax.set_title(title)
    ax.legend()
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path
