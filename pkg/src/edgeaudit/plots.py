"""Figure rendering for the report path (matplotlib, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

HIST_BINS = np.linspace(-1.0, 1.0, 51)


def score_histogram_csv(scores: np.ndarray, is_fake: np.ndarray | None, path) -> None:
    """Score histogram over 50 uniform bins on [-1, 1], split by class when
    ground truth is available."""
    scores = np.asarray(scores, dtype=np.float64)
    clipped = np.clip(scores, -1.0, 1.0)
    all_counts, _ = np.histogram(clipped, bins=HIST_BINS)
    if is_fake is not None:
        fake_counts, _ = np.histogram(clipped[is_fake], bins=HIST_BINS)
        orig_counts, _ = np.histogram(clipped[~is_fake], bins=HIST_BINS)
    else:
        fake_counts = np.zeros_like(all_counts)
        orig_counts = all_counts
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("bin_lo,bin_hi,count_all,count_fake,count_original\n")
        for i in range(50):
            fh.write(
                f"{HIST_BINS[i]:.17g},{HIST_BINS[i + 1]:.17g},"
                f"{all_counts[i]},{fake_counts[i]},{orig_counts[i]}\n"
            )


def save_roc_figure(roc, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(roc.points[:, 0], roc.points[:, 1], lw=1.5, label=f"AUC = {roc.auc:.3f}")
    ax.plot([0, 1], [0, 1], ls="--", lw=0.8, color="gray", label="random")
    ax.set_xlabel("false-positive rate")
    ax.set_ylabel("true-positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_score_histogram(scores: np.ndarray, is_fake: np.ndarray | None, path) -> None:
    scores = np.asarray(scores, dtype=np.float64)
    clipped = np.clip(scores, -1.0, 1.0)
    fig, ax = plt.subplots(figsize=(6, 4))
    if is_fake is not None and is_fake.any() and (~is_fake).any():
        ax.hist(clipped[~is_fake], bins=HIST_BINS, alpha=0.6, label="original", density=True)
        ax.hist(clipped[is_fake], bins=HIST_BINS, alpha=0.6, label="fake", density=True)
        ax.legend()
    else:
        ax.hist(clipped, bins=HIST_BINS, alpha=0.8, density=True)
    ax.set_xlabel("edge plausibility")
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows: list[dict], path) -> None:
    """AUC against embedding dimension, one line per (l, t) setting."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_lt: dict[tuple[int, int], list[tuple[int, float]]] = {}
    for r in rows:
        by_lt.setdefault((r["l"], r["t"]), []).append((r["d"], r["auc"]))
    for (l, t), pts in sorted(by_lt.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"l={l}, t={t}")
    ax.set_xlabel("embedding dimension")
    ax.set_ylabel("AUC")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
