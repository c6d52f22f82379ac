"""Report figures rendered to files alongside the delimited outputs.

All plotting uses the Agg backend so report generation works headless;
every function writes one PNG and returns its path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_loss_curve(epoch_losses, path, title="Pretraining loss") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(epoch_losses)), epoch_losses, marker="o", markersize=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean contrastive loss")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_confusion_matrix(confusion, path, title="Confusion matrix") -> Path:
    path = Path(path)
    counts = np.asarray(confusion, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    im = ax.imshow(counts, cmap="Blues")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046)
    if counts.shape[0] <= 16:
        for i in range(counts.shape[0]):
            for j in range(counts.shape[1]):
                if counts[i, j]:
                    ax.text(j, i, int(counts[i, j]), ha="center", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_per_category_accuracy(per_category, path, title="Per-category accuracy") -> Path:
    path = Path(path)
    cats = [row["category"] for row in per_category]
    accs = [row["accuracy"] if row["accuracy"] is not None else 0.0 for row in per_category]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(cats, accs, color="#4878a8")
    ax.set_xlabel("category")
    ax.set_ylabel("top-1 accuracy (%)")
    ax.set_ylim(0, 100)
    ax.set_title(title)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_accuracy_at_k(scores_by_k, path, title="Emotion inference accuracy") -> Path:
    """scores_by_k: {k: {"text_only": pct, "text_mg": pct}}"""
    path = Path(path)
    ks = sorted(scores_by_k)
    text_only = [scores_by_k[k]["text_only"] for k in ks]
    text_mg = [scores_by_k[k]["text_mg"] for k in ks]
    x = np.arange(len(ks))
    width = 0.38
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(x - width / 2, text_only, width, label="masked text only")
    ax.bar(x + width / 2, text_mg, width, label="masked text + micro-gestures")
    ax.set_xticks(x, [f"Acc@{k}" for k in ks])
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 100)
    ax.set_title(title)
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
