"""Matplotlib figures written next to the delimited output (Agg backend, files only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import Dist, Kernel, fmt_rat  # noqa: E402


def _out(plot_dir, name: str) -> Path:
    d = Path(plot_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def kernel_heatmap(k: Kernel, path, title: str = "") -> Path:
    """Column-stochastic heatmap (columns are sources), annotated with exact entries."""
    m = k.matrix()
    data = np.array([[float(v) for v in row] for row in m])
    fig, ax = plt.subplots(figsize=(1 + 0.6 * len(k.source), 1 + 0.6 * len(k.target)))
    ax.imshow(data, vmin=0, vmax=1, cmap="Blues")
    ax.set_xticks(range(len(k.source)), k.source.labels, rotation=45, ha="right")
    ax.set_yticks(range(len(k.target)), k.target.labels)
    ax.set_xlabel("source")
    ax.set_ylabel("target")
    if len(k.source) * len(k.target) <= 400:
        for i, row in enumerate(m):
            for j, v in enumerate(row):
                if v:
                    ax.text(j, i, fmt_rat(v), ha="center", va="center", fontsize=7,
                            color="white" if v > 0.5 else "black")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def dist_bars(d: Dist, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(1.5 + 0.5 * len(d.space), 3))
    ax.bar(range(len(d.space)), [float(v) for v in d.mass], color="tab:blue")
    ax.set_xticks(range(len(d.space)), d.space.labels, rotation=45, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("mass")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def analysis_figures(plot_dir, sys, inv) -> list:
    files = [
        kernel_heatmap(inv.e_D.kernel, _out(plot_dir, "e_D.png"), "e_D"),
        dist_bars(sys.p, _out(plot_dir, "p.png"), "p"),
        dist_bars(inv.p_inv, _out(plot_dir, "p_inv.png"), "p_inv"),
    ]
    for name, m in zip(sys.names, sys.generators):
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
        files.append(kernel_heatmap(m, _out(plot_dir, f"generator_{safe}.png"), name))
    return files


def orbit_figure(plot_dir, names, weights) -> Path:
    path = _out(plot_dir, "orbit_weights.png")
    fig, ax = plt.subplots(figsize=(1.5 + 0.4 * len(names), 3))
    ax.bar(range(len(names)), [float(w) for w in weights], color="tab:green")
    ax.set_xticks(range(len(names)), names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("p(orbit)")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def law_figure(plot_dir, reports) -> Path:
    path = _out(plot_dir, "laws.png")
    names = [r.law for r in reports]
    fig, ax = plt.subplots(figsize=(2 + 0.35 * len(names), 3.5))
    ax.bar(range(len(names)), [r.seconds for r in reports],
           color=["tab:blue" if r.ok else "tab:red" for r in reports])
    ax.set_xticks(range(len(names)), names, rotation=70, ha="right", fontsize=7)
    ax.set_ylabel("seconds")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
