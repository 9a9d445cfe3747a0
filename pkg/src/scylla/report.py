"""Figure rendering for evaluation reports and activation graphs.

Figures are written to files next to the delimited output: the evaluation
path renders per-sentence score charts plus a corpus summary, and the
disambiguation path draws the layered activation graph.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from scylla.daisy import ActivationGraph
from scylla.metrics import EvalReport

_KIND_COLUMNS = {"word_form": 0, "lemma": 1, "lu": 2, "frame": 3}
_KIND_COLORS = {"word_form": "#4c72b0", "lemma": "#55a868", "lu": "#c44e52", "frame": "#8172b2"}


def render_eval_figures(report: EvalReport, outdir: str | Path, metric: str = "ter") -> list[Path]:
    """Write per-sentence and corpus-level charts; returns the file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    ids = [s.id for s in report.per_sentence]
    positions = range(len(ids))

    fig, (ax_ter, ax_bleu) = plt.subplots(2, 1, figsize=(max(6, len(ids) * 0.6), 6), sharex=True)
    ax_ter.bar(positions, [s.ter * 100 for s in report.per_sentence], color="#c44e52")
    ax_ter.set_ylabel("TER (%)")
    ax_ter.set_title("Per-sentence scores")
    ax_bleu.bar(positions, [s.bleu_smoothed for s in report.per_sentence], color="#4c72b0")
    ax_bleu.set_ylabel("BLEU (smoothed)")
    ax_bleu.set_xlabel("sentence")
    ax_bleu.set_xticks(list(positions))
    ax_bleu.set_xticklabels(ids, rotation=45, ha="right")
    fig.tight_layout()
    path = outdir / "scores_per_sentence.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(4, 4))
    ax.bar([0, 1], [report.corpus_bleu, report.mean_ter * 100], color=["#4c72b0", "#c44e52"])
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["corpus BLEU", "mean TER (%)"])
    ax.set_title("Corpus summary")
    fig.tight_layout()
    path = outdir / "corpus_summary.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def render_graph_figure(graph: ActivationGraph, path: str | Path, title: str = "") -> Path:
    """Draw the activation graph in layer columns, node size by activation."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    columns: dict[str, list] = {kind: [] for kind in _KIND_COLUMNS}
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        columns[node.kind].append(node)

    positions: dict[str, tuple[float, float]] = {}
    for kind, nodes in columns.items():
        x = _KIND_COLUMNS[kind]
        for row, node in enumerate(nodes):
            positions[node.id] = (float(x), -float(row))

    height = max((len(v) for v in columns.values()), default=1)
    fig, ax = plt.subplots(figsize=(10, max(3, height * 0.7)))
    for link in graph.links:
        x1, y1 = positions[link.source]
        x2, y2 = positions[link.target]
        ax.annotate(
            "",
            xy=(x2, y2),
            xytext=(x1, y1),
            arrowprops=dict(arrowstyle="->", color="#999999", alpha=0.6, lw=0.8),
        )
    for node in graph.nodes.values():
        x, y = positions[node.id]
        ax.scatter([x], [y], s=200 + 600 * node.output, color=_KIND_COLORS[node.kind], zorder=3)
        label = node.payload if len(node.payload) <= 28 else node.payload[:25] + "..."
        ax.annotate(
            f"{label}\nA={node.activation:.3f}",
            (x, y),
            textcoords="offset points",
            xytext=(0, 12),
            ha="center",
            fontsize=7,
            zorder=4,
        )
    ax.set_xticks(list(_KIND_COLUMNS.values()))
    ax.set_xticklabels(list(_KIND_COLUMNS))
    ax.set_yticks([])
    ax.set_xlim(-0.5, 3.5)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
