"""Report rendering: delimited census output plus matplotlib figures.

Kept separate from the CLI so that matplotlib is only imported when a
report is actually requested.
"""

from __future__ import annotations

import csv
import os

from .census import simplex_census
from .diagram import INF


def write_report(diag, outdir):
    """Render a census report into `outdir`: census.csv (tab-delimited),
    a per-rank histogram figure, and drawings of both diagram views.
    Returns the list of files written."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import networkx as nx

    os.makedirs(outdir, exist_ok=True)
    written = []

    census = simplex_census(diag)
    csv_path = os.path.join(outdir, "census.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["key", "rank", "count", "diagram"])
        for key, (count, size, text) in sorted(
            census.entries.items(), key=lambda kv: (kv[1][1], kv[0])
        ):
            writer.writerow([key.hex(), size, count, text.replace("\n", "; ").strip("; ")])
    written.append(csv_path)

    hist = census.by_rank()
    fig, ax = plt.subplots(figsize=(6, 4))
    ranks = sorted(hist)
    ax.bar(ranks, [hist[r] for r in ranks], color="#336699")
    ax.set_xlabel("simplex rank")
    ax.set_ylabel("count")
    ax.set_title("spherical-and-all complete subsets per rank")
    ax.set_xticks(ranks)
    fig.tight_layout()
    hist_path = os.path.join(outdir, "census_by_rank.png")
    fig.savefig(hist_path, dpi=150)
    plt.close(fig)
    written.append(hist_path)

    for view in ("c", "p"):
        g = nx.Graph()
        g.add_nodes_from(diag.gens)
        edge_labels = {}
        gs = diag.gens
        for i, a in enumerate(gs):
            for b in gs[i + 1 :]:
                m = diag.m(a, b)
                if view == "c" and m > 2:
                    g.add_edge(a, b)
                    if m != 3:
                        edge_labels[(a, b)] = "inf" if m is INF else str(m)
                elif view == "p" and m is not INF:
                    g.add_edge(a, b)
                    if m != 2:
                        edge_labels[(a, b)] = str(m)
        fig, ax = plt.subplots(figsize=(5, 5))
        pos = nx.spring_layout(g, seed=7)
        nx.draw_networkx(g, pos, ax=ax, node_color="#dddddd", edgecolors="#333333")
        if edge_labels:
            nx.draw_networkx_edge_labels(g, pos, edge_labels=edge_labels, ax=ax)
        ax.set_title("%s-view" % view.upper())
        ax.axis("off")
        fig.tight_layout()
        path = os.path.join(outdir, "diagram_%s.png" % view)
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
