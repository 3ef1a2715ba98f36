"""Figure rendering for report data (opt-in via the CLI --plot flag).

Figures are a convenience view of the delimited reports; the CSV/JSON files
remain the canonical outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["geometry_figure", "count_figure", "witness_figure"]


def geometry_figure(r, table: dict, path) -> None:
    """Curvature scalars and the Hardy weight against radius."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for key in ("A", "B", "C"):
        ax1.plot(r, table[key], label=key)
    ax1.set_xlabel("r")
    ax1.set_ylabel("curvature scalars")
    ax1.legend()
    ax2.plot(r, table["W"], color="tab:red", label="W")
    ax2.set_xlabel("r")
    ax2.set_ylabel("Hardy weight")
    ax2.legend()
    if len(r) > 1 and r[-1] / max(r[0], 1e-300) > 30:
        ax1.set_xscale("log")
        ax2.set_xscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def count_figure(L_values, counts, threshold: float, classification: str, path) -> None:
    """Bound-state count against truncation radius."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(L_values, counts, where="post", marker="o")
    ax.set_xscale("log")
    ax.set_xlabel("truncation radius L")
    ax.set_ylabel("eigenvalues below threshold")
    ax.set_title(f"threshold {threshold:g}: {classification}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def witness_figure(entries, path) -> None:
    """Supports and energies of the disjoint witness family."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, e in enumerate(entries):
        lo, hi = e["support"]
        ax.plot([lo, hi], [e["form_value"]] * 2, lw=4, solid_capstyle="butt")
        ax.annotate(f"k={e['k']}", ((lo * hi) ** 0.5, e["form_value"]), textcoords="offset points", xytext=(0, 6), ha="center")
    bounds = [e["analytic_bound"] for e in entries]
    ax.axhline(np.max(bounds), color="gray", ls="--", lw=1, label="analytic bound")
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("form value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
