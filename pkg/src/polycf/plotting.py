"""Matplotlib rendering of the CLI's curve families to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_curves(
    path: str,
    x,
    series: dict,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
    title: str | None = None,
) -> None:
    """Write one figure with a line per entry of ``series`` to ``path``."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, y in series.items():
        ax.plot(x, y, lw=1.4, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
