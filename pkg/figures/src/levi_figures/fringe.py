"""Fringe figure: central-state population versus tilt angle, with envelope."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import FRINGE_HEADER, floats, read_rows
from .jobs import FigureJob


def render_fringe(job: FigureJob) -> Path:
    rows = read_rows(job.inputs[0], FRINGE_HEADER)
    theta = floats(rows, "theta")
    p0 = floats(rows, "p0")
    contrast = floats(rows, "contrast")
    fig, ax = plt.subplots(figsize=job.style.get("figsize", (7.0, 4.5)))
    if len(rows) == 1:
        ax.plot(theta, p0, marker="o", color="tab:blue")
    else:
        ax.plot(theta, p0, color="tab:blue", linewidth=1.6, label="P0")
    if any(c < 1.0 for c in contrast):
        hi = [0.5 * (1 + c) for c in contrast]
        lo = [0.5 * (1 - c) for c in contrast]
        ax.plot(theta, hi, color="tab:gray", linestyle="--", linewidth=1.0,
                label="(1 +- C)/2 envelope")
        ax.plot(theta, lo, color="tab:gray", linestyle="--", linewidth=1.0)
        # annotation copied verbatim from the file
        ax.annotate(f"contrast = {rows[0]['contrast']}", xy=(0.02, 0.95),
                    xycoords="axes fraction", fontsize=8)
    ax.set_xlabel("theta (rad)")
    ax.set_ylabel("P0")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, linestyle=":", alpha=0.5)
    if len(rows) > 1:
        ax.legend(fontsize=8, loc="lower right")
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.style.get("dpi", 160), bbox_inches="tight")
    plt.close(fig)
    return out
