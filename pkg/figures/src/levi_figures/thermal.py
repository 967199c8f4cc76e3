"""Thermal-spread diagnostics: sampled labels and per-sample populations."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import THERMAL_HEADER, floats, read_rows
from .jobs import FigureJob


def render_thermal(job: FigureJob) -> Path:
    rows = read_rows(job.inputs[0], THERMAL_HEADER)
    re = floats(rows, "re_beta")
    im = floats(rows, "im_beta")
    p0 = floats(rows, "p0")
    fig, (ax_scatter, ax_spread) = plt.subplots(
        1, 2, figsize=job.style.get("figsize", (10.0, 4.5)))
    sc = ax_scatter.scatter(re, im, c=p0, s=8, cmap="viridis")
    ax_scatter.set_aspect("equal", adjustable="datalim")
    ax_scatter.set_xlabel("Re beta")
    ax_scatter.set_ylabel("Im beta")
    ax_scatter.set_title("sampled thermal labels")
    fig.colorbar(sc, ax=ax_scatter, label="P0")
    ax_spread.plot(range(len(p0)), p0, linestyle="none", marker=".", markersize=3,
                   color="tab:blue")
    ax_spread.set_xlabel("sample")
    ax_spread.set_ylabel("P0")
    ax_spread.set_title(f"per-sample P0 (first value {rows[0]['p0']})")
    ax_spread.grid(True, linestyle=":", alpha=0.5)
    fig.tight_layout()
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.style.get("dpi", 160))
    plt.close(fig)
    return out
