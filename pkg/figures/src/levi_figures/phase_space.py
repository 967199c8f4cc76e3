"""Phase-space trajectory figure: one closed curve per (label, spin sector)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import TRAJECTORY_HEADER, floats, read_rows
from .jobs import FigureJob

# start markers cycle per curve: filled circle first, filled square second
START_MARKERS = ("o", "s", "D", "^", "v", "P")
COLORS = ("tab:blue", "tab:red", "tab:green", "tab:purple", "tab:orange", "tab:brown")


def split_curves(rows):
    """Group rows into curves: a new curve starts when t resets or s_z changes."""
    curves = []
    current = []
    for row in rows:
        if current and (float(row["t"]) < float(current[-1]["t"])
                        or row["s_z"] != current[-1]["s_z"]):
            curves.append(current)
            current = []
        current.append(row)
    curves.append(current)
    return curves


def render_phase_space(job: FigureJob) -> Path:
    rows = read_rows(job.inputs[0], TRAJECTORY_HEADER)
    curves = split_curves(rows)
    fig, ax = plt.subplots(figsize=job.style.get("figsize", (6.0, 6.0)))
    for i, curve in enumerate(curves):
        re = floats(curve, "re_beta")
        im = floats(curve, "im_beta")
        s_z = curve[0]["s_z"]
        color = COLORS[i % len(COLORS)]
        label = f"s_z = {s_z}, start ({curve[0]['re_beta']}, {curve[0]['im_beta']})"
        if len(curve) == 1:
            ax.plot(re, im, linestyle="none", marker=START_MARKERS[i % len(START_MARKERS)],
                    color=color, markersize=9, label=label)
            continue
        ax.plot(re, im, color=color, linewidth=1.4, label=label)
        ax.plot(re[0], im[0], marker=START_MARKERS[i % len(START_MARKERS)],
                color=color, markersize=9)
        # direction arrows at a few interior points
        n = len(curve)
        for frac in (0.2, 0.55, 0.85):
            j = min(n - 2, max(0, int(frac * (n - 1))))
            ax.annotate("", xy=(re[j + 1], im[j + 1]), xytext=(re[j], im[j]),
                        arrowprops={"arrowstyle": "-|>", "color": color, "lw": 1.2})
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("Re beta")
    ax.set_ylabel("Im beta")
    ax.grid(True, linestyle=":", alpha=0.5)
    ax.legend(fontsize=8, loc="best")
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.style.get("dpi", 160), bbox_inches="tight")
    plt.close(fig)
    return out
