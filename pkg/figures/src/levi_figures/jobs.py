"""Figure jobs: declarative description of one rendering task."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("phase-space", "fringe", "thermal")


@dataclass(frozen=True)
class FigureJob:
    """One rendering task: input CSV(s), kind, output image, style options.

    The output format follows the output suffix (.png default, .svg works
    the same way).  Rendering never mutates or reorders the input data.
    """

    inputs: tuple[str, ...]
    kind: str
    output: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("a figure job needs at least one input CSV")


def render(job: FigureJob) -> Path:
    """Dispatch a job to its renderer; returns the written image path."""
    if job.kind == "phase-space":
        from .phase_space import render_phase_space
        return render_phase_space(job)
    if job.kind == "fringe":
        from .fringe import render_fringe
        return render_fringe(job)
    from .thermal import render_thermal
    return render_thermal(job)
