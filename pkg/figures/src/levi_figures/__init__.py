"""Rendering for levi-ramsey CSV outputs.

Consumes only the primary tool's file interfaces (trajectory, fringe, and
thermal CSVs); performs no physics computation of its own.
"""

from .fringe import render_fringe
from .io import (FRINGE_HEADER, THERMAL_HEADER, TRAJECTORY_HEADER, SchemaError,
                 read_rows)
from .jobs import FigureJob, render
from .phase_space import render_phase_space
from .thermal import render_thermal

__version__ = "0.1.0"
