# __init__.py
"""plotkit: offline rendering for beltflow run archives.

Reads only the simulator's documented file formats (snapshot CSV/binary,
outflow CSV, configuration text) and writes PNG heatmap sequences and
outflow diagrams.
"""

from .geometry import obstacles_from_config
from .readers import (
    ParseError,
    SnapshotFrame,
    load_archive,
    read_frame_binary,
    read_frame_csv,
    read_outflow,
)
from .render import frame_rgb, render_heatmaps, render_outflow, run_scale

__all__ = [
    "ParseError",
    "SnapshotFrame",
    "frame_rgb",
    "load_archive",
    "obstacles_from_config",
    "read_frame_binary",
    "read_frame_csv",
    "read_outflow",
    "render_heatmaps",
    "render_outflow",
    "run_scale",
]
