# geometry.py
"""Obstacle outlines recovered from a run's configuration text.

Rendering wants the obstacle regions drawn over the density heatmaps, but
snapshots store only cell values.  The configuration format is part of the
simulator's external interface, so we parse just enough of it here: the
``obstacle.N.*`` blocks (and optionally the side walls) become corner
polygons in physical coordinates.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def _blocks(text: str) -> dict:
    """Group ``prefix.N.key = value`` lines of one flat config text."""
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or "=" not in line:
            continue
        key, raw = (s.strip() for s in line.split("=", 1))
        out[key] = raw
    return out


def _rect_polygon(xmin, xmax, ymin, ymax):
    return np.array([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)])


def _strip_polygon(cx, cy, length, width, angle_deg):
    a = math.radians(angle_deg)
    u = np.array([math.cos(a), math.sin(a)])  # along the strip
    w = np.array([-math.sin(a), math.cos(a)])  # across
    c = np.array([cx, cy])
    return np.array(
        [
            c - u * length / 2 - w * width / 2,
            c + u * length / 2 - w * width / 2,
            c + u * length / 2 + w * width / 2,
            c - u * length / 2 + w * width / 2,
        ]
    )


def obstacles_from_config(path, include_walls=False):
    """Return the obstacle regions of a config file as corner polygons.

    Each polygon is an (n, 2) array of (x, y) vertices.  With
    ``include_walls`` the two repulsive edge strips are appended when
    ``walls.enabled`` is set (they need the grid keys to know the domain
    extent).
    """
    values = _blocks(Path(path).read_text())
    polys = []
    idx = 1
    while f"obstacle.{idx}.shape" in values:
        pre = f"obstacle.{idx}."
        shape = values[pre + "shape"]
        if shape == "rect":
            polys.append(_rect_polygon(*(float(v) for v in values[pre + "rect"].split(","))))
        elif shape == "strip":
            polys.append(
                _strip_polygon(
                    *(float(values[pre + k]) for k in ("cx", "cy", "length", "width", "angle"))
                )
            )
        idx += 1
    if include_walls and values.get("walls.enabled", "false").lower() in ("true", "1", "yes"):
        x0 = float(values.get("grid.x0", 0.0))
        y0 = float(values.get("grid.y0", 0.0))
        x1 = x0 + int(values["grid.nx"]) * float(values["grid.dx"])
        y1 = y0 + int(values["grid.ny"]) * float(values["grid.dy"])
        w = float(values.get("walls.width", 0.02))
        polys.append(_rect_polygon(x0, x1, y0, y0 + w))
        polys.append(_rect_polygon(x0, x1, y1 - w, y1))
    return polys
