# readers.py
"""Parsers for the simulator's archive file formats.

plotkit never imports the solver; it consumes the documented on-disk
formats only:

  * snapshot CSV: header "t,class,i,j,x,y,rho", one row per cell per class
  * snapshot binary: 16-byte header (magic "NLCL", little-endian u32 nx,
    ny, class count) followed by row-major float64 values per class
  * outflow CSV: header "t,U_class1,U_class2,...", one row per step
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"NLCL"
CSV_HEADER = "t,class,i,j,x,y,rho"


class ParseError(ValueError):
    """Raised when an archive file does not match its documented format."""


@dataclass
class SnapshotFrame:
    """One stored simulation state: time, per-class cell values, extents.

    ``fields`` is a list of (ny, nx) arrays, one per class in class-id
    order; ``extent`` is (x0, x1, y0, y1) in physical coordinates (cell
    edges, suitable for image axes).
    """

    t: float
    fields: list
    extent: tuple

    def __post_init__(self):
        shape = self.fields[0].shape
        if any(f.shape != shape for f in self.fields):
            raise ParseError("per-class tables have mismatched shapes")

    @property
    def shape(self):
        return self.fields[0].shape


def read_frame_csv(path) -> SnapshotFrame:
    """Read one snapshot CSV into a SnapshotFrame.

    Extents are recovered from the stored cell-center coordinates (the
    format stores centers; edges are centers +/- half a cell).
    """
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ParseError(f"{path}: unexpected snapshot header {header!r}")
            t = 0.0
            rows = []
            for line in fh:
                parts = line.rstrip("\n").split(",")
                if len(parts) != 7:
                    raise ParseError(f"{path}: malformed row {line!r}")
                rows.append(
                    (int(parts[1]), int(parts[3]), int(parts[2]),
                     float(parts[4]), float(parts[5]), float(parts[6]))
                )
                t = float(parts[0])
    except (ValueError, OSError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: no data rows")

    ncls = max(r[0] for r in rows)
    ny = max(r[1] for r in rows) + 1
    nx = max(r[2] for r in rows) + 1
    fields = [np.zeros((ny, nx)) for _ in range(ncls)]
    xmin = xmax = rows[0][3]
    ymin = ymax = rows[0][4]
    for c, j, i, x, y, rho in rows:
        fields[c - 1][j, i] = rho
        xmin, xmax = min(xmin, x), max(xmax, x)
        ymin, ymax = min(ymin, y), max(ymax, y)
    dx = (xmax - xmin) / (nx - 1) if nx > 1 else 2.0 * xmin
    dy = (ymax - ymin) / (ny - 1) if ny > 1 else 2.0 * ymin
    extent = (xmin - dx / 2, xmax + dx / 2, ymin - dy / 2, ymax + dy / 2)
    return SnapshotFrame(t, fields, extent)


def read_frame_binary(path, extent=None, t=0.0) -> SnapshotFrame:
    """Read one binary snapshot into a SnapshotFrame.

    The binary format stores neither coordinates nor time, so ``extent``
    defaults to cell indices and ``t`` to 0 unless supplied.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(16)
            if len(head) != 16:
                raise ParseError(f"{path}: truncated header")
            magic, nx, ny, ncls = struct.unpack("<4sIII", head)
            if magic != MAGIC:
                raise ParseError(f"{path}: bad magic {magic!r}")
            fields = []
            for _ in range(ncls):
                buf = fh.read(8 * nx * ny)
                if len(buf) != 8 * nx * ny:
                    raise ParseError(f"{path}: truncated payload")
                fields.append(np.frombuffer(buf, dtype="<f8").reshape(ny, nx).copy())
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if extent is None:
        extent = (0.0, float(nx), 0.0, float(ny))
    return SnapshotFrame(t, fields, extent)


def load_archive(directory, extent=None):
    """Load all snapshots of a run directory, sorted by step index.

    Returns a list of (step, SnapshotFrame).  CSV snapshots are preferred
    (they carry time and coordinates); steps with only a binary file fall
    back to :func:`read_frame_binary` with the given extent.
    """
    directory = Path(directory)
    steps = {}
    for p in directory.glob("snapshot_*.csv"):
        steps[_step_index(p)] = ("csv", p)
    for p in directory.glob("snapshot_*.bin"):
        steps.setdefault(_step_index(p), ("bin", p))
    if not steps:
        raise ParseError(f"{directory}: no snapshot files")
    frames = []
    for n in sorted(steps):
        kind, p = steps[n]
        if kind == "csv":
            frames.append((n, read_frame_csv(p)))
        else:
            frames.append((n, read_frame_binary(p, extent=extent)))
    return frames


def _step_index(path) -> int:
    m = re.fullmatch(r"snapshot_(\d+)", Path(path).stem)
    if m is None:
        raise ParseError(f"{path}: unexpected snapshot filename")
    return int(m.group(1))


def read_outflow(path):
    """Read an outflow CSV into (times, (nsteps, nclasses) U array)."""
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header[0] != "t" or len(header) < 2 or any(
                not h.startswith("U_class") for h in header[1:]
            ):
                raise ParseError(f"{path}: unexpected outflow header {header!r}")
            times, rows = [], []
            for line in fh:
                parts = line.strip().split(",")
                if parts == [""]:
                    continue
                if len(parts) != len(header):
                    raise ParseError(f"{path}: malformed row {line!r}")
                times.append(float(parts[0]))
                rows.append([float(p) for p in parts[1:]])
    except (ValueError, OSError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty outflow series")
    return np.asarray(times), np.asarray(rows)
