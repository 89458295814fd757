# io.py
"""Snapshot, outflow, and diagnostics serialization.

Formats:
  * snapshot CSV: header "t,class,i,j,x,y,rho", rows sorted by (class, j, i),
    floats with 17 significant digits, LF line endings
  * snapshot binary: 16-byte header (magic "NLCL", u32 nx, u32 ny, u32 class
    count, little-endian) followed by row-major float64 values per class
  * outflow CSV: "t,U_class1,U_class2,..."
  * diagnostics: NDJSON, one record per step
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import Field2D, Grid

MAGIC = b"NLCL"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_snapshot_csv(t: float, fields, path) -> None:
    """Write one snapshot (list of per-class Field2D) as canonical CSV."""
    grid = fields[0].grid
    with open(path, "w", newline="\n") as fh:
        fh.write("t,class,i,j,x,y,rho\n")
        ts = _fmt(t)
        for ci, f in enumerate(fields, start=1):
            vals = f.values
            for j in range(grid.ny):
                y = grid.y0 + (j + 0.5) * grid.dy
                ys = _fmt(y)
                for i in range(grid.nx):
                    x = grid.x0 + (i + 0.5) * grid.dx
                    fh.write(
                        f"{ts},{ci},{i},{j},{_fmt(x)},{ys},{_fmt(vals[j, i])}\n"
                    )


def read_snapshot_csv(path, grid: Grid | None = None):
    """Read a snapshot CSV back into (t, list of (ny, nx) arrays)."""
    t = 0.0
    cells = {}
    nmax = imax = jmax = 0
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,class,i,j,x,y,rho":
            raise ValueError(f"unexpected snapshot header: {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            t = float(parts[0])
            c, i, j = int(parts[1]), int(parts[2]), int(parts[3])
            cells[(c, j, i)] = float(parts[6])
            nmax, imax, jmax = max(nmax, c), max(imax, i), max(jmax, j)
    if grid is not None:
        nx, ny = grid.nx, grid.ny
    else:
        nx, ny = imax + 1, jmax + 1
    arrays = []
    for c in range(1, nmax + 1):
        a = np.zeros((ny, nx))
        for (cc, j, i), v in cells.items():
            if cc == c:
                a[j, i] = v
        arrays.append(a)
    return t, arrays


def write_snapshot_binary(fields, path) -> None:
    """Write per-class values as flat little-endian float64 with NLCL header."""
    grid = fields[0].grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", MAGIC, grid.nx, grid.ny, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_snapshot_binary(path):
    """Read an NLCL snapshot: returns (nx, ny, list of (ny, nx) arrays)."""
    with open(path, "rb") as fh:
        head = fh.read(16)
        magic, nx, ny, ncls = struct.unpack("<4sIII", head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        arrays = []
        for _ in range(ncls):
            buf = fh.read(8 * nx * ny)
            arrays.append(np.frombuffer(buf, dtype="<f8").reshape(ny, nx).copy())
    return nx, ny, arrays


def write_outflow_csv(times, series, path) -> None:
    """Write U columns per class; series is (nsteps, nclasses)."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("empty outflow series")
    with open(path, "w", newline="\n") as fh:
        cols = ",".join(f"U_class{c + 1}" for c in range(series.shape[1]))
        fh.write(f"t,{cols}\n")
        for t, row in zip(times, series):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in row) + "\n")


def read_outflow_csv(path):
    """Read an outflow CSV back into (times, (nsteps, nclasses) array)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[0] != "t" or any(not h.startswith("U_class") for h in header[1:]):
            raise ValueError(f"unexpected outflow header: {header!r}")
        times, rows = [], []
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            times.append(float(parts[0]))
            rows.append([float(p) for p in parts[1:]])
    if not rows:
        raise ValueError("empty outflow series")
    return np.asarray(times), np.asarray(rows)


class NdjsonWriter:
    """Streaming NDJSON writer for diagnostics records."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="\n")

    def write(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def snapshot_name(n: int, fmt: str) -> str:
    ext = {"csv": "csv", "bin": "bin"}[fmt]
    return f"snapshot_{n:06d}.{ext}"


def archive_times(directory) -> dict:
    """Map snapshot step index -> t by scanning CSV files in a run directory."""
    out = {}
    for p in sorted(Path(directory).glob("snapshot_*.csv")):
        with open(p) as fh:
            fh.readline()
            first = fh.readline().split(",")
            out[int(p.stem.split("_")[1])] = float(first[0]) if first[0] else 0.0
    return out
