# render.py
"""Rendering of snapshot frame sequences and outflow diagrams.

Heatmaps are composed directly into pixel arrays (one cell = one pixel
block) so the coordinate mapping is exact: class densities are blended
subtractively over a white background (class 1 blue, class 2 red, mixing
to purple), obstacle regions are outlined in gray, and the color scale is
normalized per run, not per frame, so a frame sequence is comparable over
time.  Outflow diagrams are ordinary line plots of the remaining-mass
fractions U_c(t).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib.image
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.path import Path as MplPath
from scipy.ndimage import binary_erosion

from .readers import ParseError, read_outflow

# per-class subtractive masks over white: removing R+G gives blue,
# G+B gives red, R+B gives green; overlaps blend (blue+red -> purple)
_SUBTRACT = [(1.0, 1.0, 0.0), (0.0, 1.0, 1.0), (1.0, 0.0, 1.0)]
_OUTLINE_GRAY = 0.35
_MAX_STRENGTH = 0.92  # keep full density short of pure saturation


def run_scale(frames):
    """Per-class color-scale maxima over a whole run (list of frames)."""
    ncls = len(frames[0][1].fields)
    vmax = np.zeros(ncls)
    for _, frame in frames:
        for c, f in enumerate(frame.fields):
            vmax[c] = max(vmax[c], float(f.max()))
    return np.where(vmax > 0, vmax, 1.0)


def _obstacle_outline(shape, extent, obstacles):
    """Boolean (ny, nx) mask of cells on the boundary of any obstacle."""
    ny, nx = shape
    x0, x1, y0, y1 = extent
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    pts = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    outline = np.zeros(shape, dtype=bool)
    for poly in obstacles:
        inside = MplPath(np.asarray(poly)).contains_points(pts).reshape(shape)
        outline |= inside & ~binary_erosion(inside)
    return outline


def frame_rgb(frame, vmax, obstacles=()):
    """Compose one frame into an (ny, nx, 3) RGB array in [0, 1]."""
    ny, nx = frame.shape
    rgb = np.ones((ny, nx, 3))
    for c, f in enumerate(frame.fields):
        u = np.clip(f / vmax[c], 0.0, 1.0) * _MAX_STRENGTH
        mask = np.asarray(_SUBTRACT[c % len(_SUBTRACT)])
        rgb -= u[:, :, None] * mask[None, None, :]
    rgb = np.clip(rgb, 0.0, 1.0)
    if obstacles:
        rgb[_obstacle_outline(frame.shape, frame.extent, obstacles)] = _OUTLINE_GRAY
    return rgb


def render_heatmaps(frames, out_dir, obstacles=(), vmax=None, upscale=4, prefix="frame"):
    """Render a frame sequence to PNG files, one image per frame.

    ``frames`` is a list of (step, SnapshotFrame) as produced by
    :func:`plotkit.load_archive`; filenames are ``{prefix}_{step:06d}.png``.
    Returns the list of written paths.
    """
    if not frames:
        raise ParseError("no frames to render")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if vmax is None:
        vmax = run_scale(frames)
    paths = []
    for step, frame in frames:
        rgb = frame_rgb(frame, vmax, obstacles)
        if upscale > 1:
            rgb = np.kron(rgb, np.ones((upscale, upscale, 1)))
        path = out_dir / f"{prefix}_{step:06d}.png"
        matplotlib.image.imsave(path, rgb, origin="lower")
        paths.append(path)
    return paths


def render_outflow(outflow_csv, out_path, title=None):
    """Plot the remaining-mass curves of an outflow CSV to one PNG.

    One curve per class, each starting at 1; raises ParseError (and writes
    nothing) when the series is empty or malformed.
    """
    times, series = read_outflow(outflow_csv)
    colors = ["tab:blue", "tab:red", "tab:green"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for c in range(series.shape[1]):
        ax.plot(times, series[:, c], color=colors[c % len(colors)], label=f"class {c + 1}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("remaining mass fraction U")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
