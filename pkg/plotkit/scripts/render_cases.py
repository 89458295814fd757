"""Render both sorting-case archives: heatmap frame sequences + outflow plots.

Runs the simulator CLI first when an archive directory is missing (each
full-resolution case takes about half a minute), then renders every stored
snapshot and the outflow diagram.  Only the archive files are consumed; the
config is read just for the obstacle outlines.

Usage: python3 scripts/render_cases.py [output_root]
"""

import subprocess
import sys
from pathlib import Path

from plotkit import load_archive, obstacles_from_config, render_heatmaps, render_outflow

REPO = Path(__file__).resolve().parents[2]
CASES = {
    "case1": REPO / "configs" / "case1.cfg",
    "case2": REPO / "configs" / "case2.cfg",
}


def main():
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO / "runs" / "plots"
    for name, cfg in CASES.items():
        run_dir = REPO / "runs" / name
        if not (run_dir / "outflow.csv").exists():
            print(f"[{name}] archive missing, running the simulation...")
            subprocess.run(["beltflow", "simulate", str(cfg)], cwd=REPO, check=True)
        frames = load_archive(run_dir)
        obstacles = obstacles_from_config(cfg, include_walls=True)
        out_dir = out_root / name
        paths = render_heatmaps(frames, out_dir, obstacles=obstacles)
        render_outflow(run_dir / "outflow.csv", out_dir / "outflow.png", title=name)
        print(f"[{name}] wrote {len(paths)} frames + outflow.png to {out_dir}")


if __name__ == "__main__":
    main()
