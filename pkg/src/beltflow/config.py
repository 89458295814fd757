# config.py
"""Flat key=value run configuration and scenario construction.

Format: one `key = value` per line, `#` comments, dotted keys for sections
(`class.1.epsilon = 0.05`, `obstacle.1.mass = 40080`).  Unknown keys are
errors.  See README for the full key table and defaults.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError
from .grid import Field2D, Grid
from .scenario import (
    MaterialClass,
    ObstacleSet,
    RectRegion,
    Scenario,
    StripRegion,
    init_from_particles,
    random_particles,
    split_classes,
    validate_assumptions,
)

_BOOL = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def _parse_bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {s!r}") from None


def _parse_floats(s: str, n: int) -> tuple:
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != n:
        raise ConfigError(f"expected {n} comma-separated numbers, got {s!r}")
    return tuple(float(p) for p in parts)


def _parse_points(s: str) -> list:
    pts = []
    for chunk in s.split(";"):
        chunk = chunk.strip()
        if chunk:
            pts.append(_parse_floats(chunk, 2))
    return pts


# key -> (type tag, default); None default means required (or conditional)
_SCALAR_KEYS = {
    "grid.nx": ("int", None),
    "grid.ny": ("int", None),
    "grid.dx": ("float", None),
    "grid.dy": ("float", None),
    "grid.x0": ("float", 0.0),
    "grid.y0": ("float", 0.0),
    "t_end": ("float", 6.0),
    "r_max": ("float", 2004.0),
    "belt_speed": ("float", 0.1),
    "diverter_angle": ("float", 55.0),
    "heaviside.slope": ("float", 50.0),
    "kernel.sigma_tilde": ("float", 90000.0),
    "kernel.cutoff_stddevs": ("float", 5.0),
    "init.mode": ("str", "particles"),
    "init.count": ("int", 192),
    "init.gamma": ("float", 0.02),
    "init.rho_max": ("float", 2004.0),
    "init.x_split": ("float", 1.0 / 3.0),
    "init.region": ("floats4", (0.0, 0.4, 0.0, 0.6)),
    "init.positions": ("points", None),
    "init.csv": ("str", None),
    "walls.enabled": ("bool", False),
    "walls.width": ("float", 0.02),
    "walls.mass": ("float", None),
    "boundary.open_right": ("bool", True),
    "numerics.cfl_mode": ("str", "bv"),
    "numerics.cfl_safety": ("float", 1.0),
    "numerics.snapshot_every": ("int", 50),
    "numerics.method": ("str", "fft"),
    "diagnostics.every": ("int", 0),
    "diagnostics.mollify_vstat": ("bool", False),
    "output.dir": ("str", None),
    "output.formats": ("str", "csv"),
    "seed": ("int", 0),
}

_CLASS_KEYS = {
    "sigma": ("float", None),
    "alpha": ("float", 1.0),
    "epsilon": ("float", 0.05),
    "r_max": ("float", None),  # defaults to global r_max
    "region": ("str", None),  # all | left | right
}

_OBSTACLE_KEYS = {
    "shape": ("str", None),  # rect | strip
    "rect": ("floats4", None),
    "cx": ("float", None),
    "cy": ("float", None),
    "length": ("float", None),
    "width": ("float", None),
    "angle": ("float", None),
    "mass": ("float", None),
    "zero_velocity": ("bool", False),
}

_SECTION_RE = re.compile(r"^(class|obstacle)\.(\d+)\.(\w+)$")


def _convert(key: str, tag: str, raw: str):
    try:
        if tag == "int":
            return int(raw)
        if tag == "float":
            return float(raw)
        if tag == "bool":
            return _parse_bool(raw)
        if tag == "str":
            return raw
        if tag == "floats4":
            return _parse_floats(raw, 4)
        if tag == "points":
            return _parse_points(raw)
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"bad value for key {key}: {raw!r}") from None
    raise ConfigError(f"internal: unknown type tag {tag}")


@dataclass
class RunConfig:
    """Parsed, validated run configuration."""

    values: dict
    classes: dict  # index -> dict of class keys
    obstacles: dict  # index -> dict of obstacle keys

    def __getitem__(self, key):
        return self.values[key]


def parse_config(text: str) -> RunConfig:
    """Parse flat key=value text into a validated RunConfig."""
    values = {k: d for k, (_t, d) in _SCALAR_KEYS.items()}
    classes: dict = {}
    obstacles: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        m = _SECTION_RE.match(key)
        if m:
            section, idx, sub = m.group(1), int(m.group(2)), m.group(3)
            table = _CLASS_KEYS if section == "class" else _OBSTACLE_KEYS
            if sub not in table:
                raise ConfigError(f"unknown key: {key}")
            store = classes if section == "class" else obstacles
            store.setdefault(idx, {})[sub] = _convert(key, table[sub][0], raw)
        elif key in _SCALAR_KEYS:
            values[key] = _convert(key, _SCALAR_KEYS[key][0], raw)
        else:
            raise ConfigError(f"unknown key: {key}")

    for req in ("grid.nx", "grid.ny", "grid.dx", "grid.dy"):
        if values[req] is None:
            raise ConfigError(f"missing required key: {req}")
    if not classes:
        raise ConfigError("at least one class.<n>.sigma block is required")
    for idx in sorted(classes):
        cdata = dict(_CLASS_KEYS)
        block = {k: classes[idx].get(k, d) for k, (_t, d) in cdata.items()}
        if block["sigma"] is None:
            raise ConfigError(f"missing required key: class.{idx}.sigma")
        if block["region"] is None:
            block["region"] = "all" if len(classes) == 1 else None
        if len(classes) > 1 and block["region"] is None:
            raise ConfigError(
                f"class.{idx}.region (left|right|all) is required with multiple classes"
            )
        if block["region"] not in ("all", "left", "right"):
            raise ConfigError(f"class.{idx}.region must be all, left, or right")
        classes[idx] = block
    for idx in sorted(obstacles):
        block = {k: obstacles[idx].get(k, d) for k, (_t, d) in _OBSTACLE_KEYS.items()}
        if block["shape"] not in ("rect", "strip"):
            raise ConfigError(f"obstacle.{idx}.shape must be rect or strip")
        if block["mass"] is None:
            raise ConfigError(f"missing required key: obstacle.{idx}.mass")
        if block["shape"] == "rect" and block["rect"] is None:
            raise ConfigError(f"missing required key: obstacle.{idx}.rect")
        if block["shape"] == "strip":
            for need in ("cx", "cy", "length", "width", "angle"):
                if block[need] is None:
                    raise ConfigError(f"missing required key: obstacle.{idx}.{need}")
        obstacles[idx] = block

    if values["init.mode"] not in ("particles", "csv"):
        raise ConfigError("init.mode must be particles or csv")
    if values["init.mode"] == "csv" and not values["init.csv"]:
        raise ConfigError("init.mode=csv requires init.csv")
    if values["numerics.cfl_mode"] not in ("positivity", "bv"):
        raise ConfigError("numerics.cfl_mode must be positivity or bv")
    if values["numerics.snapshot_every"] < 1:
        raise ConfigError("numerics.snapshot_every must be >= 1")
    if values["numerics.method"] not in ("fft", "direct", "auto"):
        raise ConfigError("numerics.method must be fft, direct, or auto")
    for fmt in values["output.formats"].split(","):
        if fmt.strip() not in ("csv", "bin"):
            raise ConfigError("output.formats entries must be csv or bin")
    return RunConfig(values, classes, obstacles)


def build_scenario(config: RunConfig) -> Scenario:
    """Construct the Scenario (grid, classes, obstacles) from a RunConfig."""
    v = config.values
    grid = Grid(
        nx=v["grid.nx"], ny=v["grid.ny"], dx=v["grid.dx"], dy=v["grid.dy"],
        x0=v["grid.x0"], y0=v["grid.y0"],
    )
    classes = []
    for idx in sorted(config.classes):
        b = config.classes[idx]
        classes.append(
            MaterialClass(
                id=idx,
                epsilon=b["epsilon"],
                sigma=b["sigma"],
                alpha=b["alpha"],
                r_max_class=b["r_max"] if b["r_max"] is not None else v["r_max"],
            )
        )
    regions = []
    for idx in sorted(config.obstacles):
        b = config.obstacles[idx]
        if b["shape"] == "rect":
            xmin, xmax, ymin, ymax = b["rect"]
            regions.append(
                RectRegion(xmin, xmax, ymin, ymax, b["mass"], b["zero_velocity"])
            )
        else:
            regions.append(
                StripRegion(
                    b["cx"], b["cy"], b["length"], b["width"], b["angle"],
                    b["mass"], b["zero_velocity"],
                )
            )
    if v["walls.enabled"]:
        mass = v["walls.mass"] if v["walls.mass"] is not None else 20.0 * v["r_max"]
        w = v["walls.width"]
        regions.append(RectRegion(grid.x0, grid.x_max, grid.y0, grid.y0 + w, mass))
        regions.append(RectRegion(grid.x0, grid.x_max, grid.y_max - w, grid.y_max, mass))
    scenario = Scenario(
        grid=grid,
        classes=classes,
        obstacles=ObstacleSet(regions),
        r_max=v["r_max"],
        belt_speed=v["belt_speed"],
        diverter_angle=v["diverter_angle"],
        heaviside_slope=v["heaviside.slope"],
        sigma_tilde=v["kernel.sigma_tilde"],
        t_end=v["t_end"],
        open_right=v["boundary.open_right"],
    )
    report = validate_assumptions(scenario)
    if not report.passed:
        raise ConfigError("invalid scenario: " + "; ".join(report.failures))
    return scenario


def initial_fields(config: RunConfig, scenario: Scenario) -> list:
    """Build per-class initial fields from particles or a snapshot CSV."""
    v = config.values
    grid = scenario.grid
    if v["init.mode"] == "csv":
        from .io import read_snapshot_csv

        _t, arrays = read_snapshot_csv(v["init.csv"], grid)
        if len(arrays) != len(scenario.classes):
            raise ConfigError("init.csv class count does not match config")
        return [Field2D(grid, a) for a in arrays]

    positions = v["init.positions"]
    if positions is None:
        rng = np.random.default_rng(v["seed"])
        positions = random_particles(v["init.count"], v["init.region"], rng)
    rho0 = init_from_particles(positions, v["init.gamma"], v["init.rho_max"], grid)
    # keep the initial mass out of obstacle cells so the augmented density
    # equals the artificial mass there
    rho0 = Field2D(grid, np.where(scenario.obstacle_cell_mask(), 0.0, rho0.values))
    left, right = split_classes(rho0, v["init.x_split"])
    parts = {"left": left, "right": right, "all": rho0}
    fields = []
    for idx in sorted(config.classes):
        fields.append(parts[config.classes[idx]["region"]].copy())
    return fields
