# scenario.py
"""Material classes, obstacle geometry, static velocity, and initial data.

The physical setting is a conveyor belt occupying a rectangle, moving mass
to the right with speed v_T, with obstacle regions (a rotated diverter
strip, edge walls) encoded as artificial masses in the augmented density.
Regions flagged zero_velocity additionally null the static field inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError
from .grid import Field2D, Grid


@dataclass(frozen=True)
class MaterialClass:
    """Per-class parameters: collision speed, kernel width, PCE weight."""

    id: int
    epsilon: float  # collision speed scale (m/s)
    sigma: float  # kernel concentration (1/m^2)
    alpha: float  # PCE weight
    r_max_class: float  # maximal class density

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError(f"class {self.id}: epsilon must be >= 0")
        if self.sigma <= 0:
            raise ConfigError(f"class {self.id}: sigma must be > 0")
        if self.alpha <= 0:
            raise ConfigError(f"class {self.id}: alpha must be > 0")
        if self.r_max_class <= 0:
            raise ConfigError(f"class {self.id}: r_max_class must be > 0")


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    mass: float
    zero_velocity: bool = False

    def contains(self, x, y):
        return (
            (np.asarray(x) >= self.xmin)
            & (np.asarray(x) <= self.xmax)
            & (np.asarray(y) >= self.ymin)
            & (np.asarray(y) <= self.ymax)
        )


@dataclass(frozen=True)
class StripRegion:
    """Rectangle of given length/width centered at (cx, cy), rotated by angle_deg."""

    cx: float
    cy: float
    length: float
    width: float
    angle_deg: float
    mass: float
    zero_velocity: bool = False

    def contains(self, x, y):
        th = math.radians(self.angle_deg)
        xr = np.asarray(x, dtype=float) - self.cx
        yr = np.asarray(y, dtype=float) - self.cy
        u = xr * math.cos(th) + yr * math.sin(th)
        v = -xr * math.sin(th) + yr * math.cos(th)
        return (np.abs(u) <= 0.5 * self.length) & (np.abs(v) <= 0.5 * self.width)


@dataclass
class ObstacleSet:
    """Collection of obstacle regions with their artificial masses."""

    regions: list

    def __post_init__(self):
        for k, reg in enumerate(self.regions):
            if reg.mass <= 0:
                raise ConfigError(f"obstacle {k + 1}: mass must be > 0")


@dataclass
class Scenario:
    """Full problem description apart from the initial data."""

    grid: Grid
    classes: list
    obstacles: ObstacleSet
    r_max: float
    belt_speed: float = 0.1
    diverter_angle: float = 55.0
    heaviside_slope: float = 50.0
    sigma_tilde: float = 90000.0
    t_end: float = 6.0
    open_right: bool = True
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.r_max <= 0:
            raise ConfigError("r_max must be > 0")
        if self.belt_speed < 0:
            raise ConfigError("belt_speed must be >= 0")
        if not (0 < self.diverter_angle < 90):
            raise ConfigError("diverter_angle must lie in (0, 90) degrees")
        if self.sigma_tilde <= 0:
            raise ConfigError("sigma_tilde must be > 0")
        if not self.classes:
            raise ConfigError("at least one material class is required")

    # -- static velocity -------------------------------------------------

    def zero_velocity_mask(self, x, y):
        """True where some zero_velocity region contains (x, y)."""
        m = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
        for reg in self.obstacles.regions:
            if reg.zero_velocity:
                m |= reg.contains(x, y)
        return m

    def static_velocity(self, x, y):
        """(vx, vy) of the belt field: (v_T, 0), nulled in zero-velocity regions."""
        dead = self.zero_velocity_mask(x, y)
        vx = np.where(dead, 0.0, self.belt_speed)
        vy = np.zeros_like(vx)
        return vx, vy

    def interface_static_velocities(self):
        """Normal static velocity sampled on x- and y-interfaces.

        A sample is zeroed when the interface point or either adjacent cell
        center lies in a zero-velocity region, so obstacles are impermeable
        to the static flux at every resolution.
        """
        if "iface_v" in self._cache:
            return self._cache["iface_v"]
        g = self.grid
        Xc, Yc = g.cell_centers()
        dead_c = self.zero_velocity_mask(Xc, Yc)

        Xi, Yi = g.x_interface_points()
        dead1 = self.zero_velocity_mask(Xi, Yi)
        dead1[:, 1:] |= dead_c
        dead1[:, :-1] |= dead_c
        v1 = np.where(dead1, 0.0, self.belt_speed)

        Xj, Yj = g.y_interface_points()
        dead2 = self.zero_velocity_mask(Xj, Yj)
        dead2[1:, :] |= dead_c
        dead2[:-1, :] |= dead_c
        v2 = np.where(dead2, 0.0, 0.0)  # belt field has no y component
        self._cache["iface_v"] = (v1, v2)
        return v1, v2

    # -- obstacle rasterization ------------------------------------------

    def obstacle_mass_field(self) -> np.ndarray:
        """Sum of region masses over cells whose center lies inside, (ny, nx)."""
        if "obstacle_mass" not in self._cache:
            X, Y = self.grid.cell_centers()
            out = np.zeros(self.grid.shape)
            for reg in self.obstacles.regions:
                out += reg.mass * reg.contains(X, Y)
            self._cache["obstacle_mass"] = out
        return self._cache["obstacle_mass"]

    def obstacle_cell_mask(self) -> np.ndarray:
        """True where any obstacle region covers the cell center."""
        if "obstacle_mask" not in self._cache:
            X, Y = self.grid.cell_centers()
            m = np.zeros(self.grid.shape, dtype=bool)
            for reg in self.obstacles.regions:
                m |= reg.contains(X, Y)
            self._cache["obstacle_mask"] = m
        return self._cache["obstacle_mask"]


def static_velocity(scenario: Scenario, x, y):
    """Static belt velocity at (x, y)."""
    vx, vy = scenario.static_velocity(x, y)
    if np.ndim(vx) == 0:
        return float(vx), float(vy)
    return vx, vy


# -- initial data ---------------------------------------------------------


def init_from_particles(positions, gamma: float, rho_max: float, grid: Grid) -> Field2D:
    """Superpose Gaussian bumps gamma/(2*pi*rho_max)*exp(-gamma*d^2/2).

    `positions` is a sequence of (x, y) particle locations; an empty list
    yields the zero field.
    """
    if gamma <= 0 or rho_max <= 0:
        raise ValueError("gamma and rho_max must be positive")
    X, Y = grid.cell_centers()
    vals = np.zeros(grid.shape)
    pref = gamma / (2.0 * math.pi * rho_max)
    for (px, py) in positions:
        vals += pref * np.exp(-0.5 * gamma * ((X - px) ** 2 + (Y - py) ** 2))
    return Field2D(grid, vals)


def random_particles(count: int, region, rng: np.random.Generator):
    """Uniform particle positions in region = (xmin, xmax, ymin, ymax)."""
    xmin, xmax, ymin, ymax = region
    xs = rng.uniform(xmin, xmax, size=count)
    ys = rng.uniform(ymin, ymax, size=count)
    return list(zip(xs.tolist(), ys.tolist()))


def split_classes(rho0: Field2D, x_split: float) -> tuple[Field2D, Field2D]:
    """Partition rho0 at x = x_split: (left part, right part); sums exactly."""
    X, _ = rho0.grid.cell_centers()
    left = np.where(X < x_split, rho0.values, 0.0)
    right = np.where(X < x_split, 0.0, rho0.values)
    return Field2D(rho0.grid, left), Field2D(rho0.grid, right)


# -- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    passed: bool
    failures: list
    notes: list

    def __str__(self):
        lines = ["validation: " + ("pass" if self.passed else "FAIL")]
        lines += [f"  failure: {f}" for f in self.failures]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def validate_assumptions(scenario: Scenario) -> ValidationReport:
    """Static checks: obstacle masses exceed r_max, kernel parameters positive,
    CFL-relevant norms finite. The inward-pointing boundary condition is
    monitored at runtime (diagnostics), not proven here."""
    failures, notes = [], []
    X, Y = scenario.grid.cell_centers()
    for k, reg in enumerate(scenario.obstacles.regions):
        if reg.mass <= scenario.r_max:
            failures.append(f"obstacle mass below r_max (obstacle {k + 1})")
        if not np.any(reg.contains(X, Y)):
            failures.append(f"obstacle {k + 1} covers no cell of the grid")
    for c in scenario.classes:
        if c.sigma <= 0 or c.alpha <= 0 or c.epsilon < 0:
            failures.append(f"class {c.id}: non-positive kernel/weight parameter")
    if scenario.sigma_tilde <= 0 or scenario.heaviside_slope <= 0:
        failures.append("smoothing kernel / Heaviside parameters must be positive")
    if not math.isfinite(scenario.belt_speed) or not all(
        math.isfinite(c.epsilon) for c in scenario.classes
    ):
        failures.append("CFL-relevant speeds must be finite")
    if not scenario.obstacles.regions:
        notes.append("no obstacles: boundary-invariance check is vacuous")
    if scenario.r_max < 1.0:
        notes.append(
            "r_max < 1: diagnostic bound constants use the raw Heaviside "
            "Lipschitz constant and may understate the normalized slope"
        )
    return ValidationReport(not failures, failures, notes)
