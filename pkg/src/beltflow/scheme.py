# scheme.py
"""Roe upwind fluxes, dimensional-splitting update, and CFL control.

One time step: compute the augmented density r^n and every class's dynamic
velocity J^{c,n} once, sweep all classes in x (producing the half state),
then sweep the half state in y with the same J^{c,n}.

Ghost policy: zero-density ghosts on the left/top/bottom edges (the walls
are obstacle strips, nothing enters from outside); the right edge uses a
zero-gradient ghost (transparent outflow) unless the scenario is closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError, StepRejected
from .grid import Field2D, InterfaceField
from .kernels import (
    SmoothedHeaviside,
    build_stencils,
    lipschitz_constant,
)
from .convolution import InterfaceConvolver
from .velocity import AugmentedDensity, DynamicVelocity, _j_component, augmented_density

POSITIVITY_TOL = -1e-14


@dataclass(frozen=True)
class CflPolicy:
    """Time-step rule: 'positivity' (factor 2, no L_H) or 'bv' (factor 3, L_H)."""

    mode: str = "bv"
    safety: float = 1.0

    def __post_init__(self):
        if self.mode not in ("positivity", "bv"):
            raise ConfigError("cfl mode must be 'positivity' or 'bv'")
        if not (0 < self.safety <= 1):
            raise ConfigError("cfl safety must lie in (0, 1]")


@dataclass
class SchemeState:
    """Solution snapshot: time, step index, per-class fields."""

    t: float
    n: int
    fields: list
    last_dt: float = 0.0


def flux_static(v, u, w):
    """Roe flux for the static field: v*u + min(0, v)*(w - u)."""
    return v * u + np.minimum(0.0, v) * (w - u)


def flux_nonlocal(u, w, J):
    """Roe flux for the dynamic field: J*u + min(0, J)*(w - u)."""
    return J * u + np.minimum(0.0, J) * (w - u)


def cfl_dt_from_speeds(
    dx: float,
    dy: float,
    v1_max: float,
    v2_max: float,
    eps_max: float,
    policy: CflPolicy,
    L_H: float | None = None,
) -> float:
    """Largest stable dt for the selected CFL mode."""
    if policy.mode == "positivity":
        den_x = 2.0 * (eps_max + v1_max)
        den_y = 2.0 * (eps_max + v2_max)
    else:
        if L_H is None:
            raise ConfigError("bv CFL mode requires the Heaviside Lipschitz constant")
        den_x = 3.0 * (eps_max * L_H + v1_max)
        den_y = 3.0 * (eps_max * L_H + v2_max)
    lams = []
    if den_x > 0:
        lams.append(dx / den_x)
    if den_y > 0:
        lams.append(dy / den_y)
    if not lams:
        raise ConfigError("all speeds are zero: CFL step is unbounded")
    return policy.safety * min(lams)


def cfl_dt(scenario, eps_max: float, policy: CflPolicy) -> float:
    """CFL time step from a scenario's static field and eps_max."""
    v1, v2 = scenario.interface_static_velocities()
    L_H = lipschitz_constant(SmoothedHeaviside(scenario.heaviside_slope))
    return cfl_dt_from_speeds(
        scenario.grid.dx,
        scenario.grid.dy,
        float(np.abs(v1).max()),
        float(np.abs(v2).max()),
        eps_max,
        policy,
        L_H,
    )


def _pad_x(values: np.ndarray, open_right: bool) -> np.ndarray:
    """Add ghost columns: zero on the left, zero-gradient or zero on the right."""
    ny = values.shape[0]
    left = np.zeros((ny, 1))
    right = values[:, -1:] if open_right else np.zeros((ny, 1))
    return np.hstack([left, values, right])


def _pad_y(values: np.ndarray) -> np.ndarray:
    """Add zero ghost rows below and above."""
    nx = values.shape[1]
    zero = np.zeros((1, nx))
    return np.vstack([zero, values, zero])


def sweep_x(values, v1, J1, lam_x: float, open_right: bool = True) -> np.ndarray:
    """One x-sweep of the splitting on a (ny, nx) array.

    v1, J1: static and dynamic normal velocities on x-interfaces (ny, nx+1).
    Raises StepRejected if any updated cell falls below the positivity
    tolerance (CFL violation); values are never clamped.
    """
    p = _pad_x(np.asarray(values, dtype=float), open_right)
    u, w = p[:, :-1], p[:, 1:]
    F = flux_static(v1, u, w) + flux_nonlocal(u, w, J1)
    out = values - lam_x * (F[:, 1:] - F[:, :-1])
    if out.min() < POSITIVITY_TOL:
        raise StepRejected(
            f"x-sweep produced minimum {out.min():.3e} < {POSITIVITY_TOL}"
        )
    return out


def sweep_y(values, v2, J2, lam_y: float) -> np.ndarray:
    """One y-sweep of the splitting on a (ny, nx) array (zero ghosts both sides)."""
    p = _pad_y(np.asarray(values, dtype=float))
    u, w = p[:-1, :], p[1:, :]
    G = flux_static(v2, u, w) + flux_nonlocal(u, w, J2)
    out = values - lam_y * (G[1:, :] - G[:-1, :])
    if out.min() < POSITIVITY_TOL:
        raise StepRejected(
            f"y-sweep produced minimum {out.min():.3e} < {POSITIVITY_TOL}"
        )
    return out


@dataclass
class StepInfo:
    """Intermediate data of one accepted step, for the diagnostics."""

    dt: float
    r: AugmentedDensity
    velocities: list  # DynamicVelocity per class
    mids: list  # half states after the x-sweep, per class (arrays)


class Simulator:
    """Precomputed stencils, engines, and static samples for one scenario."""

    def __init__(self, scenario, policy: CflPolicy = CflPolicy(), cutoff_stddevs: float = 5.0,
                 method: str = "fft", dt: float | None = None):
        self.scenario = scenario
        self.policy = policy
        self.grid = scenario.grid
        self.heaviside = SmoothedHeaviside(scenario.heaviside_slope)
        self.stencils = {
            c.id: build_stencils(c.sigma, self.grid, cutoff_stddevs)
            for c in scenario.classes
        }
        self.smooth_stencil = build_stencils(
            scenario.sigma_tilde, self.grid, cutoff_stddevs
        )[2]
        self.v1, self.v2 = scenario.interface_static_velocities()
        self.obstacle_mass = scenario.obstacle_mass_field()
        eps_max = max(c.epsilon for c in scenario.classes)
        self.dt = dt if dt is not None else cfl_dt(scenario, eps_max, policy)
        self.lam_x = self.dt / self.grid.dx
        self.lam_y = self.dt / self.grid.dy
        self.method = method
        kernels = {"tilde": self.smooth_stencil}
        for c in scenario.classes:
            d1, d2, _ = self.stencils[c.id]
            kernels[("d1", c.id)] = d1
            kernels[("d2", c.id)] = d2
        self._engines = {
            axis: InterfaceConvolver(self.grid, axis, kernels) for axis in ("x", "y")
        }
        self.j_evaluations = 0

    def initial_state(self, fields) -> SchemeState:
        return SchemeState(t=0.0, n=0, fields=[f.copy() for f in fields])

    def dynamic_velocities(self, r: AugmentedDensity):
        """All classes' J from one augmented density (one transform per axis)."""
        conv = {axis: self._engines[axis].apply(r.values) for axis in ("x", "y")}
        out = []
        for c in self.scenario.classes:
            comps = {}
            for axis, comp in (("x", 1), ("y", 2)):
                cv = conv[axis]
                comps[axis] = InterfaceField(
                    self.grid,
                    axis,
                    _j_component(
                        cv[("d1", c.id)],
                        cv[("d2", c.id)],
                        cv["tilde"],
                        c.epsilon,
                        self.heaviside,
                        self.scenario.r_max,
                        comp,
                    ),
                )
            out.append(DynamicVelocity(c.id, c.epsilon, comps["x"], comps["y"]))
        self.j_evaluations += 1
        return out

    def augmented(self, fields) -> AugmentedDensity:
        return augmented_density(fields, self.scenario.classes, self.obstacle_mass)

    def step(self, state: SchemeState) -> tuple[SchemeState, StepInfo]:
        """Advance one time step; J is computed once and reused by both sweeps."""
        r = self.augmented(state.fields)
        vels = self.dynamic_velocities(r)
        mids, news = [], []
        for f, J in zip(state.fields, vels):
            mid = sweep_x(
                f.values, self.v1, J.J1.values, self.lam_x, self.scenario.open_right
            )
            new = sweep_y(mid, self.v2, J.J2.values, self.lam_y)
            if not np.all(np.isfinite(new)):
                raise StepRejected("step produced non-finite values")
            mids.append(mid)
            news.append(Field2D(self.grid, new))
        new_state = SchemeState(
            t=state.t + self.dt, n=state.n + 1, fields=news, last_dt=self.dt
        )
        return new_state, StepInfo(self.dt, r, vels, mids)


def step(state: SchemeState, simulator: Simulator) -> SchemeState:
    """Single-step convenience wrapper around Simulator.step."""
    new_state, _ = simulator.step(state)
    return new_state
