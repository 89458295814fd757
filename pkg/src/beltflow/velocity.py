# velocity.py
"""Augmented total density and the non-local dynamic velocity.

The dynamic velocity of class c is
    J = -eps_c * H((smooth*r)/r_max) * g / sqrt(1 + |g|^2),
    g = (d1 eta_c * r, d2 eta_c * r),
evaluated at cell interfaces with both gradient components taken at the
same interface point.  r is the PCE-weighted class sum plus the obstacle
masses, so walls repel mass through the non-local term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field2D, Grid, InterfaceField
from .kernels import KernelStencil, SmoothedHeaviside
from .convolution import convolve_at_interfaces


@dataclass
class AugmentedDensity:
    """PCE-weighted total density including obstacle masses, per cell."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("augmented density shape does not match grid")

    def l1(self) -> float:
        return float(self.grid.cell_area * np.abs(self.values).sum())


@dataclass
class DynamicVelocity:
    """Per-class dynamic velocity components at interfaces."""

    class_id: int
    epsilon: float
    J1: InterfaceField  # x-interfaces, shape (ny, nx+1)
    J2: InterfaceField  # y-interfaces, shape (ny+1, nx)


def augmented_density(fields, classes, obstacle_mass=None) -> AugmentedDensity:
    """r = sum_c alpha_c * rho_c (+ obstacle masses where rasterized)."""
    if len(fields) != len(classes):
        raise ValueError("one field per class is required")
    grid = fields[0].grid
    vals = np.zeros(grid.shape)
    for f, c in zip(fields, classes):
        if f.grid is not grid and f.grid != grid:
            raise ValueError("all class fields must share one grid")
        vals += c.alpha * f.values
    if obstacle_mass is not None:
        vals = vals + obstacle_mass
    return AugmentedDensity(grid, vals)


def _j_component(g1, g2, smoothed, epsilon, h: SmoothedHeaviside, r_max, component):
    """J component from gradient samples and the smoothed density."""
    gate = h(smoothed / r_max)
    denom = np.sqrt(1.0 + g1 * g1 + g2 * g2)
    g = g1 if component == 1 else g2
    return -epsilon * gate * g / denom


def dynamic_velocity(
    r: AugmentedDensity,
    cls,
    d1_stencil: KernelStencil,
    d2_stencil: KernelStencil,
    smooth_stencil: KernelStencil,
    h: SmoothedHeaviside,
    r_max: float,
    method: str = "auto",
) -> DynamicVelocity:
    """Dynamic velocity of one class, evaluated on both interface families."""
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    out = {}
    for axis, comp in (("x", 1), ("y", 2)):
        g1 = convolve_at_interfaces(r, d1_stencil, axis, method).values
        g2 = convolve_at_interfaces(r, d2_stencil, axis, method).values
        s = convolve_at_interfaces(r, smooth_stencil, axis, method).values
        out[axis] = InterfaceField(
            r.grid, axis, _j_component(g1, g2, s, cls.epsilon, h, r_max, comp)
        )
    return DynamicVelocity(cls.id, cls.epsilon, out["x"], out["y"])


@dataclass
class BoundReport:
    """Observed/bound ratios for the kernel-difference estimates."""

    ratios: dict
    worst: dict  # inequality name -> (ratio, flat index)

    def max_ratio(self) -> float:
        return max(self.ratios.values()) if self.ratios else 0.0

    def check(self, tol: float = 1e-9):
        from .errors import DiagnosticFailure

        for name, ratio in self.ratios.items():
            if ratio > 1.0 + tol:
                raise DiagnosticFailure(
                    f"kernel bound {name} violated: ratio {ratio:.6e} "
                    f"at interface index {self.worst[name][1]}"
                )


def _ratio(observed: np.ndarray, bound: float):
    if observed.size == 0:
        return 0.0, -1
    m = float(np.abs(observed).max())
    idx = int(np.abs(observed).argmax())
    if m == 0.0:
        return 0.0, idx
    return m / bound if bound > 0 else np.inf, idx


def verify_kernel_bounds(
    J: DynamicVelocity,
    r: AugmentedDensity,
    cls,
    norms,
    grad_tilde: float,
    L_H: float,
    grid: Grid,
) -> BoundReport:
    """Check the sup-norm, first-, second-, and mixed-difference estimates.

    norms: KernelNorms of eta_c; grad_tilde: sup |grad| of the smoothing
    kernel.  Bounds use the discrete L1 norm of the current augmented
    density.
    """
    r1 = r.l1()
    eps = cls.epsilon
    dx, dy = grid.dx, grid.dy
    b_first = (2.0 * norms.hess + L_H * grad_tilde) * eps * r1
    c1 = 2.0 * norms.third
    c2 = 3.0 * norms.hess**2 + 2.0 * L_H * grad_tilde * norms.hess
    c_c = c1 * r1 + c2 * r1 * r1
    j1 = J.J1.values
    j2 = J.J2.values

    ratios, worst = {}, {}

    def put(name, arr, bound):
        ratio, idx = _ratio(arr, bound)
        ratios[name] = ratio
        worst[name] = (ratio, idx)

    put("jinf_x", j1, eps)
    put("jinf_y", j2, eps)
    put("jx", np.diff(j1, axis=1), b_first * dx)
    put("j1y", np.diff(j1, axis=0), b_first * dy)
    put("j2x", np.diff(j2, axis=1), b_first * dx)
    put("j2y", np.diff(j2, axis=0), b_first * dy)
    put("jtripla_x", np.diff(j1, n=2, axis=1), 2.0 * eps * dx * dx * c_c)
    put("jtripla_y", np.diff(j2, n=2, axis=0), 2.0 * eps * dy * dy * c_c)
    put("jtriplabis_x", np.diff(np.diff(j1, axis=1), axis=0), 2.0 * eps * dx * dy * c_c)
    put("jtriplabis_y", np.diff(np.diff(j2, axis=1), axis=0), 2.0 * eps * dx * dy * c_c)
    return BoundReport(ratios, worst)
