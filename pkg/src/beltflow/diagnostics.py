# diagnostics.py
"""Runtime monitors for every a-priori estimate of the scheme.

Each stability estimate (L-infinity growth, BV in space, BV in space-time,
discrete entropy inequality, kernel-difference bounds, inward-pointing
boundary condition, Lipschitz dependence on the initial datum) is evaluated
numerically on the discrete solution and reported as an observed/bound
ratio.  Bound values can be astronomically large (the growth rates scale
like exp(K*t) with K ~ 1e9 for realistic kernels), so every comparison is
carried out in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import Field2D, l1_norm
from .kernels import (
    SmoothedHeaviside,
    build_stencils,
    kernel_norms,
    lipschitz_constant,
)
from .scheme import CflPolicy, Simulator, flux_nonlocal, flux_static, _pad_x, _pad_y
from .velocity import augmented_density

RATIO_TOL = 1e-9
ENTROPY_TOL = 1e-12


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _log_expm1(a: float) -> float:
    """log(exp(a) - 1) for a >= 0, stable for both tiny and huge a."""
    if a <= 0:
        return -math.inf
    if a > 36:
        return a + math.log1p(-math.exp(-a))
    return math.log(math.expm1(a))


def _logaddexp(a: float, b: float) -> float:
    return float(np.logaddexp(a, b))


@dataclass
class ClassConstants:
    """Growth/bound constants of one material class."""

    epsilon: float
    c_inf: float
    k1: float
    k2: float
    c1: float
    c2: float
    tv0: float
    rho0_l1: float
    rho0_linf: float
    hess: float  # kernel Hessian sup-norm, reused by C_t


@dataclass
class BoundConstants:
    """All constants entering the stability estimates, plus their inputs."""

    L_H: float
    v_inf: float
    dv1dx_inf: float
    dv2dy_inf: float
    dv_inf: float
    d2v_inf: float
    grad_tilde: float
    r_omega0_l1: float
    per_class: dict  # class id -> ClassConstants

    def log_linf_bound(self, t: float, cid) -> float:
        """log of the L-infinity bound |rho0|_inf * exp(C_inf * t)."""
        cc = self.per_class[cid]
        return _log(cc.rho0_linf) + cc.c_inf * t

    def log_cx(self, t: float, cid) -> float:
        """log of the BV-in-space bound C_x(t)."""
        cc = self.per_class[cid]
        a = 2.0 * t * cc.k1
        term1 = a + _log(cc.tv0)
        if cc.k1 > 0:
            term2 = _log(2.0 * cc.k2) - math.log(cc.k1) + _log_expm1(a)
        else:
            term2 = _log(4.0 * t * cc.k2)  # limit of (2 K2/K1)(e^{2tK1}-1)
        return _logaddexp(term1, term2)

    def log_ct(self, t: float, cid) -> float:
        """log of the time-continuity constant C_t(t)."""
        cc = self.per_class[cid]
        a = 2.0 * (self.v_inf + cc.epsilon)
        b = (
            self.dv_inf
            + cc.epsilon * (2.0 * cc.hess + self.L_H * self.grad_tilde) * self.r_omega0_l1
        ) * cc.rho0_l1
        return _logaddexp(_log(a) + self.log_cx(t, cid), _log(b))

    def log_cxt(self, t: float, cid) -> float:
        """log of the space-time BV bound C_xt(t) = t*(C_x + 2*C_t)."""
        if t <= 0:
            return -math.inf
        return _log(t) + _logaddexp(
            self.log_cx(t, cid), math.log(2.0) + self.log_ct(t, cid)
        )


def _diff_norm(a: np.ndarray, dead: np.ndarray, axis: int, h: float) -> float:
    """Max |first difference|/h excluding pairs straddling a dead-region edge."""
    d = np.abs(np.diff(a, axis=axis)) / h
    sl0 = [slice(None)] * a.ndim
    sl1 = [slice(None)] * a.ndim
    sl0[axis] = slice(None, -1)
    sl1[axis] = slice(1, None)
    straddle = dead[tuple(sl0)] != dead[tuple(sl1)]
    d = np.where(straddle, 0.0, d)
    return float(d.max()) if d.size else 0.0


def _diff2_norm(a: np.ndarray, dead: np.ndarray, axis: int, h: float) -> float:
    """Max |second difference|/h^2 excluding triples touching a dead-region edge."""
    d = np.abs(np.diff(a, n=2, axis=axis)) / (h * h)
    sl = [slice(None)] * a.ndim
    sl[axis] = slice(None, -1)
    pair = dead[tuple(sl)] != np.roll(dead, -1, axis=axis)[tuple(sl)]
    sl0 = [slice(None)] * a.ndim
    sl0[axis] = slice(None, -1)
    sl1 = [slice(None)] * a.ndim
    sl1[axis] = slice(1, None)
    straddle = pair[tuple(sl0)] | pair[tuple(sl1)]
    d = np.where(straddle, 0.0, d)
    return float(d.max()) if d.size else 0.0


def compute_constants(
    scenario, initial_fields, cutoff_stddevs: float = 5.0, mollify_vstat: bool = False
) -> BoundConstants:
    """Evaluate every bound constant from kernel norms and initial data.

    Velocity derivative norms are taken from grid samples; differences that
    straddle a zero-velocity region boundary are excluded (the static field
    is only piecewise smooth there) unless mollify_vstat smooths the samples
    with the congestion kernel first.
    """
    grid = scenario.grid
    h = SmoothedHeaviside(scenario.heaviside_slope)
    L_H = lipschitz_constant(h)
    grad_tilde = kernel_norms(scenario.sigma_tilde).grad

    X, Y = grid.cell_centers()
    v1c, v2c = scenario.static_velocity(X, Y)
    v1c = np.asarray(v1c, dtype=float)
    v2c = np.asarray(v2c, dtype=float)
    dead = scenario.zero_velocity_mask(X, Y)
    if mollify_vstat:
        smooth = build_stencils(scenario.sigma_tilde, grid, cutoff_stddevs)[2]
        from scipy import signal

        w = smooth.weights * grid.cell_area
        v1c = signal.convolve(v1c, w, mode="same")
        v2c = signal.convolve(v2c, w, mode="same")
        dead = np.zeros_like(dead)

    v1i, v2i = scenario.interface_static_velocities()
    v_inf = max(
        float(np.abs(v1c).max()),
        float(np.abs(v2c).max()),
        float(np.abs(v1i).max()),
        float(np.abs(v2i).max()),
    )
    dv1dx = _diff_norm(v1c, dead, 1, grid.dx)
    dv1dy = _diff_norm(v1c, dead, 0, grid.dy)
    dv2dx = _diff_norm(v2c, dead, 1, grid.dx)
    dv2dy = _diff_norm(v2c, dead, 0, grid.dy)
    dv_inf = max(dv1dx, dv1dy, dv2dx, dv2dy)
    d2v_inf = max(
        _diff2_norm(v1c, dead, 1, grid.dx),
        _diff2_norm(v1c, dead, 0, grid.dy),
        _diff2_norm(v2c, dead, 1, grid.dx),
        _diff2_norm(v2c, dead, 0, grid.dy),
    )

    r0 = augmented_density(
        initial_fields, scenario.classes, scenario.obstacle_mass_field()
    )
    r_omega0_l1 = r0.l1()

    per_class = {}
    for c, f0 in zip(scenario.classes, initial_fields):
        norms = kernel_norms(c.sigma)
        coupling = 2.0 * norms.hess + L_H * grad_tilde
        c_inf = dv1dx + dv2dy + 2.0 * c.epsilon * coupling * r_omega0_l1
        k1 = 6.0 * (dv_inf + c.epsilon * coupling * r_omega0_l1)
        c1 = 2.0 * norms.third
        c2 = 3.0 * norms.hess**2 + 2.0 * L_H * grad_tilde * norms.hess
        rho0_l1 = l1_norm(f0)
        k2 = (
            4.0 * c.epsilon * (c1 * r_omega0_l1 + c2 * r_omega0_l1**2)
            + 3.0 * d2v_inf
        ) * rho0_l1
        cc = ClassConstants(
            epsilon=c.epsilon,
            c_inf=c_inf,
            k1=k1,
            k2=k2,
            c1=c1,
            c2=c2,
            tv0=bv_seminorm(f0),
            rho0_l1=rho0_l1,
            rho0_linf=float(np.abs(f0.values).max()),
            hess=norms.hess,
        )
        per_class[c.id] = cc
    return BoundConstants(
        L_H=L_H,
        v_inf=v_inf,
        dv1dx_inf=dv1dx,
        dv2dy_inf=dv2dy,
        dv_inf=dv_inf,
        d2v_inf=d2v_inf,
        grad_tilde=grad_tilde,
        r_omega0_l1=r_omega0_l1,
        per_class=per_class,
    )


# -- per-step checks --------------------------------------------------------


def linf_check(field: Field2D, constants: BoundConstants, cid, t: float):
    """(ratio, passed): max |rho| against |rho0|_inf * exp(C_inf t), log space."""
    m = float(np.abs(field.values).max())
    if m == 0.0:
        return 0.0, True
    log_ratio = math.log(m) - constants.log_linf_bound(t, cid)
    ratio = math.exp(min(log_ratio, 700.0))
    return ratio, ratio <= 1.0 + RATIO_TOL


def bv_seminorm(field: Field2D) -> float:
    """Discrete BV seminorm with one-sided zero extension at the edges."""
    v = field.values
    p = np.pad(v, 1)
    sx = field.grid.dy * np.abs(np.diff(p, axis=1)).sum()
    sy = field.grid.dx * np.abs(np.diff(p, axis=0)).sum()
    return float(sx + sy)


def bv_check(field: Field2D, constants: BoundConstants, cid, t: float):
    """(ratio, passed): BV seminorm against C_x(t), evaluated in log space."""
    s = bv_seminorm(field)
    if s == 0.0:
        return 0.0, True
    log_ratio = math.log(s) - constants.log_cx(t, cid)
    ratio = math.exp(min(log_ratio, 700.0))
    return ratio, ratio <= 1.0 + RATIO_TOL


class BvxtAccumulator:
    """Running space-time BV sum, checked against C_xt(t)."""

    def __init__(self, grid):
        self.grid = grid
        self.sums = {}

    def add(self, cid, before: np.ndarray, after: np.ndarray, field_after: Field2D, dt: float):
        time_part = self.grid.cell_area * float(np.abs(after - before).sum())
        space_part = dt * bv_seminorm(field_after)
        self.sums[cid] = self.sums.get(cid, 0.0) + time_part + space_part

    def check(self, constants: BoundConstants, cid, t: float):
        s = self.sums.get(cid, 0.0)
        if s == 0.0 or t <= 0.0:
            return 0.0, True
        log_ratio = math.log(s) - constants.log_cxt(t, cid)
        ratio = math.exp(min(log_ratio, 700.0))
        return ratio, ratio <= 1.0 + RATIO_TOL


def kappa_samples(fields, r_max: float, count: int = 15):
    """Entropy test levels: {0, r_max} plus log-spaced values up to max rho."""
    m = max(float(np.abs(f.values).max()) for f in fields)
    out = [0.0, float(r_max)]
    if m > 0:
        out += list(np.geomspace(1e-6 * m, m, count))
    return out


def entropy_residual(
    before: np.ndarray,
    mid: np.ndarray,
    after: np.ndarray,
    v1: np.ndarray,
    v2: np.ndarray,
    J1: np.ndarray,
    J2: np.ndarray,
    lam_x: float,
    lam_y: float,
    kappas,
    open_right: bool = True,
):
    """Maximum discrete entropy residual over all cells and levels kappa.

    Evaluates, per cell and level, |rho^{n+1}-k| - |rho^n-k| plus the split
    divided differences of the Kruzkov fluxes (built from u max k / u min k)
    and the sign-weighted velocity-difference source terms; the scheme
    satisfies residual <= 0 up to roundoff.  Returns (max residual scaled by
    the largest flux magnitude, raw max, (j, i, kappa) at the raw max).
    When the right edge is open, its adjacent column is excluded (the
    zero-gradient ghost is not part of the whole-plane formulation).
    """

    def total_flux(v, J, a, b):
        return flux_static(v, a, b) + flux_nonlocal(a, b, J)

    pb = _pad_x(before, open_right)
    pm = _pad_y(mid)
    dv1 = v1[:, 1:] - v1[:, :-1] + J1[:, 1:] - J1[:, :-1]
    dv2 = v2[1:, :] - v2[:-1, :] + J2[1:, :] - J2[:-1, :]

    raw_max = -math.inf
    arg = (0, 0, 0.0)
    scale = 0.0
    for k in kappas:
        ub, wb = pb[:, :-1], pb[:, 1:]
        phi = total_flux(v1, J1, np.maximum(ub, k), np.maximum(wb, k)) - total_flux(
            v1, J1, np.minimum(ub, k), np.minimum(wb, k)
        )
        um, wm = pm[:-1, :], pm[1:, :]
        gam = total_flux(v2, J2, np.maximum(um, k), np.maximum(wm, k)) - total_flux(
            v2, J2, np.minimum(um, k), np.minimum(wm, k)
        )
        res = (
            np.abs(after - k)
            - np.abs(before - k)
            + lam_x * (phi[:, 1:] - phi[:, :-1] + np.sign(mid - k) * dv1 * k)
            + lam_y * (gam[1:, :] - gam[:-1, :] + np.sign(after - k) * dv2 * k)
        )
        if open_right:
            res = res[:, :-1]
        scale = max(
            scale,
            float(np.abs(phi).max()),
            float(np.abs(gam).max()),
            float(np.abs(before - k).max()),
        )
        m = float(res.max())
        if m > raw_max:
            raw_max = m
            jj, ii = np.unravel_index(int(res.argmax()), res.shape)
            arg = (int(jj), int(ii), float(k))
    scaled = raw_max / scale if scale > 0 else raw_max
    return scaled, raw_max, arg


def boundary_invariance_check(scenario, velocities, tol: float = 1e-12) -> int:
    """Count obstacle-adjacent interfaces whose total normal velocity points
    into the obstacle (summed over classes)."""
    mask = scenario.obstacle_cell_mask()
    free = ~mask
    v1, v2 = scenario.interface_static_velocities()
    count = 0
    for J in velocities:
        w1 = v1[:, 1:-1] + J.J1.values[:, 1:-1]
        into_r = free[:, :-1] & mask[:, 1:]
        into_l = mask[:, :-1] & free[:, 1:]
        count += int(np.sum(into_r & (w1 > tol)))
        count += int(np.sum(into_l & (w1 < -tol)))
        w2 = v2[1:-1, :] + J.J2.values[1:-1, :]
        into_u = free[:-1, :] & mask[1:, :]
        into_d = mask[:-1, :] & free[1:, :]
        count += int(np.sum(into_u & (w2 > tol)))
        count += int(np.sum(into_d & (w2 < -tol)))
    return count


def outflow_series(states, c_index: int):
    """Remaining-mass fraction U(t) of one class over a state history."""
    if not states:
        raise ValueError("empty state history")
    m0 = l1_norm(states[0].fields[c_index])
    if m0 <= 0:
        raise ValueError("zero initial mass: outflow series undefined")
    return [(s.t, l1_norm(s.fields[c_index]) / m0) for s in states]


def lipschitz_experiment(
    scenario,
    fields_a,
    fields_b,
    horizon: float,
    policy: CflPolicy = CflPolicy("bv", 0.9),
    method: str = "fft",
):
    """L1 distance per class between two runs sharing grid and time step."""
    sim = Simulator(scenario, policy, method=method)
    sa = sim.initial_state(fields_a)
    sb = sim.initial_state(fields_b)
    nsteps = max(1, math.floor(horizon / sim.dt + 1e-12))

    def dist(x, y):
        return [
            float(scenario.grid.cell_area * np.abs(fx.values - fy.values).sum())
            for fx, fy in zip(x.fields, y.fields)
        ]

    out = [(0.0, dist(sa, sb))]
    for _ in range(nsteps):
        sa, _info = sim.step(sa)
        sb, _info = sim.step(sb)
        out.append((sa.t, dist(sa, sb)))
    return out


@dataclass
class DiagnosticsRecord:
    """Per-step monitor snapshot, serialized as one NDJSON line."""

    t: float
    n: int
    mass: dict
    min_value: dict
    max_value: dict
    linf_ratio: dict
    bv_value: dict
    bv_ratio: dict
    bvxt_ratio: dict
    outflow: dict
    entropy_residual: float | None = None
    kernel_ratio_max: float | None = None
    boundary_violations: int | None = None
    obstacle_mass: dict | None = None

    def to_dict(self) -> dict:
        out = {"t": self.t, "n": self.n}
        for name in (
            "mass",
            "min_value",
            "max_value",
            "linf_ratio",
            "bv_value",
            "bv_ratio",
            "bvxt_ratio",
            "outflow",
        ):
            for cid, v in getattr(self, name).items():
                out[f"{name}.{cid}"] = v
        if self.entropy_residual is not None:
            out["entropy_residual"] = self.entropy_residual
        if self.kernel_ratio_max is not None:
            out["kernel_ratio_max"] = self.kernel_ratio_max
        if self.boundary_violations is not None:
            out["boundary_violations"] = self.boundary_violations
        if self.obstacle_mass is not None:
            for cid, v in self.obstacle_mass.items():
                out[f"obstacle_mass.{cid}"] = v
        return out
