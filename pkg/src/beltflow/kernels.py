# kernels.py
"""Gaussian mollifiers, their sampled stencils, and the smoothed Heaviside.

The interaction kernels are isotropic Gaussians
    eta_sigma(x, y) = sigma/(2*pi) * exp(-sigma*(x^2+y^2)/2)
with unit continuous mass. Stencils sample the analytic kernel (or its
partial derivatives) on cell-offset and interface-offset lattices; the
smoothing stencil is renormalized to exact discrete unit mass, derivative
stencils are left raw (their antisymmetry already gives zero discrete mean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .grid import Grid

TWO_PI = 2.0 * math.pi


def gaussian_value(sigma: float, x, y):
    """Gaussian kernel sigma/(2*pi)*exp(-sigma*(x^2+y^2)/2); vectorized."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = sigma / TWO_PI * np.exp(-0.5 * sigma * (x * x + y * y))
    return out if out.ndim else float(out)


def _kernel_samples(kind: str, sigma: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample the kernel ('smooth') or one of its partials ('dx'/'dy')."""
    g = sigma / TWO_PI * np.exp(-0.5 * sigma * (x * x + y * y))
    if kind == "smooth":
        return g
    if kind == "dx":
        return -sigma * x * g
    if kind == "dy":
        return -sigma * y * g
    raise ValueError(f"unknown kernel kind {kind!r}")


@dataclass
class KernelStencil:
    """Sampled kernel window on the cell lattice.

    weights[dj + R, di + R] holds the kernel sample at offset (di*dx, dj*dy)
    for di, dj in [-R, R].  Use interface_samples() for the staggered windows
    consumed by the interface convolutions.
    """

    kind: str  # "smooth" | "dx" | "dy"
    sigma: float
    radius_cells: int
    dx: float
    dy: float
    weights: np.ndarray
    _iface_cache: dict = field(default_factory=dict, repr=False)

    def offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer offset arrays (DI, DJ) matching the weights window."""
        r = self.radius_cells
        di = np.arange(-r, r + 1)
        return np.meshgrid(di, di)

    def interface_samples(self, axis: str) -> np.ndarray:
        """Kernel sampled at interface-to-center offsets.

        axis "x": K[q+R, m+R] = kernel((m-1/2)*dx, q*dy), m in [-R, R+1],
        q in [-R, R]; axis "y" is the transpose-staggered analogue. The
        smoothing kernel is renormalized to exact discrete unit mass on its
        own sampling lattice.
        """
        if axis in self._iface_cache:
            return self._iface_cache[axis]
        r = self.radius_cells
        if axis == "x":
            m = np.arange(-r, r + 2)
            q = np.arange(-r, r + 1)
            X = (m[None, :] - 0.5) * self.dx
            Y = q[:, None] * self.dy
        elif axis == "y":
            m = np.arange(-r, r + 1)
            q = np.arange(-r, r + 2)
            X = m[None, :] * self.dx
            Y = (q[:, None] - 0.5) * self.dy
        else:
            raise ValueError("axis must be 'x' or 'y'")
        k = _kernel_samples(self.kind, self.sigma, X + 0.0 * Y, Y + 0.0 * X)
        if self.kind == "smooth":
            k = k / (self.dx * self.dy * k.sum())
        self._iface_cache[axis] = k
        return k


def stencil_radius(sigma: float, grid: Grid, cutoff_stddevs: float) -> int:
    """Window half-width in cells for a cutoff at `cutoff_stddevs`/sqrt(sigma)."""
    return math.ceil(cutoff_stddevs / (math.sqrt(sigma) * min(grid.dx, grid.dy)))


def build_stencils(
    sigma: float, grid: Grid, cutoff_stddevs: float = 5.0
) -> tuple[KernelStencil, KernelStencil, KernelStencil]:
    """Sampled (d/dx, d/dy, smoothing) stencils for a Gaussian of width sigma."""
    if sigma <= 0:
        raise ConfigError("kernel sigma must be positive")
    if cutoff_stddevs < 3:
        raise ConfigError("cutoff_stddevs must be at least 3")
    r = stencil_radius(sigma, grid, cutoff_stddevs)
    if r > min(grid.nx, grid.ny):
        raise ConfigError(
            f"kernel radius {r} cells exceeds grid size {grid.nx}x{grid.ny}; "
            "refine sigma or the mesh"
        )
    di = np.arange(-r, r + 1)
    X = di[None, :] * grid.dx * np.ones((2 * r + 1, 1))
    Y = di[:, None] * grid.dy * np.ones((1, 2 * r + 1))
    out = []
    for kind in ("dx", "dy", "smooth"):
        w = _kernel_samples(kind, sigma, X, Y)
        if kind == "smooth":
            w = w / (grid.dx * grid.dy * w.sum())
        out.append(KernelStencil(kind, sigma, r, grid.dx, grid.dy, w))
    return tuple(out)


@dataclass(frozen=True)
class SmoothedHeaviside:
    """Inverse-tangent step u -> arctan(slope*(u-1))/pi + 1/2."""

    slope: float = 50.0

    def __post_init__(self):
        if self.slope <= 0:
            raise ValueError("slope must be positive")

    def __call__(self, u):
        return np.arctan(self.slope * (np.asarray(u, dtype=float) - 1.0)) / math.pi + 0.5


def heaviside(h: SmoothedHeaviside, u):
    """Evaluate the smoothed Heaviside at u."""
    out = h(u)
    return out if np.ndim(out) else float(out)


def lipschitz_constant(h: SmoothedHeaviside) -> float:
    """max |H'| = slope/pi (attained at u=1)."""
    return h.slope / math.pi


class KernelNorms(NamedTuple):
    grad: float  # sup |grad eta|
    hess: float  # max absolute Hessian entry
    third: float  # max absolute third-derivative entry


def _max_abs_1d(fn, lo: float, hi: float, n: int = 4001, refinements: int = 6) -> float:
    """Numerically maximize |fn| on [lo, hi] by dense sampling + window refinement."""
    for _ in range(refinements):
        x = np.linspace(lo, hi, n)
        v = np.abs(fn(x))
        k = int(np.argmax(v))
        step = (hi - lo) / (n - 1)
        lo = max(lo, x[k] - 2 * step)
        hi = min(hi + 0.0, x[k] + 2 * step)
    return float(np.abs(fn(np.linspace(lo, hi, n))).max())


def kernel_norms(sigma: float) -> KernelNorms:
    """Sup-norms of the Gaussian's gradient, Hessian, and third derivatives.

    Computed numerically from the separable 1D profiles of the scaled kernel
    (substituting u = sqrt(sigma)*x reduces every entry to products of 1D
    profiles of exp(-u^2/2)), then rescaled by sigma^(3/2), sigma^2,
    sigma^(5/2) and the 1/(2*pi) prefactor.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    e = np.exp
    # |grad| is radial: max over rho >= 0 of rho*exp(-rho^2/2)
    g1 = _max_abs_1d(lambda r: r * e(-0.5 * r * r), 0.0, 6.0)
    # Hessian entries: d11 -> (x^2-1)e^{-x^2/2} profile; d12 -> product of two
    # odd profiles x e^{-x^2/2}
    p_odd = _max_abs_1d(lambda x: x * e(-0.5 * x * x), 0.0, 6.0)
    p_d2 = _max_abs_1d(lambda x: (x * x - 1.0) * e(-0.5 * x * x), 0.0, 6.0)
    g2 = max(p_d2, p_odd * p_odd)
    # Third-derivative entries: d111 -> x(3-x^2)e^{-x^2/2}; d112 -> (x^2-1)y
    p_d3 = _max_abs_1d(lambda x: x * (3.0 - x * x) * e(-0.5 * x * x), 0.0, 6.0)
    g3 = max(p_d3, p_d2 * p_odd)
    s = float(sigma)
    return KernelNorms(
        grad=s**1.5 * g1 / TWO_PI,
        hess=s**2 * g2 / TWO_PI,
        third=s**2.5 * g3 / TWO_PI,
    )
