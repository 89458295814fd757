# grid.py
"""Uniform 2D Cartesian mesh and field containers.

Conventions used throughout the package:
  * cell (i, j) has center (x0 + (i+1/2)dx, y0 + (j+1/2)dy), 0 <= i < nx, 0 <= j < ny
  * interface i+1/2 sits at x0 + (i+1)dx
  * field arrays are indexed values[j, i] (row-major by j, then i)
  * x-interface arrays have shape (ny, nx+1); y-interface arrays (ny+1, nx)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian mesh with lower-left corner (x0, y0)."""

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid requires nx >= 3 and ny >= 3")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid requires dx > 0 and dy > 0")

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape (ny, nx) of a cell field."""
        return (self.ny, self.nx)

    @property
    def x_max(self) -> float:
        return self.x0 + self.nx * self.dx

    @property
    def y_max(self) -> float:
        return self.y0 + self.ny * self.dy

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        """Center of cell (i, j); raises IndexError when out of range."""
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            raise IndexError(f"cell index ({i}, {j}) out of range")
        return (self.x0 + (i + 0.5) * self.dx, self.y0 + (j + 0.5) * self.dy)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays X, Y of shape (ny, nx) holding all cell-center coordinates."""
        x = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        y = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(x, y)

    def x_interface_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of x-interfaces, shape (ny, nx+1)."""
        x = self.x0 + np.arange(self.nx + 1) * self.dx
        y = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(x, y)

    def y_interface_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of y-interfaces, shape (ny+1, nx)."""
        x = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        y = self.y0 + np.arange(self.ny + 1) * self.dy
        return np.meshgrid(x, y)


def cell_center(grid: Grid, i: int, j: int) -> tuple[float, float]:
    """Center of cell (i, j) on `grid`."""
    return grid.cell_center(i, j)


@dataclass
class Field2D:
    """One scalar value per cell, indexed values[j, i]."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> "Field2D":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field2D":
        """Sample fn(x, y) (vectorized) at cell centers."""
        X, Y = grid.cell_centers()
        return cls(grid, np.asarray(fn(X, Y), dtype=float))

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy())

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("field contains non-finite values")


@dataclass
class InterfaceField:
    """One scalar per interface along one axis.

    axis "x": shape (ny, nx+1); axis "y": shape (ny+1, nx).
    """

    grid: Grid
    axis: str
    values: np.ndarray

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        self.values = np.asarray(self.values, dtype=float)
        expected = interface_shape(self.grid, self.axis)
        if self.values.shape != expected:
            raise ValueError(
                f"interface field shape {self.values.shape} does not match {expected}"
            )


def interface_shape(grid: Grid, axis: str) -> tuple[int, int]:
    """Expected array shape of an interface field along `axis`."""
    if axis == "x":
        return (grid.ny, grid.nx + 1)
    if axis == "y":
        return (grid.ny + 1, grid.nx)
    raise ValueError("axis must be 'x' or 'y'")


def l1_norm(f: Field2D) -> float:
    """Discrete L1 norm dx*dy*sum(|f|)."""
    return float(f.grid.cell_area * np.abs(f.values).sum())
