import numpy as np
import pytest

from beltflow import Field2D, Grid, InterfaceField, cell_center, l1_norm


def test_cell_center_unit_grid():
    g = Grid(4, 4, 1.0, 1.0)
    assert cell_center(g, 0, 0) == (0.5, 0.5)


def test_cell_center_half_spacing():
    g = Grid(4, 4, 0.5, 0.5)
    assert cell_center(g, 2, 0) == (1.25, 0.25)


def test_cell_center_offset_origin():
    g = Grid(4, 4, 1.0, 1.0, x0=-1.0, y0=-1.0)
    assert cell_center(g, 0, 0) == (-0.5, -0.5)


def test_cell_center_out_of_range():
    g = Grid(4, 4, 1.0, 1.0)
    with pytest.raises(IndexError):
        g.cell_center(4, 0)
    with pytest.raises(IndexError):
        g.cell_center(0, -1)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(2, 4, 1.0, 1.0)
    with pytest.raises(ValueError):
        Grid(4, 4, 0.0, 1.0)


def test_interface_spacing_consistency():
    g = Grid(7, 5, 0.3, 0.2, x0=1.0, y0=-2.0)
    X, _ = g.x_interface_points()
    dx = np.diff(X, axis=1)
    assert np.allclose(dx, g.dx, rtol=1e-15, atol=0.0)
    _, Y = g.y_interface_points()
    dy = np.diff(Y, axis=0)
    assert np.allclose(dy, g.dy, rtol=1e-15, atol=0.0)


def test_l1_norm_zero_field():
    g = Grid(5, 5, 1.0, 1.0)
    assert l1_norm(Field2D.zeros(g)) == 0.0


def test_l1_norm_single_cell():
    g = Grid(5, 5, 0.1, 0.1)
    f = Field2D.zeros(g)
    f.values[2, 3] = 2.0
    assert l1_norm(f) == pytest.approx(0.02, rel=1e-15)


def test_l1_norm_uniform():
    g = Grid(10, 10, 1.0, 1.0)
    f = Field2D(g, np.ones(g.shape))
    assert l1_norm(f) == pytest.approx(100.0, rel=1e-15)


def test_l1_norm_homogeneous():
    g = Grid(6, 4, 0.2, 0.5)
    rng = np.random.default_rng(3)
    f = Field2D(g, rng.standard_normal(g.shape))
    for c in (-3.0, 0.0, 2.5):
        cf = Field2D(g, c * f.values)
        assert l1_norm(cf) == pytest.approx(abs(c) * l1_norm(f), rel=1e-13, abs=1e-300)


def test_field_shape_mismatch():
    g = Grid(4, 3, 1.0, 1.0)
    with pytest.raises(ValueError):
        Field2D(g, np.zeros((4, 4)))


def test_interface_field_shapes():
    g = Grid(4, 3, 1.0, 1.0)
    InterfaceField(g, "x", np.zeros((3, 5)))
    InterfaceField(g, "y", np.zeros((4, 4)))
    with pytest.raises(ValueError):
        InterfaceField(g, "x", np.zeros((3, 4)))
    with pytest.raises(ValueError):
        InterfaceField(g, "z", np.zeros((3, 5)))
