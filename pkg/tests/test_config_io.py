import numpy as np
import pytest

from beltflow import (
    Field2D,
    Grid,
    build_scenario,
    initial_fields,
    l1_norm,
    parse_config,
)
from beltflow.errors import ConfigError
from beltflow.io import (
    NdjsonWriter,
    read_outflow_csv,
    read_snapshot_binary,
    read_snapshot_csv,
    snapshot_name,
    write_outflow_csv,
    write_snapshot_binary,
    write_snapshot_csv,
)

MINIMAL = """
grid.nx = 24
grid.ny = 12
grid.dx = 0.05
grid.dy = 0.05
class.1.sigma = 30000
"""

TWO_CLASS = MINIMAL + """
class.1.region = right
class.2.sigma = 10000
class.2.alpha = 2
class.2.epsilon = 0.1
class.2.region = left
obstacle.1.shape = strip
obstacle.1.cx = 0.72
obstacle.1.cy = 0.21
obstacle.1.length = 0.6
obstacle.1.width = 0.05
obstacle.1.angle = 55
obstacle.1.mass = 40080
obstacle.1.zero_velocity = true
"""


# -- parsing -----------------------------------------------------------------


def test_parse_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg["grid.nx"] == 24 and cfg["grid.dy"] == 0.05
    assert cfg["t_end"] == 6.0
    assert cfg["r_max"] == 2004.0
    assert cfg["belt_speed"] == 0.1
    assert cfg["heaviside.slope"] == 50.0
    assert cfg["boundary.open_right"] is True
    assert cfg["numerics.cfl_mode"] == "bv"
    assert cfg.classes[1]["sigma"] == 30000.0
    assert cfg.classes[1]["region"] == "all"  # implicit for a single class
    assert cfg.classes[1]["epsilon"] == 0.05


def test_parse_comments_and_blank_lines():
    cfg = parse_config("# header\n\n" + MINIMAL + "t_end = 3   # inline\n")
    assert cfg["t_end"] == 3.0


def test_parse_unknown_key():
    with pytest.raises(ConfigError, match="unknown key: foo"):
        parse_config(MINIMAL + "foo = 1\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(MINIMAL + "class.1.bogus = 1\n")


def test_parse_missing_required():
    with pytest.raises(ConfigError, match="grid.ny"):
        parse_config("grid.nx = 8\ngrid.dx = 1\ngrid.dy = 1\nclass.1.sigma = 1\n")
    with pytest.raises(ConfigError, match="class"):
        parse_config("grid.nx = 8\ngrid.ny = 8\ngrid.dx = 1\ngrid.dy = 1\n")


def test_parse_type_errors_name_key():
    with pytest.raises(ConfigError, match="grid.nx"):
        parse_config(MINIMAL.replace("grid.nx = 24", "grid.nx = many"))
    with pytest.raises(ConfigError, match="boolean"):
        parse_config(MINIMAL + "walls.enabled = maybe\n")


def test_parse_multiclass_requires_region():
    bad = MINIMAL + "class.2.sigma = 10000\n"
    with pytest.raises(ConfigError, match="region"):
        parse_config(bad)


def test_parse_obstacle_validation():
    with pytest.raises(ConfigError, match="shape"):
        parse_config(MINIMAL + "obstacle.1.mass = 10\n")
    with pytest.raises(ConfigError, match="obstacle.1.mass"):
        parse_config(MINIMAL + "obstacle.1.shape = rect\nobstacle.1.rect = 0,1,0,1\n")
    with pytest.raises(ConfigError, match="obstacle.1.angle"):
        parse_config(
            MINIMAL
            + "obstacle.1.shape = strip\nobstacle.1.cx = 0.5\nobstacle.1.cy = 0.3\n"
            + "obstacle.1.length = 0.4\nobstacle.1.width = 0.05\nobstacle.1.mass = 9000\n"
        )


def test_parse_enum_validation():
    with pytest.raises(ConfigError, match="cfl_mode"):
        parse_config(MINIMAL + "numerics.cfl_mode = fast\n")
    with pytest.raises(ConfigError, match="formats"):
        parse_config(MINIMAL + "output.formats = csv,hdf5\n")


# -- scenario construction ----------------------------------------------------


def test_build_scenario_two_class():
    sc = build_scenario(parse_config(TWO_CLASS))
    assert sc.grid.shape == (12, 24)
    assert [c.id for c in sc.classes] == [1, 2]
    assert sc.classes[1].alpha == 2.0
    assert len(sc.obstacles.regions) == 1
    assert sc.zero_velocity_mask(0.72, 0.21)  # diverter center blocks the belt


def test_build_scenario_walls_add_strips():
    # wall width must exceed half a cell for the coarse test grid to see it
    sc = build_scenario(parse_config(TWO_CLASS + "walls.enabled = true\nwalls.width = 0.06\n"))
    assert len(sc.obstacles.regions) == 3
    mask = sc.obstacle_cell_mask()
    assert mask[0, :].all() and mask[-1, :].all()  # wall rows rasterized


def test_build_scenario_rejects_light_obstacle():
    bad = TWO_CLASS.replace("obstacle.1.mass = 40080", "obstacle.1.mass = 100")
    with pytest.raises(ConfigError, match="obstacle mass"):
        build_scenario(parse_config(bad))


def test_initial_fields_split_and_obstacle_clearing():
    cfg = parse_config(TWO_CLASS + "init.region = 0,0.4,0,0.6\nseed = 3\n")
    sc = build_scenario(cfg)
    f = initial_fields(cfg, sc)
    assert len(f) == 2
    X, _ = sc.grid.cell_centers()
    # class 1 right of the split, class 2 left; no mass inside obstacle cells
    assert np.all(f[0].values[X < cfg["init.x_split"]] == 0.0)
    assert np.all(f[1].values[X >= cfg["init.x_split"]] == 0.0)
    mask = sc.obstacle_cell_mask()
    assert np.all(f[0].values[mask] == 0.0) and np.all(f[1].values[mask] == 0.0)
    assert l1_norm(f[0]) + l1_norm(f[1]) > 0


def test_initial_fields_explicit_positions_deterministic():
    text = TWO_CLASS + "init.positions = 0.2,0.3; 0.25,0.35\n"
    cfg = parse_config(text)
    sc = build_scenario(cfg)
    a = initial_fields(cfg, sc)
    b = initial_fields(cfg, sc)
    assert np.array_equal(a[0].values, b[0].values)
    assert np.array_equal(a[1].values, b[1].values)


def test_initial_fields_csv_roundtrip(tmp_path):
    cfg = parse_config(TWO_CLASS)
    sc = build_scenario(cfg)
    fields = initial_fields(cfg, sc)
    p = tmp_path / "init.csv"
    write_snapshot_csv(0.0, fields, p)
    cfg2 = parse_config(TWO_CLASS + f"init.mode = csv\ninit.csv = {p}\n")
    loaded = initial_fields(cfg2, sc)
    for orig, back in zip(fields, loaded):
        assert np.abs(orig.values - back.values).max() <= 1e-18


# -- snapshot / outflow formats ------------------------------------------------


@pytest.fixture
def sample_fields():
    g = Grid(6, 4, 0.25, 0.5, x0=0.0, y0=0.0)
    rng = np.random.default_rng(21)
    return [Field2D(g, rng.random(g.shape)), Field2D(g, rng.random(g.shape))]


def test_snapshot_csv_roundtrip(sample_fields, tmp_path):
    p = tmp_path / "snap.csv"
    write_snapshot_csv(1.25, sample_fields, p)
    t, arrays = read_snapshot_csv(p, sample_fields[0].grid)
    assert t == 1.25
    for f, a in zip(sample_fields, arrays):
        assert np.abs(f.values - a).max() <= 1e-18  # 17 sig digits round-trips


def test_snapshot_csv_byte_identical(sample_fields, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_snapshot_csv(0.5, sample_fields, p1)
    write_snapshot_csv(0.5, sample_fields, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert b"\r" not in p1.read_bytes()


def test_snapshot_csv_layout(sample_fields, tmp_path):
    p = tmp_path / "snap.csv"
    write_snapshot_csv(0.0, sample_fields, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,class,i,j,x,y,rho"
    first = lines[1].split(",")
    assert first[1:4] == ["1", "0", "0"]
    assert float(first[4]) == 0.125 and float(first[5]) == 0.25  # cell centers
    g = sample_fields[0].grid
    assert len(lines) == 1 + 2 * g.nx * g.ny


def test_snapshot_binary_roundtrip(sample_fields, tmp_path):
    p = tmp_path / "snap.bin"
    write_snapshot_binary(sample_fields, p)
    nx, ny, arrays = read_snapshot_binary(p)
    assert (nx, ny) == (6, 4)
    for f, a in zip(sample_fields, arrays):
        assert np.array_equal(f.values, a)  # float64 is exact
    assert p.stat().st_size == 16 + 2 * 8 * nx * ny


def test_snapshot_binary_bad_magic(tmp_path):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"XXXX" + b"\0" * 12)
    with pytest.raises(ValueError, match="magic"):
        read_snapshot_binary(p)


def test_outflow_roundtrip(tmp_path):
    times = [0.0, 0.5, 1.0]
    series = [[1.0, 1.0], [0.8, 0.9], [0.5, 0.7]]
    p = tmp_path / "outflow.csv"
    write_outflow_csv(times, series, p)
    assert p.read_text().splitlines()[0] == "t,U_class1,U_class2"
    t, u = read_outflow_csv(p)
    assert np.array_equal(t, times)
    assert np.array_equal(u, series)


def test_ndjson_writer(tmp_path):
    p = tmp_path / "diag.ndjson"
    with NdjsonWriter(p) as w:
        w.write({"b": 2, "a": 1})
        w.write({"t": 0.5})
    lines = p.read_text().splitlines()
    assert lines[0] == '{"a": 1, "b": 2}'  # keys sorted for stable diffs
    assert len(lines) == 2


def test_snapshot_name():
    assert snapshot_name(0, "csv") == "snapshot_000000.csv"
    assert snapshot_name(450, "bin") == "snapshot_000450.bin"
