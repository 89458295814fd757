import struct

import numpy as np
import pytest

from plotkit import (
    ParseError,
    load_archive,
    read_frame_binary,
    read_frame_csv,
    read_outflow,
)


def _write_csv(path, t, fields, dx=0.5, dy=0.25):
    ny, nx = fields[0].shape
    with open(path, "w", newline="\n") as fh:
        fh.write("t,class,i,j,x,y,rho\n")
        for c, f in enumerate(fields, start=1):
            for j in range(ny):
                for i in range(nx):
                    x, y = (i + 0.5) * dx, (j + 0.5) * dy
                    fh.write(f"{t},{c},{i},{j},{x},{y},{float(f[j, i])!r}\n")


def _write_bin(path, fields):
    ny, nx = fields[0].shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", b"NLCL", nx, ny, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f, dtype="<f8").tobytes())


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    fields = [rng.random((3, 4)), rng.random((3, 4))]
    p = tmp_path / "snapshot_000010.csv"
    _write_csv(p, 1.25, fields)
    frame = read_frame_csv(p)
    assert frame.t == 1.25
    assert len(frame.fields) == 2
    for got, want in zip(frame.fields, fields):
        assert np.array_equal(got, want)
    assert frame.extent == pytest.approx((0.0, 2.0, 0.0, 0.75))


def test_csv_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,class,value\n0,1,0\n")
    with pytest.raises(ParseError):
        read_frame_csv(p)


def test_csv_malformed_row(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,class,i,j,x,y,rho\n0,1,0,0,0.5,0.5,not-a-number\n")
    with pytest.raises(ParseError):
        read_frame_csv(p)


def test_binary_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    fields = [rng.random((5, 7))]
    p = tmp_path / "snapshot_000000.bin"
    _write_bin(p, fields)
    frame = read_frame_binary(p, extent=(0, 7, 0, 5), t=2.0)
    assert frame.t == 2.0
    assert np.array_equal(frame.fields[0], fields[0])
    assert read_frame_binary(p).extent == (0.0, 7.0, 0.0, 5.0)


def test_binary_bad_magic(tmp_path):
    p = tmp_path / "snapshot_000000.bin"
    p.write_bytes(b"XXXX" + b"\0" * 12)
    with pytest.raises(ParseError):
        read_frame_binary(p)


def test_load_archive_sorted_and_prefers_csv(tmp_path):
    a = np.full((2, 2), 3.0)
    _write_csv(tmp_path / "snapshot_000020.csv", 2.0, [a])
    _write_csv(tmp_path / "snapshot_000000.csv", 0.0, [0 * a])
    _write_bin(tmp_path / "snapshot_000020.bin", [0 * a])  # shadowed by the CSV
    frames = load_archive(tmp_path)
    assert [n for n, _ in frames] == [0, 20]
    assert frames[1][1].fields[0][0, 0] == 3.0


def test_load_archive_empty_dir(tmp_path):
    with pytest.raises(ParseError):
        load_archive(tmp_path)


def test_outflow_round_trip(tmp_path):
    p = tmp_path / "outflow.csv"
    p.write_text("t,U_class1,U_class2\n0,1,1\n0.5,0.8,0.9\n")
    t, u = read_outflow(p)
    assert np.array_equal(t, [0.0, 0.5])
    assert np.array_equal(u, [[1.0, 1.0], [0.8, 0.9]])


@pytest.mark.parametrize(
    "text",
    [
        "t,U_class1\n",  # empty series
        "t,mass1\n0,1\n",  # wrong column names
        "t,U_class1\n0,1,extra\n",  # ragged row
    ],
)
def test_outflow_rejects_malformed(tmp_path, text):
    p = tmp_path / "outflow.csv"
    p.write_text(text)
    with pytest.raises(ParseError):
        read_outflow(p)
