"""Binary grid format and CSV round trips."""

import numpy as np
import pytest

from qfo.errors import QfoError
from qfo.gridio import read_field, write_field, write_profile_csv, write_volume
from qfo.grids import Grid1D, Grid2D
from qfo.wavepackets import make_gaussian_2d, make_rect_spectrum


def test_header_layout(tmp_path):
    g = Grid2D.centered(32, 64, 0.25, 0.5)
    f = make_gaussian_2d(g, 1.0, 2.0)
    p = tmp_path / "f.qfo"
    write_field(p, f)
    raw = p.read_bytes()
    assert raw[:4] == b"QFO1"
    header = raw[:64].decode("ascii")
    assert header.split() == ["QFO1", "32", "64", "0.25", "0.5", "-4", "-16"]
    assert len(raw) == 64 + 32 * 64 * 8  # complex64 payload


def test_round_trip(tmp_path):
    g = Grid2D.centered(32, 32, 0.25, 0.25)
    f = make_gaussian_2d(g, 1.0, 1.0, tilt_kx=2.0)
    p = tmp_path / "f.qfo"
    write_field(p, f)
    back = read_field(p)
    assert back.grid.close_to(g)
    # payload carries complex64 precision
    assert np.allclose(back.values, f.values, atol=1e-6)


def test_write_twice_identical_bytes(tmp_path):
    g = Grid2D.centered(32, 32, 0.25, 0.25)
    f = make_gaussian_2d(g, 1.0, 1.0)
    a, b = tmp_path / "a.qfo", tmp_path / "b.qfo"
    write_field(a, f)
    write_field(b, f)
    assert a.read_bytes() == b.read_bytes()


def test_reject_bad_magic(tmp_path):
    p = tmp_path / "junk.qfo"
    p.write_bytes(b"NOPE" + b" " * 60)
    with pytest.raises(QfoError):
        read_field(p)


def test_profile_csv(tmp_path):
    grid = Grid1D(64, 0.01, 1.0)
    s = make_rect_spectrum(grid, 1.1, 1.5)
    p = tmp_path / "s.csv"
    write_profile_csv(p, s)
    lines = p.read_text().splitlines()
    assert lines[0] == "omega,re,im"
    assert len(lines) == 65


def test_volume_index(tmp_path):
    g = Grid2D.centered(16, 16, 0.5, 0.5)
    f = make_gaussian_2d(g, 1.0, 1.0)
    index = write_volume(tmp_path, "vol", [(0.0, f), (1.5, f)])
    assert (tmp_path / "vol_0000.qfo").exists()
    assert (tmp_path / "vol_0001.qfo").exists()
    assert index["slices"][1]["z"] == 1.5
    import json

    on_disk = json.loads((tmp_path / "vol_index.json").read_text())
    assert on_disk == index
