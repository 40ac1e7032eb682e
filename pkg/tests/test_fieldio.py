import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smspike.fieldio import FieldFormatError, read_field, read_mask, write_field, write_mask
from smspike.mesh import DomainError, ScalarField, build_domain


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["ball", "torus", "cube"]))
def test_roundtrip_bit_exact(tmp_path_factory, seed, shape):
    kw = {"ball": {"radius": 0.4}, "torus": {"major": 0.3, "minor": 0.15}, "cube": {}}[shape]
    g = build_domain(shape, 20, **kw)
    u = ScalarField(g, np.random.default_rng(seed).normal(size=g.n_interior))
    path = tmp_path_factory.mktemp("f") / "u.smsf"
    write_field(path, u)
    v = read_field(path)
    np.testing.assert_array_equal(v.values, u.values)
    np.testing.assert_array_equal(v.grid.mask, g.mask)
    assert v.grid.h == g.h
    np.testing.assert_array_equal(v.grid.origin, g.origin)
    w = read_field(path, grid=g)
    assert w.grid is g


def test_header_layout(tmp_path):
    g = build_domain("ball", 16, radius=0.4)
    write_field(tmp_path / "u.smsf", ScalarField.zeros(g))
    raw = (tmp_path / "u.smsf").read_bytes()
    magic, ver, nx, ny, nz, h = struct.unpack_from("<4sI3Id", raw)
    assert (magic, ver, (nx, ny, nz), h) == (b"SMSF", 1, g.dims, g.h)
    assert len(raw) == 4 + 4 + 12 + 8 + 24 + nx * ny * nz + 8 * g.n_interior


def test_mask_file(tmp_path):
    g = build_domain("torus", 20, major=0.3, minor=0.15)
    write_mask(tmp_path / "m.smsm", g)
    np.testing.assert_array_equal(read_mask(tmp_path / "m.smsm").mask, g.mask)
    with pytest.raises(FieldFormatError):
        read_field(tmp_path / "m.smsm")


def test_corrupt_files(tmp_path):
    g = build_domain("ball", 16, radius=0.4)
    p = tmp_path / "u.smsf"
    write_field(p, ScalarField.zeros(g))
    raw = p.read_bytes()
    (tmp_path / "a").write_bytes(b"XXXX" + raw[4:])
    (tmp_path / "b").write_bytes(raw[:-8])
    (tmp_path / "c").write_bytes(raw[:10])
    for name in "abc":
        with pytest.raises(FieldFormatError):
            read_field(tmp_path / name)
    with pytest.raises(DomainError):
        read_field(p, grid=build_domain("ball", 16, radius=0.3))
