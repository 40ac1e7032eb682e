"""
SMSF field files.

Layout (little-endian)::

    b"SMSF" | u32 version=1 | u32 nx, ny, nz | f64 h | f64 origin[3]
    | u8 mask[nx*ny*nz] (x fastest) | f64 values[n_interior] (mask order)

``SMSM`` files are the same without the values.  ``origin`` is the
position of node ``(0, 0, 0)``.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import DomainError, DomainGrid, ScalarField, build_domain

VERSION = 1
_HEAD = struct.Struct("<4sI3Id3d")


class FieldFormatError(ValueError):
    pass


def _header(magic: bytes, grid: DomainGrid) -> bytes:
    nx, ny, nz = grid.dims
    return _HEAD.pack(magic, VERSION, nx, ny, nz, float(grid.h), *map(float, grid.origin))


def _mask_bytes(grid: DomainGrid) -> bytes:
    return np.asarray(grid.mask, dtype=np.uint8).ravel(order="F").tobytes()


def write_field(path, u: ScalarField) -> None:
    g = u.grid
    with open(path, "wb") as fh:
        fh.write(_header(b"SMSF", g))
        fh.write(_mask_bytes(g))
        fh.write(np.asarray(u.values, dtype="<f8").tobytes())


def write_mask(path, grid: DomainGrid) -> None:
    with open(path, "wb") as fh:
        fh.write(_header(b"SMSM", grid))
        fh.write(_mask_bytes(grid))


def _read(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEAD.size:
        raise FieldFormatError("truncated header")
    magic, version, nx, ny, nz, h, ox, oy, oz = _HEAD.unpack_from(raw)
    if magic not in (b"SMSF", b"SMSM"):
        raise FieldFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version}")
    n = nx * ny * nz
    off = _HEAD.size
    if len(raw) < off + n:
        raise FieldFormatError("truncated mask")
    mask = np.frombuffer(raw, dtype=np.uint8, count=n, offset=off).astype(bool)
    mask = mask.reshape((nx, ny, nz), order="F")
    return magic, h, np.array([ox, oy, oz]), mask, raw, off + n


def _grid_from(h, origin, mask, grid):
    if grid is None:
        return build_domain("custom-mask", box_lo=origin - h, mask=mask, h=h)
    if (tuple(grid.dims) != mask.shape or not np.array_equal(grid.mask, mask)
            or not np.isclose(grid.h, h, rtol=1e-12, atol=0)
            or not np.allclose(grid.origin, origin, rtol=0, atol=1e-12 * max(1.0, h))):
        raise DomainError("file does not match the supplied grid")
    return grid


def read_field(path, grid: DomainGrid | None = None) -> ScalarField:
    """Read an SMSF file; reuse ``grid`` if given (it must match)."""
    magic, h, origin, mask, raw, off = _read(path)
    if magic != b"SMSF":
        raise FieldFormatError("mask-only file has no values")
    n_int = int(mask.sum())
    if len(raw) != off + 8 * n_int:
        raise FieldFormatError("value block has the wrong length")
    vals = np.frombuffer(raw, dtype="<f8", count=n_int, offset=off).astype(float)
    return ScalarField(_grid_from(h, origin, mask, grid), vals)


def read_mask(path) -> DomainGrid:
    _, h, origin, mask, _, _ = _read(path)
    return _grid_from(h, origin, mask, None)
