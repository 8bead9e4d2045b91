"""On-disk formats for field dumps.

Binary grid format ("QFO1"): a 64-byte ASCII header

    QFO1 <nx> <ny> <dx> <dy> <x0> <y0>

space-padded to 64 bytes, followed by the field values row-major (x index
slow) as little-endian complex64 pairs.  Floats are printed with repr-level
precision; a header that cannot fit 64 bytes is rejected rather than
silently truncated.  1D data goes to CSV with a one-line header.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import QfoError
from .fields import SpatialField2D, SpectralField1D, TemporalField1D
from .grids import Grid2D

__all__ = [
    "write_field",
    "read_field",
    "write_csv_1d",
    "write_profile_csv",
    "write_volume",
]

_MAGIC = b"QFO1"
_HEADER_LEN = 64


def _header(grid: Grid2D) -> bytes:
    # highest precision whose header still fits; anything at or above %.6g
    # exceeds the complex64 payload fidelity anyway
    for prec in (17, 15, 12, 9, 6):
        floats = [
            f"{v:.{prec}g}" for v in (grid.dx, grid.dy, grid.x0, grid.y0)
        ]
        text = " ".join(["QFO1", str(grid.nx), str(grid.ny), *floats])
        raw = text.encode("ascii")
        if len(raw) <= _HEADER_LEN:
            return raw.ljust(_HEADER_LEN)
    raise QfoError(
        f"grid header {text!r} does not fit the 64-byte QFO1 header"
    )


def write_field(path, field: SpatialField2D) -> None:
    """Dump a 2D field in the QFO1 binary format."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_header(field.grid))
        fh.write(np.ascontiguousarray(field.values.astype(np.dtype("<c8"))).tobytes())


def read_field(path) -> SpatialField2D:
    """Read a QFO1 dump back into a field (complex64 precision)."""
    path = Path(path)
    raw = path.read_bytes()
    head = raw[:_HEADER_LEN]
    if not head.startswith(_MAGIC):
        raise QfoError(f"{path}: not a QFO1 file")
    parts = head.decode("ascii").split()
    if len(parts) != 7:
        raise QfoError(f"{path}: malformed QFO1 header {head!r}")
    nx, ny = int(parts[1]), int(parts[2])
    dx, dy, x0, y0 = (float(p) for p in parts[3:7])
    count = nx * ny
    vals = np.frombuffer(raw[_HEADER_LEN:], dtype="<c8", count=count)
    if vals.size != count:
        raise QfoError(f"{path}: truncated QFO1 payload")
    grid = Grid2D(nx, ny, dx, dy, x0, y0)
    return SpatialField2D(grid, vals.reshape(nx, ny).astype(np.complex128))


def write_csv_1d(path, coord_name: str, coords: np.ndarray, values: np.ndarray) -> None:
    """CSV dump of a complex 1D signal: coord, re, im."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"{coord_name},re,im\n")
        for c, v in zip(coords, values):
            fh.write(f"{c!r},{v.real!r},{v.imag!r}\n")


def write_profile_csv(path, field) -> None:
    """CSV for the 1D field types (spectral or temporal)."""
    if isinstance(field, SpectralField1D):
        write_csv_1d(path, "omega", field.omega, field.values)
    elif isinstance(field, TemporalField1D):
        write_csv_1d(path, "t", field.t, field.values)
    else:
        raise TypeError(f"no CSV writer for {type(field).__name__}")


def write_volume(out_dir, stem: str, slices: list[tuple[float, SpatialField2D]]) -> dict:
    """Stack of QFO1 dumps plus an index file mapping z to file names."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (z, field) in enumerate(slices):
        name = f"{stem}_{i:04d}.qfo"
        write_field(out_dir / name, field)
        entries.append({"z": z, "file": name})
    index = {"format": "QFO1-volume", "slices": entries}
    with open(out_dir / f"{stem}_index.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return index
