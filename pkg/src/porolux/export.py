"""CSV and VTK writers.

CSV: a header row ``x,y[,z],value...`` followed by one row per sample in
C order over the grid indices (x slowest), every float printed with 17
significant digits so a read-back reproduces the doubles bit for bit.

VTK: legacy ASCII ``STRUCTURED_POINTS`` with point data at cell centres
(x fastest, as the format requires).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ColumnField3D, ScalarField2D, VectorField2D

FLOAT_FMT = "%.17g"


class ExportError(OSError):
    pass


def _fmt(v) -> str:
    return FLOAT_FMT % v


def write_table(path, header, columns):
    """Write equal-length ``columns`` under ``header``."""
    cols = [np.asarray(c, dtype=float).ravel() + 0.0 for c in columns]  # + 0.0 folds -0 into 0
    if len(header) != len(cols) or len({c.shape[0] for c in cols}) > 1:
        raise ValueError("header/column mismatch")
    if not all(np.all(np.isfinite(c)) for c in cols):
        raise ValueError("non-finite values cannot be exported")
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in zip(*cols))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return Path(path)


def export_csv(obj, path, names=None):
    """Export a 2D field, a per-column 3D field or a table (list of dict rows).

    ``names`` overrides the value column names (default ``value`` or
    ``value0, value1, ...``).
    """
    if isinstance(obj, (ScalarField2D, VectorField2D)):
        X, Y = obj.grid.centers()
        vals = [obj.values] if isinstance(obj, ScalarField2D) else list(obj.values)
        names = names or (["value"] if len(vals) == 1 else [f"value{i}" for i in range(len(vals))])
        return write_table(path, ["x", "y", *names], [X, Y, *vals])
    if isinstance(obj, ColumnField3D):
        X, Y = obj.grid.centers()
        shape = obj.z.shape
        X = np.broadcast_to(X[..., None], shape)
        Y = np.broadcast_to(Y[..., None], shape)
        vals = list(obj.values)
        names = names or (["value"] if len(vals) == 1 else [f"value{i}" for i in range(len(vals))])
        return write_table(path, ["x", "y", "z", *names], [X, Y, obj.z, *vals])
    rows = list(obj)
    if not rows:
        raise ValueError("empty table")
    header = names or list(rows[0])
    return write_table(path, header, [[r[k] for r in rows] for k in header])


def read_csv(path):
    """Return ``(header, data)`` with ``data`` shaped ``(nrows, ncols)``."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]], dtype=float)
    return header, data.reshape(len(text) - 1, len(header))


@dataclass(frozen=True, eq=False)
class CellField3D:
    """Uniform 3D cell-centred arrays, all shaped ``(nx, ny, nz)`` (vectors ``(3, nx, ny, nz)``)."""

    spacing: tuple
    scalars: dict
    vectors: dict

    @property
    def shape(self):
        for v in self.scalars.values():
            return v.shape
        for v in self.vectors.values():
            return v.shape[1:]
        raise ValueError("empty field")

    def centers(self):
        axes = [(np.arange(n) + 0.5) * d for n, d in zip(self.shape, self.spacing)]
        return np.meshgrid(*axes, indexing="ij")


def export_cell_csv(field: CellField3D, path):
    X, Y, Z = field.centers()
    names, cols = [], []
    for name, v in field.scalars.items():
        names.append(name)
        cols.append(v)
    for name, v in field.vectors.items():
        for c, comp in zip("xyz", v):
            names.append(f"{name}_{c}")
            cols.append(comp)
    return write_table(path, ["x", "y", "z", *names], [X, Y, Z, *cols])


def export_structured_grid(field: CellField3D, path, title="porolux"):
    """Legacy ASCII VTK ``STRUCTURED_POINTS`` file (title truncated to 255 chars)."""
    nx, ny, nz = field.shape
    dx, dy, dz = field.spacing
    title = title.replace("\n", " ")[:255]
    out = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET STRUCTURED_POINTS",
           f"DIMENSIONS {nx} {ny} {nz}",
           f"ORIGIN {_fmt(dx / 2)} {_fmt(dy / 2)} {_fmt(dz / 2)}",
           f"SPACING {_fmt(dx)} {_fmt(dy)} {_fmt(dz)}",
           f"POINT_DATA {nx * ny * nz}"]
    for name, v in field.scalars.items():
        out += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        out += [_fmt(x) for x in np.asarray(v).transpose(2, 1, 0).ravel()]
    for name, v in field.vectors.items():
        out.append(f"VECTORS {name} double")
        comps = [np.asarray(c).transpose(2, 1, 0).ravel() for c in v]
        out += [" ".join(_fmt(x) for x in row) for row in zip(*comps)]
    try:
        Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return Path(path)


def read_structured_grid(path):
    """Parse a file written by :func:`export_structured_grid`; returns ``(dims, scalars, vectors)``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    dims = tuple(int(v) for v in lines[4].split()[1:])
    n = dims[0] * dims[1] * dims[2]
    i = 8
    scalars, vectors = {}, {}
    shape_f = dims[::-1]
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "SCALARS":
            vals = np.array([float(x) for x in lines[i + 2:i + 2 + n]])
            scalars[parts[1]] = vals.reshape(shape_f).transpose(2, 1, 0)
            i += 2 + n
        elif parts[0] == "VECTORS":
            vals = np.array([[float(x) for x in ln.split()] for ln in lines[i + 1:i + 1 + n]])
            vectors[parts[1]] = np.stack([vals[:, c].reshape(shape_f).transpose(2, 1, 0) for c in range(3)])
            i += 1 + n
        else:
            raise ValueError(f"unexpected VTK line {lines[i]!r}")
    return dims, scalars, vectors
