"""Output writers: profile CSV, streamed convergence history CSV, and the
binary final-state snapshot.

Snapshot layout (all little-endian):
  int32 M, int32 D, int32 N_1 .. N_D,
  then per interior cell in C order: u (3 float64), theta (float64),
  coefficients (float64 x binom(M+3, 3)).
"""

import struct

import numpy as np

from .grid import Grid, MomentField
from .states import _native_stress_heat
from .problems import normalize_shock_profile


def _fmt(value):
    return f"{value:.17g}"


def write_csv(path, columns):
    """Write an ordered {name: array} mapping as a single-header CSV."""
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for r in range(rows):
            fh.write(",".join(_fmt(columns[n][r]) for n in names) + "\n")


def profile_columns(problem, field):
    """Per-benchmark profile table of the steady field."""
    c, u, th = field.interior()
    if problem.kind == "shock":
        return normalize_shock_profile(field, problem)
    heat = np.array([_native_stress_heat(field.c[i], field.M)[1]
                     for i in range(field.nc)])
    if problem.kind == "couette":
        return {
            "x": field.grid.centers(0),
            "rho": c[:, 0].copy(),
            "theta": th.copy(),
            "u2": u[:, 1].copy(),
            "q1": heat[:, 0],
        }
    # cavity: full 2D field, C order (x outer, y inner)
    n1, n2 = field.grid.shape
    xs = np.repeat(field.grid.centers(0), n2)
    ys = np.tile(field.grid.centers(1), n1)
    return {
        "x": xs,
        "y": ys,
        "rho": c[:, 0].copy(),
        "u1": u[:, 0].copy(),
        "u2": u[:, 1].copy(),
        "theta": th.copy(),
        "q1": heat[:, 0],
        "q2": heat[:, 1],
    }


def write_profile(path, problem, field):
    write_csv(path, profile_columns(problem, field))


class HistoryWriter:
    """Streams (iter, residual, seconds) rows, flushing every iteration so
    aborted runs keep their history."""

    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write("iter,residual,seconds\n")
        self._fh.flush()

    def __call__(self, rec):
        self._fh.write(f"{rec.iteration},{_fmt(rec.residual)},"
                       f"{_fmt(rec.seconds)}\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_snapshot(path, field):
    grid = field.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<ii", field.M, grid.ndim))
        fh.write(struct.pack(f"<{grid.ndim}i", *grid.shape))
        body = np.empty((field.nc, 4 + field.tab.n))
        body[:, 0:3] = field.u[: field.nc]
        body[:, 3] = field.th[: field.nc]
        body[:, 4:] = field.c[: field.nc]
        fh.write(body.astype("<f8").tobytes())


def read_snapshot(path, extents=None):
    """Rebuild a MomentField from a snapshot (extents default to unit
    boxes, which is what all benchmarks use)."""
    with open(path, "rb") as fh:
        M, ndim = struct.unpack("<ii", fh.read(8))
        shape = struct.unpack(f"<{ndim}i", fh.read(4 * ndim))
        if extents is None:
            extents = tuple((0.0, 1.0) for _ in range(ndim))
        grid = Grid(tuple(shape), extents)
        field = MomentField(grid, M)
        body = np.frombuffer(fh.read(), dtype="<f8").reshape(
            grid.ncells, 4 + field.tab.n)
        field.u[: field.nc] = body[:, 0:3]
        field.th[: field.nc] = body[:, 3]
        field.c[: field.nc] = body[:, 4:]
    return field
