"""Cartesian grids, boundary specifications, and grid-indexed moment
fields with ghost slots.

Interior cells are stored first in flat C order, ghost slots after, so
interior and boundary faces share one face table and the kernels never
branch on boundary type.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._tables import index_count, table
from .basis import _as_u
from .states import MomentState


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian grid in 1 or 2 space dimensions."""

    shape: tuple
    extents: tuple  # ((lo, hi), ...) per dimension

    def __post_init__(self):
        if len(self.shape) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if len(self.extents) != len(self.shape):
            raise ValueError("extents must match dimension")
        for n in self.shape:
            if n < 2:
                raise ValueError("need at least 2 cells per dimension")

    @property
    def ndim(self):
        return len(self.shape)

    @property
    def ncells(self):
        return int(np.prod(self.shape))

    @property
    def dx(self):
        return np.array([(hi - lo) / n
                         for (lo, hi), n in zip(self.extents, self.shape)])

    @property
    def cell_volume(self):
        return float(np.prod(self.dx))

    def centers(self, d):
        lo, hi = self.extents[d]
        n = self.shape[d]
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5)

    def flat_index(self, idx):
        return int(np.ravel_multi_index(idx, self.shape))

    def multi_index(self, flat):
        return tuple(int(v) for v in np.unravel_index(flat, self.shape))

    def coarsen(self):
        """Grid with half the cells per dimension (cell counts must be
        even)."""
        for n in self.shape:
            if n % 2:
                raise ValueError("cannot coarsen an odd cell count")
        return Grid(tuple(n // 2 for n in self.shape), self.extents)


# --- boundary conditions ---------------------------------------------------

@dataclass(frozen=True)
class MaxwellWall:
    """Fully diffuse wall at velocity u and temperature theta."""

    u: tuple
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in
                                            np.asarray(self.u).reshape(3)))


@dataclass(frozen=True)
class PrescribedMaxwellian:
    """Fixed exterior Maxwellian (upstream / downstream states)."""

    rho: float
    u: tuple
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in
                                            np.asarray(self.u).reshape(3)))


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class BoundarySpec:
    """Per-face boundary conditions, keyed (dimension, side)."""

    conditions: tuple  # ((low, high), ...) per dimension

    def __post_init__(self):
        for low, high in self.conditions:
            if isinstance(low, Periodic) != isinstance(high, Periodic):
                raise ValueError("opposing faces must both be periodic "
                                 "or neither")

    def condition(self, d, side):
        return self.conditions[d][side]


def periodic_spec(ndim):
    return BoundarySpec(tuple((Periodic(), Periodic()) for _ in range(ndim)))


# --- face/ghost topology (depends on the grid only) ------------------------

@lru_cache(maxsize=None)
def _topology(grid):
    """Face table and ghost layout for a grid.

    Returns (faces, cell_lo, cell_hi, ghosts) where ghosts is a list of
    (dim, side, perp_index, adjacent_cell, wrap_cell) per ghost slot.
    """
    shape = grid.shape
    ndim = grid.ndim
    nc = grid.ncells

    ghosts = []
    ghost_id = {}
    for d in range(ndim):
        nperp = 1 if ndim == 1 else shape[1 - d]
        for side in (0, 1):
            for j in range(nperp):
                if ndim == 1:
                    adj = 0 if side == 0 else shape[0] - 1
                    wrap = shape[0] - 1 if side == 0 else 0
                else:
                    edge = 0 if side == 0 else shape[d] - 1
                    wedge = shape[d] - 1 if side == 0 else 0
                    idx = [0, 0]
                    idx[d] = edge
                    idx[1 - d] = j
                    adj = grid.flat_index(tuple(idx))
                    idx[d] = wedge
                    wrap = grid.flat_index(tuple(idx))
                ghost_id[(d, side, j)] = len(ghosts)
                ghosts.append((d, side, j, adj, wrap))

    def cell_or_ghost(idx, d, j):
        # idx is the running index along d; j the perpendicular index
        if idx < 0:
            return nc + ghost_id[(d, 0, j)]
        if idx >= shape[d]:
            return nc + ghost_id[(d, 1, j)]
        if ndim == 1:
            return idx
        full = [0, 0]
        full[d] = idx
        full[1 - d] = j
        return grid.flat_index(tuple(full))

    faces = []
    cell_lo = np.empty((nc, ndim), dtype=np.int64)
    cell_hi = np.empty((nc, ndim), dtype=np.int64)
    for d in range(ndim):
        nperp = 1 if ndim == 1 else shape[1 - d]
        for j in range(nperp):
            for k in range(shape[d] + 1):
                left = cell_or_ghost(k - 1, d, j)
                right = cell_or_ghost(k, d, j)
                fid = len(faces)
                faces.append((left, right, d))
                if right < nc:
                    cell_lo[right, d] = fid
                if left < nc:
                    cell_hi[left, d] = fid

    faces = np.array(faces, dtype=np.int64)
    return faces, cell_lo, cell_hi, tuple(ghosts)


@lru_cache(maxsize=None)
def _ghost_meta(grid, bc):
    """Per-ghost fill parameters for a (grid, boundary spec) pair."""
    _, _, _, ghosts = _topology(grid)
    ng = len(ghosts)
    g_kind = np.empty(ng, dtype=np.int64)
    g_src = np.empty(ng, dtype=np.int64)
    g_dir = np.empty(ng, dtype=np.int64)
    g_side = np.empty(ng, dtype=np.int64)
    g_rho = np.zeros(ng)
    g_u = np.zeros((ng, 3))
    g_th = np.ones(ng)
    for g, (d, side, _, adj, wrap) in enumerate(ghosts):
        cond = bc.condition(d, side)
        g_dir[g] = d
        g_side[g] = side
        if isinstance(cond, Periodic):
            g_kind[g] = 0
            g_src[g] = wrap
        elif isinstance(cond, PrescribedMaxwellian):
            g_kind[g] = 1
            g_src[g] = adj
            g_rho[g] = cond.rho
            g_u[g] = cond.u
            g_th[g] = cond.theta
        elif isinstance(cond, MaxwellWall):
            g_kind[g] = 2
            g_src[g] = adj
            g_u[g] = cond.u
            g_th[g] = cond.theta
        else:
            raise TypeError(f"unknown boundary condition {cond!r}")
    return g_kind, g_src, g_dir, g_side, g_rho, g_u, g_th


class MomentField:
    """Grid-indexed collection of native moment states plus ghost slots."""

    def __init__(self, grid, M):
        self.grid = grid
        self.M = M
        tab = table(M)
        self.tab = tab
        faces, cell_lo, cell_hi, ghosts = _topology(grid)
        self.faces = faces
        self.cell_lo = cell_lo
        self.cell_hi = cell_hi
        self.nc = grid.ncells
        self.ng = len(ghosts)
        ntot = self.nc + self.ng
        self.c = np.zeros((ntot, tab.n))
        self.u = np.zeros((ntot, 3))
        self.th = np.ones(ntot)
        self.dinv = 1.0 / grid.dx

    @classmethod
    def uniform(cls, grid, M, rho, u, theta):
        """Field filled with one global Maxwellian."""
        f = cls(grid, M)
        f.c[: f.nc, 0] = rho
        f.u[: f.nc] = _as_u(u)
        f.th[: f.nc] = theta
        return f

    def copy(self):
        f = MomentField(self.grid, self.M)
        f.c[:] = self.c
        f.u[:] = self.u
        f.th[:] = self.th
        return f

    def state(self, idx):
        """MomentState view (copied) of one interior cell; idx may be flat
        or a grid multi-index."""
        i = idx if np.isscalar(idx) else self.grid.flat_index(idx)
        return MomentState(self.u[i].copy(), float(self.th[i]),
                           self.c[i].copy())

    def set_state(self, idx, s):
        i = idx if np.isscalar(idx) else self.grid.flat_index(idx)
        if s.M != self.M:
            raise ValueError("state order does not match field order")
        self.c[i] = s.coeffs
        self.u[i] = s.u
        self.th[i] = s.theta

    def interior(self):
        """(coeffs, u, theta) views of the interior cells."""
        return self.c[: self.nc], self.u[: self.nc], self.th[: self.nc]

    def total_mass(self):
        return float(self.c[: self.nc, 0].sum()) * self.grid.cell_volume

    def conserved_totals(self):
        """Volume-summed (mass, momentum, energy) over the interior."""
        from ._kernels import conserved_moments
        tot = np.zeros(5)
        for i in range(self.nc):
            tot += conserved_moments(self.c[i], self.u[i], self.th[i],
                                     self.tab)
        return tot * self.grid.cell_volume
