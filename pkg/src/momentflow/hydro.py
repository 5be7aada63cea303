"""Embedded hydrodynamic subsystem: conserved vector U = (rho, rho u,
rho E) with frozen kinetic closures (sigma, q), an HLL flux sharing the
moment system's wave-speed bounds, Dirichlet ghost data evaluated from the
ghost distribution functions, and forward-Euler / symmetric Gauss-Seidel
inner iterations.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import AdmissibilityError
from .fluxes import fill_ghosts, wave_speed
from .states import _native_stress_heat


@dataclass
class HydroState:
    """One cell's conserved vector plus its frozen closure fields."""

    U: np.ndarray
    sigma: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float).reshape(5)
        self.sigma = np.asarray(self.sigma, dtype=float).reshape(3, 3)
        self.q = np.asarray(self.q, dtype=float).reshape(3)

    @property
    def rho(self):
        return self.U[0]

    @property
    def u(self):
        return self.U[1:4] / self.U[0]

    @property
    def theta(self):
        u = self.u
        return (2.0 * self.U[4] / self.U[0] - float(u @ u)) / 3.0

    @property
    def p(self):
        return self.rho * self.theta


class HydroField:
    """Grid-indexed conserved vectors with frozen closures and fixed ghost
    slots (one inner solve's worth of Dirichlet data)."""

    def __init__(self, grid, cw):
        from .grid import _topology
        faces, cell_lo, cell_hi, ghosts = _topology(grid)
        self.grid = grid
        self.cw = cw  # c_M of the OUTER moment system
        self.faces = faces
        self.cell_lo = cell_lo
        self.cell_hi = cell_hi
        self.nc = grid.ncells
        self.ng = len(ghosts)
        ntot = self.nc + self.ng
        self.U = np.zeros((ntot, 5))
        self.sig = np.zeros((ntot, 3, 3))
        self.q = np.zeros((ntot, 3))
        self.dinv = 1.0 / grid.dx

    def copy(self):
        h = HydroField.__new__(HydroField)
        h.grid = self.grid
        h.cw = self.cw
        h.faces = self.faces
        h.cell_lo = self.cell_lo
        h.cell_hi = self.cell_hi
        h.nc = self.nc
        h.ng = self.ng
        h.U = self.U.copy()
        h.sig = self.sig  # frozen closures are shared, never written
        h.q = self.q
        h.dinv = self.dinv
        return h

    def state(self, i):
        return HydroState(self.U[i].copy(), self.sig[i].copy(),
                          self.q[i].copy())

    def primitive(self):
        """(rho, u, theta) arrays of the interior cells."""
        U = self.U[: self.nc]
        rho = U[:, 0]
        u = U[:, 1:4] / rho[:, None]
        th = (2.0 * U[:, 4] / rho - (u ** 2).sum(axis=1)) / 3.0
        return rho, u, th


def _conserved_of_slot(field, i):
    return _kernels.conserved_moments(field.c[i], field.u[i], field.th[i],
                                      field.tab)


def extract_hydro(field, bc):
    """Freeze the hydrodynamic data of a moment field: interior U from the
    primary moments, sigma/q from the coefficients, and ghost quantities
    evaluated from the ghost distribution functions (then held fixed)."""
    fill_ghosts(field, bc)
    h = HydroField(field.grid, wave_speed(field.M))
    ntot = field.nc + field.ng
    for i in range(ntot):
        h.U[i] = _conserved_of_slot(field, i)
        sigma, q = _native_stress_heat(field.c[i], field.M)
        h.sig[i] = sigma
        h.q[i] = q
    return h


def hydro_flux(left, right, d, lam_l, lam_r):
    """HLL flux between two hydro states with externally supplied wave
    bounds (they must come from the moment system's expressions)."""
    if lam_l >= 0.0:
        return _kernels.hydro_phys_flux(left.U, left.sigma, left.q, d)
    if lam_r <= 0.0:
        return _kernels.hydro_phys_flux(right.U, right.sigma, right.q, d)
    fL = _kernels.hydro_phys_flux(left.U, left.sigma, left.q, d)
    fR = _kernels.hydro_phys_flux(right.U, right.sigma, right.q, d)
    return (lam_r * fL - lam_l * fR + lam_r * lam_l * (right.U - left.U)) \
        / (lam_r - lam_l)


_NO_RHS = np.zeros((0, 5))


def hydro_residual(h, rhs=None):
    """R^hydro_i = -sum_d (F_hi - F_lo)/dx_d (minus rhs when present)."""
    has = rhs is not None
    out = _kernels.hydro_residual_all(h.U, h.sig, h.q, h.nc, h.faces,
                                      h.cell_lo, h.cell_hi, h.dinv,
                                      h.grid.ndim, h.cw, has,
                                      rhs if has else _NO_RHS)
    if not np.all(np.isfinite(out)):
        bad = int(np.argwhere(~np.isfinite(out))[0][0])
        raise AdmissibilityError(h.grid.multi_index(bad),
                                 "non-finite hydro residual")
    return out


def hydro_euler_step(h, cfl=0.8, rhs=None):
    """Forward Euler with the global CFL step, recomputed from the current
    primitive state each call."""
    dt = _kernels.hydro_min_dt(h.U, h.nc, h.grid.ndim, h.dinv, h.cw, cfl)
    if dt <= 0.0:
        raise AdmissibilityError(None, "nonpositive hydro state")
    r = hydro_residual(h, rhs)
    out = h.copy()
    out.U[: h.nc] += dt * r
    _check_hydro(out)
    return out


def hydro_sgs_sweep(h, cfl=0.8, rhs=None):
    """Symmetric Gauss-Seidel pass pair (forward, then backward) with
    per-cell steps and latest neighbor values."""
    out = h.copy()
    has = rhs is not None
    r = rhs if has else _NO_RHS
    fwd = np.arange(h.nc, dtype=np.int64)
    for order_idx in (fwd, fwd[::-1].copy()):
        bad = _kernels.hydro_sweep(out.U, out.sig, out.q, out.nc, order_idx,
                                   out.faces, out.cell_lo, out.cell_hi,
                                   out.dinv, out.grid.ndim, cfl, out.cw,
                                   has, r)
        if bad >= 0:
            raise AdmissibilityError(h.grid.multi_index(bad),
                                     "hydro sweep admissibility loss")
    return out


def _check_hydro(h):
    rho, _, th = h.primitive()
    bad = np.argwhere((rho <= 0) | (th <= 0) | ~np.isfinite(th))
    if bad.size:
        raise AdmissibilityError(h.grid.multi_index(int(bad[0][0])),
                                 "nonpositive hydro density or temperature")


def hydro_inner_solve(h, gamma2, tol, scheme="euler", cfl=0.8, rhs=None):
    """Iterate the chosen hydro scheme until gamma2 steps or the L1 norm of
    successive differences drops below tol.  Returns (field, step count)."""
    if gamma2 < 0:
        raise ValueError("gamma2 must be nonnegative")
    step = hydro_euler_step if scheme == "euler" else hydro_sgs_sweep
    vol = h.grid.cell_volume
    m = 0
    while m < gamma2:
        nxt = step(h, cfl=cfl, rhs=rhs)
        diff = _kernels.l1_norm(nxt.U[: h.nc] - h.U[: h.nc], vol)
        h = nxt
        m += 1
        if diff < tol:
            break
    return h, m
