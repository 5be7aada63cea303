"""Moment-space HLL fluxes, boundary ghost construction, and assembly of
the steady-state residual R_i(f)."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._tables import table
from .basis import max_hermite_root
from .collision import collision_frequency
from .errors import AdmissibilityError
from .grid import _ghost_meta
from .states import MomentState


def wave_speed(M):
    """c_M: the largest root of He_{M+1}, the half-width of the moment
    system's wave fan in units of sqrt(theta)."""
    return max_hermite_root(M + 1)


def resolve_reg(reg, M):
    """Map the regularization mode to the kernel flag.

    'auto' turns the hyperbolicity correction on for M >= 4 (where the
    plain closure starts to need it) and off below.
    """
    if reg == "auto":
        return M >= 4
    if reg == "off":
        return False
    if reg == "hme":
        if M < 3:
            raise ValueError("hme regularization needs M >= 3 (the "
                             "correction would touch conserved slots)")
        return True
    raise ValueError(f"unknown regularization mode {reg!r}")


def wave_speed_bounds(left, right, d, M=None):
    """(lambda_L, lambda_R) over the two adjacent states in direction d."""
    if M is None:
        M = left.M
    cw = wave_speed(M)
    return _kernels.wave_bounds(left.u[d], left.theta, right.u[d],
                                right.theta, cw)


def hll_flux_moment(left, right, d, M=None):
    """HLL flux of xi_d f across an interface, truncated at order M and
    expanded in the LEFT cell's basis.

    Returns (coeffs, u_basis, theta_basis).
    """
    if M is None:
        M = left.M
    tab = table(M)
    cw = wave_speed(M)
    out = _kernels.hll_face(left.coeffs, left.u, left.theta, right.coeffs,
                            right.u, right.theta, d, cw, tab)
    return out, left.u.copy(), left.theta


def regularization_flux(left, right, d, M=None, mode="hme", side="left"):
    """Hyperbolicity correction to the interface flux; nonzero only on the
    |alpha| = M slots and zero across jump-free interfaces.

    ``side='left'`` gives the term added to the flux seen by the left
    cell (in its basis), ``side='right'`` the right cell's counterpart.
    """
    if M is None:
        M = left.M
    if mode == "off":
        return np.zeros(table(M).n)
    if mode != "hme":
        raise ValueError(f"unknown regularization mode {mode!r}")
    tab = table(M)
    if side == "left":
        return _kernels.reg_face(left.coeffs, left.u, left.theta, right.u,
                                 right.theta, d, -1.0, tab)
    if side == "right":
        return _kernels.reg_face(right.coeffs, left.u, left.theta, right.u,
                                 right.theta, d, 1.0, tab)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def fill_ghosts(field, bc):
    """Refresh the field's ghost slots from the interior and the boundary
    spec (diffuse-wall densities from the half-space mass balance)."""
    meta = _ghost_meta(field.grid, bc)
    bad = _kernels.fill_ghosts(field.c, field.u, field.th, field.nc, *meta,
                               field.tab)
    if bad >= 0:
        raise AdmissibilityError(("ghost", int(bad)),
                                 "nonpositive diffuse-wall ghost density")


def ghost_states(field, bc):
    """Construct (and install) the ghost layer; returns the ghost states
    keyed by (dimension, side) in boundary order."""
    fill_ghosts(field, bc)
    from .grid import _topology
    *_, ghosts = _topology(field.grid)
    out = {}
    for g, (d, side, j, _, _) in enumerate(ghosts):
        slot = field.nc + g
        out.setdefault((d, side), []).append(
            MomentState(field.u[slot].copy(), float(field.th[slot]),
                        field.c[slot].copy()))
    return out


@dataclass
class RhsData:
    """Per-cell right-hand side r_i of a coarse-level problem, stored with
    the basis parameters it was created in (re-expanded on use if the
    cell's parameters have moved since)."""

    c: np.ndarray   # (nc, ncoef)
    u: np.ndarray   # (nc, 3)
    th: np.ndarray  # (nc,)

    def hydro_rhs(self, tab):
        """Conserved-moment components of r_i, evaluated the same way the
        hydrodynamic left-hand side is derived from the moment one."""
        nc = self.c.shape[0]
        out = np.empty((nc, 5))
        for i in range(nc):
            out[i] = _kernels.conserved_moments(self.c[i], self.u[i],
                                                self.th[i], tab)
        return out


def convection(field, bc, rhs=None, reg="auto"):
    """Convection part of the residual, -sum_d (F_hi - F_lo)/dx_d, in each
    cell's own basis; subtracts the stored rhs when given.

    Fills ghosts as a side effect.
    """
    fill_ghosts(field, bc)
    tab = field.tab
    reg_on = resolve_reg(reg, field.M)
    conv = _kernels.convection_all(field.c, field.u, field.th, field.nc,
                                   field.faces, field.cell_lo, field.cell_hi,
                                   field.dinv, field.grid.ndim,
                                   wave_speed(field.M), reg_on, tab)
    if rhs is not None:
        _kernels.subtract_rhs(conv, field.u, field.th, rhs.c, rhs.u, rhs.th,
                              tab)
    return conv


def moment_residual(field, bc, model, rhs=None, reg="auto"):
    """Steady-state residual R_i(f) (minus r_i when rhs is given) for every
    interior cell, in that cell's basis."""
    conv = convection(field, bc, rhs, reg)
    _kernels.collision_add(conv, field.c, field.th, field.nc,
                           model.prefactor, 1.0 - model.omega, field.tab)
    if not np.all(np.isfinite(conv)):
        bad = int(np.argwhere(~np.isfinite(conv))[0][0])
        raise AdmissibilityError(field.grid.multi_index(bad),
                                 "non-finite residual")
    return conv


def residual_norm(field, bc, model, rhs=None, reg="auto"):
    """Volume-weighted L1 norm of the residual (the convergence measure)."""
    r = moment_residual(field, bc, model, rhs, reg)
    return _kernels.l1_norm(r, field.grid.cell_volume)
