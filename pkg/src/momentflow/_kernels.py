"""Numba kernels: the number-crunching core of the solver suite.

Everything here operates on plain float64 arrays plus the index table
bundle from :mod:`momentflow._tables`.  States live in combined arrays of
length ``nc + ng`` (interior cells first, ghost slots after), so interior
and boundary faces are handled by one code path.

Not meant to be called directly by users; the python-facing modules wrap
these with validated APIs.
"""

import math

import numpy as np
from numba import njit

JIT = dict(cache=True, nogil=True)

SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# basis-parameter change and coefficient algebra
# ---------------------------------------------------------------------------

@njit(**JIT)
def project(c, du0, du1, du2, dth, tab):
    """Re-expand coefficients after moving the basis parameters.

    ``du = u_src - u_dst`` componentwise and ``dth = theta_src - theta_dst``.
    In generating-function form the coefficient polynomial is multiplied by
    exp(du . s) * exp(dth |s|^2 / 2) and truncated, which preserves every
    velocity moment up to the truncation order exactly.
    """
    n = c.shape[0]
    alpha = tab.alpha
    lower = tab.lower
    inv_fact = tab.inv_fact
    work = c.copy()
    tmp = np.empty(n)
    for d in range(3):
        if d == 0:
            a = du0
        elif d == 1:
            a = du1
        else:
            a = du2
        if a != 0.0:
            for p in range(n):
                acc = work[p]
                q = p
                apow = 1.0
                for j in range(1, alpha[p, d] + 1):
                    q = lower[d, q]
                    apow *= a
                    acc += work[q] * apow * inv_fact[j]
                tmp[p] = acc
            work[:] = tmp
    if dth != 0.0:
        hb = 0.5 * dth
        for d in range(3):
            for p in range(n):
                acc = work[p]
                q = p
                bpow = 1.0
                for j in range(1, alpha[p, d] // 2 + 1):
                    q = lower[d, lower[d, q]]
                    bpow *= hb
                    acc += work[q] * bpow * inv_fact[j]
                tmp[p] = acc
            work[:] = tmp
    return work


@njit(**JIT)
def xi_product(c, ud, th, d, tab):
    """Coefficients of xi_d * f truncated at order M (in the same basis)."""
    n = c.shape[0]
    out = np.empty(n)
    for p in range(n):
        v = ud * c[p]
        q = tab.lower[d, p]
        if q >= 0:
            v += th * c[q]
        r = tab.raise_[d, p]
        if r >= 0:
            v += (tab.alpha[p, d] + 1.0) * c[r]
        out[p] = v
    return out


@njit(**JIT)
def moments_of(c, u0, u1, u2, th, tab):
    """Density, mean velocity and temperature of an expansion that may be
    non-native (generalized moment relations)."""
    rho = c[0]
    b0 = c[tab.pos_e[0]] / rho
    b1 = c[tab.pos_e[1]] / rho
    b2 = c[tab.pos_e[2]] / rho
    tr = c[tab.pos_2e[0]] + c[tab.pos_2e[1]] + c[tab.pos_2e[2]]
    nth = th + (2.0 / 3.0) * tr / rho - (b0 * b0 + b1 * b1 + b2 * b2) / 3.0
    return rho, u0 + b0, u1 + b1, u2 + b2, nth


@njit(**JIT)
def make_native(c, u0, u1, u2, th, tab):
    """Renormalize onto the own-moment basis; returns (coeffs, u0, u1, u2,
    theta, ok).  Native slots are cleaned exactly."""
    rho = c[0]
    if rho <= 0.0 or not np.isfinite(rho):
        return c, u0, u1, u2, th, False
    rho, nu0, nu1, nu2, nth = moments_of(c, u0, u1, u2, th, tab)
    if nth <= 0.0 or not np.isfinite(nth):
        return c, u0, u1, u2, th, False
    cn = project(c, u0 - nu0, u1 - nu1, u2 - nu2, th - nth, tab)
    cn[tab.pos_e[0]] = 0.0
    cn[tab.pos_e[1]] = 0.0
    cn[tab.pos_e[2]] = 0.0
    t = (cn[tab.pos_2e[0]] + cn[tab.pos_2e[1]] + cn[tab.pos_2e[2]]) / 3.0
    cn[tab.pos_2e[0]] -= t
    cn[tab.pos_2e[1]] -= t
    cn[tab.pos_2e[2]] -= t
    return cn, nu0, nu1, nu2, nth, True


# ---------------------------------------------------------------------------
# numerical fluxes
# ---------------------------------------------------------------------------

@njit(**JIT)
def wave_bounds(uLd, thL, uRd, thR, cw):
    sL = cw * math.sqrt(thL)
    sR = cw * math.sqrt(thR)
    lam_l = min(uLd - sL, uRd - sR)
    lam_r = max(uLd + sL, uRd + sR)
    return lam_l, lam_r


@njit(**JIT)
def hll_face(cL, uL, thL, cR, uR, thR, d, cw, tab):
    """HLL moment flux across one interface, in the left cell's basis."""
    lam_l, lam_r = wave_bounds(uL[d], thL, uR[d], thR, cw)
    if lam_l >= 0.0:
        return xi_product(cL, uL[d], thL, d, tab)
    fxR = xi_product(cR, uR[d], thR, d, tab)
    du0 = uR[0] - uL[0]
    du1 = uR[1] - uL[1]
    du2 = uR[2] - uL[2]
    dth = thR - thL
    fxRp = project(fxR, du0, du1, du2, dth, tab)
    if lam_r <= 0.0:
        return fxRp
    fxL = xi_product(cL, uL[d], thL, d, tab)
    cRp = project(cR, du0, du1, du2, dth, tab)
    out = np.empty(cL.shape[0])
    den = lam_r - lam_l
    for p in range(cL.shape[0]):
        out[p] = (lam_r * fxL[p] - lam_l * fxRp[p]
                  + lam_r * lam_l * (cRp[p] - cL[p])) / den
    return out


@njit(**JIT)
def reg_face(c_own, uL, thL, uR, thR, d, sign, tab):
    """One-sided hyperbolicity correction at a face (top order only).

    ``sign=-1`` gives the term paired with the flux seen by the cell left
    of the face, ``sign=+1`` the one for the right cell; ``c_own`` are that
    cell's coefficients in its own basis.  Vanishes when the interface
    carries no jump in (u, theta).
    """
    out = np.zeros(c_own.shape[0])
    for k in range(tab.top_pos.shape[0]):
        p = tab.top_pos[k]
        s = 0.0
        for dp in range(3):
            q1 = tab.reg1[d, k, dp]
            if q1 >= 0:
                s += (uR[dp] - uL[dp]) * c_own[q1]
            q2 = tab.reg2[d, k, dp]
            if q2 >= 0:
                s += 0.5 * (thR - thL) * c_own[q2]
        out[p] = sign * 0.5 * (tab.alpha[p, d] + 1.0) * s
    return out


# ---------------------------------------------------------------------------
# boundary ghosts
# ---------------------------------------------------------------------------

@njit(**JIT)
def wall_ghost_density(c, u, th, d, side, wd, wth, tab):
    """Diffuse-wall ghost density from the zero-net-mass-flux balance.

    Integrates the outgoing half of the interior cell's reconstructed
    marginal in direction ``d`` exactly (erf-based closed forms) and
    returns the Maxwellian ghost density that cancels it.  ``side`` is 0
    for the low boundary, 1 for the high one; ``wd`` the wall velocity
    component along d, ``wth`` the wall temperature.
    """
    M = tab.M
    sth = math.sqrt(th)
    b = (wd - u[d]) / sth
    eb = math.exp(-0.5 * b * b)
    lo = SQRT_2PI * 0.5 * (1.0 + math.erf(b / math.sqrt(2.0)))
    hi = SQRT_2PI - lo

    # He_k(b) for k = 0..M+1
    he = np.empty(M + 2)
    he[0] = 1.0
    if M + 1 >= 1:
        he[1] = b
    for k in range(1, M + 1):
        he[k + 1] = b * he[k] - k * he[k - 1]

    flux = 0.0
    thpow = 1.0  # th**(-n/2)
    for nn in range(M + 1):
        g = c[tab.axis_pos[d, nn]]
        if g != 0.0:
            if side == 0:
                # integral over v < b of He_k e^{-v^2/2}
                i_n = lo if nn == 0 else -he[nn - 1] * eb
                i_np = -he[nn] * eb
                if nn == 0:
                    i_nm = 0.0
                elif nn == 1:
                    i_nm = lo
                else:
                    i_nm = -he[nn - 2] * eb
            else:
                i_n = hi if nn == 0 else he[nn - 1] * eb
                i_np = he[nn] * eb
                if nn == 0:
                    i_nm = 0.0
                elif nn == 1:
                    i_nm = hi
                else:
                    i_nm = he[nn - 2] * eb
            flux += g * thpow * ((u[d] - wd) * i_n + sth * (i_np + nn * i_nm))
        thpow /= sth
    flux /= SQRT_2PI
    scale = SQRT_2PI / math.sqrt(wth)
    if side == 0:
        return -flux * scale
    return flux * scale


@njit(**JIT)
def fill_ghosts(c, u, th, nc, g_kind, g_src, g_dir, g_side, g_rho, g_u, g_th,
                tab):
    """Refresh every ghost slot from the current interior field.

    Returns the ghost number whose wall density came out nonpositive, or
    -1 on success.
    """
    ng = g_kind.shape[0]
    for g in range(ng):
        slot = nc + g
        k = g_kind[g]
        if k == 0:  # periodic wrap
            src = g_src[g]
            c[slot, :] = c[src, :]
            u[slot, :] = u[src, :]
            th[slot] = th[src]
        else:
            if k == 1:  # prescribed Maxwellian
                rho_g = g_rho[g]
            else:  # diffuse Maxwell wall
                src = g_src[g]
                d = g_dir[g]
                rho_g = wall_ghost_density(c[src], u[src], th[src], d,
                                           g_side[g], g_u[g, d], g_th[g], tab)
                if rho_g <= 0.0 or not np.isfinite(rho_g):
                    return g
            c[slot, :] = 0.0
            c[slot, 0] = rho_g
            u[slot, :] = g_u[g, :]
            th[slot] = g_th[g]
    return -1


# ---------------------------------------------------------------------------
# residual assembly (Jacobi data) and explicit / semi-implicit batch steps
# ---------------------------------------------------------------------------

@njit(**JIT)
def convection_all(c, u, th, nc, faces, cell_lo, cell_hi, dinv, ndim, cw,
                   reg_on, tab):
    """Convection part of the residual for every interior cell:
    CONV_i = -sum_d (F_hi - F_lo)/dx_d, each face flux expressed in cell
    i's own basis."""
    nf = faces.shape[0]
    n = c.shape[1]
    fl = np.empty((nf, n))  # flux seen by the left cell of each face
    fr = np.empty((nf, n))  # same flux re-expanded for the right cell
    for f in range(nf):
        iL = faces[f, 0]
        iR = faces[f, 1]
        d = faces[f, 2]
        flux = hll_face(c[iL], u[iL], th[iL], c[iR], u[iR], th[iR], d, cw, tab)
        fluxR = project(flux, u[iL, 0] - u[iR, 0], u[iL, 1] - u[iR, 1],
                        u[iL, 2] - u[iR, 2], th[iL] - th[iR], tab)
        if reg_on:
            rm = reg_face(c[iL], u[iL], th[iL], u[iR], th[iR], d, -1.0, tab)
            rp = reg_face(c[iR], u[iL], th[iL], u[iR], th[iR], d, 1.0, tab)
            for p in range(n):
                flux[p] += rm[p]
                fluxR[p] += rp[p]
        fl[f] = flux
        fr[f] = fluxR
    conv = np.zeros((nc, n))
    for i in range(nc):
        for d in range(ndim):
            fh = cell_hi[i, d]
            flo = cell_lo[i, d]
            w = dinv[d]
            for p in range(n):
                conv[i, p] -= w * (fl[fh, p] - fr[flo, p])
    return conv


@njit(**JIT)
def subtract_rhs(conv, u, th, rhs_c, rhs_u, rhs_th, tab):
    """conv_i -= r_i with each stored r_i re-expanded to cell i's basis."""
    nc = conv.shape[0]
    for i in range(nc):
        r = project(rhs_c[i], rhs_u[i, 0] - u[i, 0], rhs_u[i, 1] - u[i, 1],
                    rhs_u[i, 2] - u[i, 2], rhs_th[i] - th[i], tab)
        for p in range(conv.shape[1]):
            conv[i, p] -= r[p]


@njit(**JIT)
def collision_add(conv, c, th, nc, nu_pref, nu_exp, tab):
    """Add the BGK relaxation rate -nu f_alpha (|alpha| >= 2) to conv."""
    for i in range(nc):
        nu = nu_pref * c[i, 0] * th[i] ** nu_exp
        for p in range(conv.shape[1]):
            if tab.order[p] >= 2:
                conv[i, p] -= nu * c[i, p]


@njit(**JIT)
def local_dt(u, th, i, ndim, dinv, cw, cfl):
    s = cw * math.sqrt(th[i])
    den = 0.0
    for d in range(ndim):
        den += (abs(u[i, d]) + s) * dinv[d]
    return cfl / den


@njit(**JIT)
def euler_update_all(c, u, th, nc, resid, dt, tab):
    """f_i <- renormalize(f_i + dt R_i) for all cells.  Returns the index
    of the first cell losing admissibility, or -1."""
    n = c.shape[1]
    for i in range(nc):
        w = np.empty(n)
        for p in range(n):
            w[p] = c[i, p] + dt * resid[i, p]
        cn, nu0, nu1, nu2, nth, ok = make_native(w, u[i, 0], u[i, 1], u[i, 2],
                                                 th[i], tab)
        if not ok:
            return i
        c[i, :] = cn
        u[i, 0] = nu0
        u[i, 1] = nu1
        u[i, 2] = nu2
        th[i] = nth
    return -1


@njit(**JIT)
def sis_update_all(c, u, th, nc, conv, dt, nu_pref, nu_exp, tab):
    """Semi-implicit relaxation update of every cell from the explicit
    convection data ``conv`` (which already carries any coarse-grid rhs).
    Returns first inadmissible cell or -1."""
    n = c.shape[1]
    for i in range(nc):
        g = np.empty(n)
        for p in range(n):
            g[p] = c[i, p] + dt * conv[i, p]
        gn, nu0, nu1, nu2, nth, ok = make_native(g, u[i, 0], u[i, 1], u[i, 2],
                                                 th[i], tab)
        if not ok:
            return i
        nu = nu_pref * gn[0] * nth ** nu_exp
        fac = 1.0 / (1.0 + dt * nu)
        for p in range(n):
            if tab.order[p] >= 2:
                gn[p] *= fac
        c[i, :] = gn
        u[i, 0] = nu0
        u[i, 1] = nu1
        u[i, 2] = nu2
        th[i] = nth
    return -1


@njit(**JIT)
def sweep_semi_implicit(c, u, th, cw_, uw, thw, nc, order_idx, faces,
                        cell_lo, cell_hi, dinv, ndim, cfl, cw, nu_pref,
                        nu_exp, reg_on, use_local_dt, dt_global, has_rhs,
                        rhs_c, rhs_u, rhs_th, tab):
    """One pass of the semi-implicit scheme over cells in the given order.

    Neighbor data is read from (c, u, th) and updates go to (cw_, uw, thw);
    pass the same arrays twice for a Gauss-Seidel sweep with the latest
    values, distinct arrays for a frozen-neighbor Jacobi pass.  Per-cell
    time steps when ``use_local_dt``, otherwise ``dt_global``.  Ghost slots
    are read but never written.  Returns first inadmissible cell or -1.
    """
    n = c.shape[1]
    for k in range(nc):
        i = order_idx[k]
        if use_local_dt:
            dti = local_dt(u, th, i, ndim, dinv, cw, cfl)
        else:
            dti = dt_global
        g = c[i].copy()
        for d in range(ndim):
            fh = cell_hi[i, d]
            iR = faces[fh, 1]
            fluxh = hll_face(c[i], u[i], th[i], c[iR], u[iR], th[iR], d, cw,
                             tab)
            if reg_on:
                rm = reg_face(c[i], u[i], th[i], u[iR], th[iR], d, -1.0, tab)
                for p in range(n):
                    fluxh[p] += rm[p]
            flo = cell_lo[i, d]
            iL = faces[flo, 0]
            fluxl = hll_face(c[iL], u[iL], th[iL], c[i], u[i], th[i], d, cw,
                             tab)
            fluxl = project(fluxl, u[iL, 0] - u[i, 0], u[iL, 1] - u[i, 1],
                            u[iL, 2] - u[i, 2], th[iL] - th[i], tab)
            if reg_on:
                rp = reg_face(c[i], u[iL], th[iL], u[i], th[i], d, 1.0, tab)
                for p in range(n):
                    fluxl[p] += rp[p]
            w = dti * dinv[d]
            for p in range(n):
                g[p] -= w * (fluxh[p] - fluxl[p])
        if has_rhs:
            r = project(rhs_c[i], rhs_u[i, 0] - u[i, 0],
                        rhs_u[i, 1] - u[i, 1], rhs_u[i, 2] - u[i, 2],
                        rhs_th[i] - th[i], tab)
            for p in range(n):
                g[p] -= dti * r[p]
        gn, nu0, nu1, nu2, nth, ok = make_native(g, u[i, 0], u[i, 1], u[i, 2],
                                                 th[i], tab)
        if not ok:
            return i
        nu = nu_pref * gn[0] * nth ** nu_exp
        fac = 1.0 / (1.0 + dti * nu)
        for p in range(n):
            if tab.order[p] >= 2:
                gn[p] *= fac
        cw_[i, :] = gn
        uw[i, 0] = nu0
        uw[i, 1] = nu1
        uw[i, 2] = nu2
        thw[i] = nth
    return -1


# ---------------------------------------------------------------------------
# hydrodynamic subsystem (conserved vector U with frozen sigma / q)
# ---------------------------------------------------------------------------

@njit(**JIT)
def hydro_prim(U):
    rho = U[0]
    u0 = U[1] / rho
    u1 = U[2] / rho
    u2 = U[3] / rho
    e = U[4] / rho
    th = (2.0 * e - (u0 * u0 + u1 * u1 + u2 * u2)) / 3.0
    return rho, u0, u1, u2, th


@njit(**JIT)
def hydro_phys_flux(U, sig, q, d):
    """Physical flux F_d(U) with this cell's frozen closure fields."""
    rho, u0, u1, u2, th = hydro_prim(U)
    p = rho * th
    ud = U[1 + d] / rho
    out = np.empty(5)
    out[0] = U[1 + d]
    out[1] = U[1] * ud + sig[0, d]
    out[2] = U[2] * ud + sig[1, d]
    out[3] = U[3] * ud + sig[2, d]
    out[1 + d] += p
    usig = u0 * sig[0, d] + u1 * sig[1, d] + u2 * sig[2, d]
    out[4] = (U[4] + p) * ud + usig + q[d]
    return out


@njit(**JIT)
def hydro_hll_face(UL, sigL, qL, UR, sigR, qR, d, cw):
    """HLL flux for the hydrodynamic subsystem; the wave-speed bounds use
    the same expressions as the moment flux (same c_M)."""
    rhoL, uL0, uL1, uL2, thL = hydro_prim(UL)
    rhoR, uR0, uR1, uR2, thR = hydro_prim(UR)
    if d == 0:
        uLd, uRd = uL0, uR0
    elif d == 1:
        uLd, uRd = uL1, uR1
    else:
        uLd, uRd = uL2, uR2
    lam_l, lam_r = wave_bounds(uLd, thL, uRd, thR, cw)
    if lam_l >= 0.0:
        return hydro_phys_flux(UL, sigL, qL, d)
    if lam_r <= 0.0:
        return hydro_phys_flux(UR, sigR, qR, d)
    fL = hydro_phys_flux(UL, sigL, qL, d)
    fR = hydro_phys_flux(UR, sigR, qR, d)
    out = np.empty(5)
    den = lam_r - lam_l
    for p in range(5):
        out[p] = (lam_r * fL[p] - lam_l * fR[p]
                  + lam_r * lam_l * (UR[p] - UL[p])) / den
    return out


@njit(**JIT)
def hydro_residual_all(U, sig, q, nc, faces, cell_lo, cell_hi, dinv, ndim,
                       cw, has_rhs, rhs):
    nf = faces.shape[0]
    fx = np.empty((nf, 5))
    for f in range(nf):
        iL = faces[f, 0]
        iR = faces[f, 1]
        d = faces[f, 2]
        fx[f] = hydro_hll_face(U[iL], sig[iL], q[iL], U[iR], sig[iR], q[iR],
                               d, cw)
    out = np.zeros((nc, 5))
    for i in range(nc):
        for d in range(ndim):
            w = dinv[d]
            for p in range(5):
                out[i, p] -= w * (fx[cell_hi[i, d], p] - fx[cell_lo[i, d], p])
        if has_rhs:
            for p in range(5):
                out[i, p] -= rhs[i, p]
    return out


@njit(**JIT)
def hydro_min_dt(U, nc, ndim, dinv, cw, cfl):
    dt = 1.0e300
    for i in range(nc):
        rho, u0, u1, u2, th = hydro_prim(U[i])
        if th <= 0.0 or rho <= 0.0:
            return -1.0
        s = cw * math.sqrt(th)
        den = 0.0
        for d in range(ndim):
            if d == 0:
                ud = u0
            elif d == 1:
                ud = u1
            else:
                ud = u2
            den += (abs(ud) + s) * dinv[d]
        dti = cfl / den
        if dti < dt:
            dt = dti
    return dt


@njit(**JIT)
def hydro_sweep(U, sig, q, nc, order_idx, faces, cell_lo, cell_hi, dinv,
                ndim, cfl, cw, has_rhs, rhs):
    """One Gauss-Seidel pass of the forward-Euler hydro step with per-cell
    time steps and latest neighbor data.  Returns first bad cell or -1."""
    for k in range(nc):
        i = order_idx[k]
        rho, u0, u1, u2, th = hydro_prim(U[i])
        if th <= 0.0 or rho <= 0.0:
            return i
        s = cw * math.sqrt(th)
        den = 0.0
        for d in range(ndim):
            if d == 0:
                ud = u0
            elif d == 1:
                ud = u1
            else:
                ud = u2
            den += (abs(ud) + s) * dinv[d]
        dti = cfl / den
        acc = np.zeros(5)
        for d in range(ndim):
            fh = cell_hi[i, d]
            iR = faces[fh, 1]
            fxh = hydro_hll_face(U[i], sig[i], q[i], U[iR], sig[iR], q[iR],
                                 d, cw)
            flo = cell_lo[i, d]
            iL = faces[flo, 0]
            fxl = hydro_hll_face(U[iL], sig[iL], q[iL], U[i], sig[i], q[i],
                                 d, cw)
            for p in range(5):
                acc[p] -= dinv[d] * (fxh[p] - fxl[p])
        if has_rhs:
            for p in range(5):
                acc[p] -= rhs[i, p]
        for p in range(5):
            U[i, p] += dti * acc[p]
        rho, u0, u1, u2, th = hydro_prim(U[i])
        if rho <= 0.0 or th <= 0.0 or not np.isfinite(th):
            return i
    return -1


# ---------------------------------------------------------------------------
# norms and diagnostics
# ---------------------------------------------------------------------------

@njit(**JIT)
def l1_norm(arr, vol):
    s = 0.0
    for i in range(arr.shape[0]):
        for p in range(arr.shape[1]):
            s += abs(arr[i, p])
    return s * vol


@njit(**JIT)
def conserved_moments(c, u, th, tab):
    """(mass, momentum, energy) carried by one coefficient array at basis
    (u, theta); valid for any expansion, native or not."""
    rho = c[0]
    m0 = rho * u[0] + c[tab.pos_e[0]]
    m1 = rho * u[1] + c[tab.pos_e[1]]
    m2 = rho * u[2] + c[tab.pos_e[2]]
    tr = c[tab.pos_2e[0]] + c[tab.pos_2e[1]] + c[tab.pos_2e[2]]
    uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
    udotfe = (u[0] * c[tab.pos_e[0]] + u[1] * c[tab.pos_e[1]]
              + u[2] * c[tab.pos_e[2]])
    energy = 0.5 * (rho * uu + 2.0 * udotfe + 3.0 * th * rho + 2.0 * tr)
    out = np.empty(5)
    out[0] = rho
    out[1] = m0
    out[2] = m1
    out[3] = m2
    out[4] = energy
    return out
