"""FAS nonlinear multigrid over spatial grid levels, with any single-level
solver (basic smoother or FIM variant) as the smoother and RHS-bearing
problems on the coarse levels."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import AdmissibilityError
from .fluxes import RhsData, moment_residual
from .grid import Grid, MomentField
from .states import MomentState


@dataclass
class CycleConfig:
    """V-cycle parameters: pre-, post- and coarsest-smoothing counts plus
    the smoother variant run on every level."""

    s1: int = 2
    s2: int = 2
    s3: int = 4
    smoother: str = "fim-3"
    levels: int | None = None
    coarsest: int = 8


@lru_cache(maxsize=None)
def _children_map(fine_grid):
    """Coarse grid plus the (ncc, 2^D) table of fine children per coarse
    cell (factor-2 coarsening per dimension)."""
    coarse = fine_grid.coarsen()
    ndim = fine_grid.ndim
    ncc = coarse.ncells
    kids = np.empty((ncc, 2 ** ndim), dtype=np.int64)
    for k in range(ncc):
        cidx = coarse.multi_index(k)
        if ndim == 1:
            base = 2 * cidx[0]
            kids[k, 0] = base
            kids[k, 1] = base + 1
        else:
            i, j = 2 * cidx[0], 2 * cidx[1]
            kids[k] = [fine_grid.flat_index((i, j)),
                       fine_grid.flat_index((i, j + 1)),
                       fine_grid.flat_index((i + 1, j)),
                       fine_grid.flat_index((i + 1, j + 1))]
    return coarse, kids


def build_hierarchy(grid, levels=None, coarsest=8):
    """Grids from finest to coarsest (factor 2 per dimension per level)."""
    grids = [grid]
    while True:
        if levels is not None and len(grids) >= levels:
            break
        cur = grids[-1]
        if levels is None and min(cur.shape) <= coarsest:
            break
        if any(n % 2 for n in cur.shape):
            if levels is not None:
                raise ValueError(f"cannot coarsen grid {cur.shape} further")
            break
        grids.append(cur.coarsen())
    return grids


def restrict_field(fine):
    """Conservative aggregation of each coarse cell's children: project to
    the mass-weighted mean parameters, volume-average the coefficients,
    then renormalize to native form."""
    coarse_grid, kids = _children_map(fine.grid)
    out = MomentField(coarse_grid, fine.M)
    tab = fine.tab
    nkid = kids.shape[1]
    for k in range(coarse_grid.ncells):
        rhos = fine.c[kids[k], 0]
        wsum = rhos.sum()
        ubar = (rhos[:, None] * fine.u[kids[k]]).sum(axis=0) / wsum
        tbar = float((rhos * fine.th[kids[k]]).sum() / wsum)
        acc = np.zeros(tab.n)
        for j in range(nkid):
            i = kids[k, j]
            acc += _kernels.project(fine.c[i], fine.u[i, 0] - ubar[0],
                                    fine.u[i, 1] - ubar[1],
                                    fine.u[i, 2] - ubar[2],
                                    fine.th[i] - tbar, tab)
        acc /= nkid
        cn, u0, u1, u2, th, ok = _kernels.make_native(acc, ubar[0], ubar[1],
                                                      ubar[2], tbar, tab)
        if not ok:
            raise AdmissibilityError(coarse_grid.multi_index(k),
                                     "restriction produced an inadmissible "
                                     "state")
        out.c[k] = cn
        out.u[k] = (u0, u1, u2)
        out.th[k] = th
    return out


def restrict_residual(fine_arrays, fine_field, coarse_field):
    """Volume-weighted average of the children's residual arrays, each
    re-expanded to the coarse cell's parameters first."""
    coarse_grid, kids = _children_map(fine_field.grid)
    tab = fine_field.tab
    nkid = kids.shape[1]
    out = np.zeros((coarse_grid.ncells, tab.n))
    for k in range(coarse_grid.ncells):
        for j in range(nkid):
            i = kids[k, j]
            out[k] += _kernels.project(
                fine_arrays[i], fine_field.u[i, 0] - coarse_field.u[k, 0],
                fine_field.u[i, 1] - coarse_field.u[k, 1],
                fine_field.u[i, 2] - coarse_field.u[k, 2],
                fine_field.th[i] - coarse_field.th[k], tab)
        out[k] /= nkid
    return out


def prolong_correction(coarse_new, coarse_old, fine, level=None):
    """Piecewise-constant injection of the coarse increment: each child
    receives (new - old), both re-expanded to its own parameters, added to
    its coefficients, then renormalized."""
    _, kids = _children_map(fine.grid)
    tab = fine.tab
    out = fine.copy()
    for k in range(coarse_new.nc):
        for i in kids[k]:
            dnew = _kernels.project(
                coarse_new.c[k], coarse_new.u[k, 0] - fine.u[i, 0],
                coarse_new.u[k, 1] - fine.u[i, 1],
                coarse_new.u[k, 2] - fine.u[i, 2],
                coarse_new.th[k] - fine.th[i], tab)
            dold = _kernels.project(
                coarse_old.c[k], coarse_old.u[k, 0] - fine.u[i, 0],
                coarse_old.u[k, 1] - fine.u[i, 1],
                coarse_old.u[k, 2] - fine.u[i, 2],
                coarse_old.th[k] - fine.th[i], tab)
            w = out.c[i] + dnew - dold
            cn, u0, u1, u2, th, ok = _kernels.make_native(
                w, out.u[i, 0], out.u[i, 1], out.u[i, 2], out.th[i], tab)
            if not ok:
                raise AdmissibilityError(fine.grid.multi_index(int(i)),
                                         "prolongation produced an "
                                         "inadmissible state", level=level)
            out.c[i] = cn
            out.u[i] = (u0, u1, u2)
            out.th[i] = th
    return out


@dataclass
class NmgState:
    problem: object
    solver: object
    cfg: CycleConfig
    grids: list


def nmg_prepare(problem, solver, field):
    cfg = solver.nmg if solver.nmg is not None else CycleConfig()
    grids = build_hierarchy(field.grid, cfg.levels, cfg.coarsest)
    return NmgState(problem, solver, cfg, grids)


def _smooth(state, field, rhs, steps):
    from .driver import _moment_step, fim_iteration, BASIC_SMOOTHERS
    kind = state.cfg.smoother
    solver = state.solver
    for _ in range(steps):
        if kind in BASIC_SMOOTHERS:
            field = _moment_step(kind, field, state.problem.bc,
                                 state.problem.model, rhs, solver.cfl,
                                 solver.regularization)
        else:
            fim_cfg = solver.fim_config(state.problem, variant=kind)
            field = fim_iteration(field, state.problem.bc,
                                  state.problem.model, fim_cfg, rhs)
    return field


def vcycle(state, level, field, rhs=None):
    """Standard FAS V-cycle from the given level downwards."""
    cfg = state.cfg
    bc, model = state.problem.bc, state.problem.model
    reg = state.solver.regularization
    if level == len(state.grids) - 1:
        return _smooth(state, field, rhs, cfg.s3)
    field = _smooth(state, field, rhs, cfg.s1)
    defect = -moment_residual(field, bc, model, rhs, reg)
    coarse = restrict_field(field)
    rhs_arrays = restrict_residual(defect, field, coarse)
    rhs_arrays += moment_residual(coarse, bc, model, None, reg)
    rhs_c = RhsData(rhs_arrays, coarse.u[: coarse.nc].copy(),
                    coarse.th[: coarse.nc].copy())
    old = coarse.copy()
    coarse = vcycle(state, level + 1, coarse, rhs_c)
    field = prolong_correction(coarse, old, field, level=level)
    return _smooth(state, field, rhs, cfg.s2)


def nmg_cycle(state, field):
    """One V-cycle on the finest level (rhs-free problem)."""
    return vcycle(state, 0, field, None)
