"""Alternating moment/hydro iteration (the FIM solver family), mass
correction, and the steady-state driver shared by all solver kinds."""

import time
from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import AdmissibilityError
from .fluxes import fill_ghosts, moment_residual, residual_norm
from .hydro import extract_hydro, hydro_inner_solve
from .smoothers import euler_step, sis_step, sisgs_sweep
from ._kernels import l1_norm
from ._tables import table
from .basis import _as_u
from . import _kernels

BASIC_SMOOTHERS = ("euler", "sis", "sisgs")
FIM_VARIANTS = ("fim-1", "fim-2", "fim-3")

# variant -> (moment scheme, hydro scheme) from the solver family table
_VARIANT_SCHEMES = {
    "fim-1": ("euler", "euler"),
    "fim-2": ("sis", "euler"),
    "fim-3": ("sisgs", "sgs"),
}


@dataclass
class FimConfig:
    """Alternating-iteration knobs: gamma1 moment steps per outer
    iteration, at most gamma2 hydro inner steps, inner tolerance, and the
    (moment, hydro) scheme pair selected by the variant."""

    variant: str = "fim-3"
    gamma1: int = 1
    gamma2: int = 40
    inner_tol: float = 1e-8
    cfl: float = 0.8
    reg: str = "auto"
    writeback: str = "retain"

    def __post_init__(self):
        if self.variant not in FIM_VARIANTS:
            raise ValueError(f"unknown FIM variant {self.variant!r}")
        if self.gamma1 < 1:
            raise ValueError("gamma1 must be >= 1")
        if self.gamma2 < 0:
            raise ValueError("gamma2 must be >= 0")
        if self.writeback not in ("retain", "reproject"):
            raise ValueError(f"unknown writeback mode {self.writeback!r}")

    @property
    def schemes(self):
        return _VARIANT_SCHEMES[self.variant]


def _moment_step(scheme, field, bc, model, rhs, cfl, reg, resid=None):
    if scheme == "euler":
        return euler_step(field, bc, model, rhs, cfl, reg, resid=resid)
    if scheme == "sis":
        return sis_step(field, bc, model, rhs, cfl, reg, resid=resid)
    if scheme == "sisgs":
        return sisgs_sweep(field, bc, model, rhs, cfl, reg)
    raise ValueError(f"unknown moment scheme {scheme!r}")


def _write_back(field, h, mode):
    """Replace each cell's (rho, u, theta) by the hydro result.

    'retain' keeps the |alpha| >= 2 coefficients numerically unchanged in
    the new basis; 'reproject' re-expands the full series onto the new
    parameters first and then resets the native slots.
    """
    rho, u, th = h.primitive()
    bad = np.argwhere((rho <= 0) | (th <= 0))
    if bad.size:
        raise AdmissibilityError(field.grid.multi_index(int(bad[0][0])),
                                 "hydro write-back")
    tab = field.tab
    if mode == "reproject":
        for i in range(field.nc):
            field.c[i] = _kernels.project(
                field.c[i], field.u[i, 0] - u[i, 0], field.u[i, 1] - u[i, 1],
                field.u[i, 2] - u[i, 2], field.th[i] - th[i], tab)
        field.c[: field.nc, tab.pos_e[0]] = 0.0
        field.c[: field.nc, tab.pos_e[1]] = 0.0
        field.c[: field.nc, tab.pos_e[2]] = 0.0
        tr = field.c[: field.nc, tab.pos_2e].sum(axis=1) / 3.0
        for d in range(3):
            field.c[: field.nc, tab.pos_2e[d]] -= tr
    field.c[: field.nc, 0] = rho
    field.u[: field.nc] = u
    field.th[: field.nc] = th


def fim_iteration(field, bc, model, cfg, rhs=None):
    """One alternating iteration: gamma1 moment-smoother steps, freeze the
    closures and ghost hydro data, run the hydro inner solve, then write
    the improved primary moments back into the moment field."""
    mscheme, hscheme = cfg.schemes
    f = field
    for _ in range(cfg.gamma1):
        f = _moment_step(mscheme, f, bc, model, rhs, cfg.cfl, cfg.reg)
    h = extract_hydro(f, bc)
    rhs_h = rhs.hydro_rhs(f.tab) if rhs is not None else None
    h, _ = hydro_inner_solve(h, cfg.gamma2, cfg.inner_tol, scheme=hscheme,
                             cfl=cfg.cfl, rhs=rhs_h)
    out = f.copy()
    _write_back(out, h, cfg.writeback)
    return out


def mass_correction(field, target_mass):
    """Uniformly rescale all coefficients so that the total mass matches
    the target exactly (u, theta and normalized higher moments are
    untouched)."""
    total = field.total_mass()
    if total <= 0.0 or not np.isfinite(total):
        raise AdmissibilityError(None, f"total mass {total}")
    out = field.copy()
    out.c[: out.nc] *= target_mass / total
    return out


@dataclass
class SolverConfig:
    """Top-level solver selection and its parameters."""

    variant: str = "sisgs"  # euler|sis|sisgs|fim-1|fim-2|fim-3|nmg
    cfl: float = 0.8
    gamma1: int = 1
    gamma2: int | None = None        # None -> problem default
    inner_tol: float = 1e-8
    outer_tol: float | None = None   # None -> problem default
    max_iters: int = 500_000
    mass_correction: bool | None = None
    regularization: str = "auto"
    writeback: str = "retain"
    threads: int = 1
    nmg: "object | None" = None      # CycleConfig when variant == 'nmg'

    def fim_config(self, problem, variant=None):
        gamma2 = self.gamma2 if self.gamma2 is not None else problem.gamma2
        return FimConfig(variant or self.variant, self.gamma1, gamma2,
                         self.inner_tol, self.cfl, self.regularization,
                         self.writeback)


@dataclass
class HistoryRecord:
    iteration: int
    residual: float
    seconds: float
    mass: float


@dataclass
class SolveResult:
    field: object
    history: list
    converged: bool
    iterations: int
    message: str = ""

    @property
    def residuals(self):
        return np.array([h.residual for h in self.history])


DIVERGENCE_FACTOR = 1.0e6


def solve_to_steady(problem, solver, outer_tol=None, max_iters=None,
                    field0=None, on_iteration=None):
    """Iterate the selected solver until the relative L1 residual falls
    below the tolerance (or the iteration budget / divergence guard hits).

    The residual reported at iteration k is that of the field after k
    iterations, normalized by its value at iteration 0.  ``on_iteration``
    (if given) is called with each HistoryRecord as soon as it exists, so
    aborted runs still retain their convergence history.
    """
    from .multigrid import nmg_prepare, nmg_cycle

    tol = outer_tol if outer_tol is not None else \
        (solver.outer_tol if solver.outer_tol is not None
         else problem.outer_tol)
    budget = max_iters if max_iters is not None else solver.max_iters
    correct = solver.mass_correction if solver.mass_correction is not None \
        else problem.mass_correction

    field = field0.copy() if field0 is not None else problem.initial_field()
    bc, model = problem.bc, problem.model
    reg = solver.regularization
    target = problem.target_mass if correct else None
    if target is None and correct:
        target = field.total_mass()

    variant = solver.variant
    if variant in FIM_VARIANTS:
        fim_cfg = solver.fim_config(problem)
    nmg_state = nmg_prepare(problem, solver, field) if variant == "nmg" \
        else None

    history = []
    t0 = time.perf_counter()
    res0 = None
    converged = False
    message = ""
    k = 0
    while True:
        resid = moment_residual(field, bc, model, reg=reg)
        res = l1_norm(resid, field.grid.cell_volume)
        if res0 is None:
            res0 = res if res > 0.0 else 1.0
        rel = res / res0
        rec = HistoryRecord(k, rel, time.perf_counter() - t0,
                            field.total_mass())
        history.append(rec)
        if on_iteration is not None:
            on_iteration(rec)
        if rel < tol:
            converged = True
            break
        if not np.isfinite(rel) or rel > DIVERGENCE_FACTOR:
            message = f"diverged at iteration {k} (relative residual {rel:.3e})"
            break
        if k >= budget:
            message = f"iteration budget {budget} exhausted"
            break
        try:
            if variant in BASIC_SMOOTHERS:
                field = _moment_step(variant, field, bc, model, None,
                                     solver.cfl, reg, resid=resid)
            elif variant in FIM_VARIANTS:
                field = fim_iteration(field, bc, model, fim_cfg)
            elif variant == "nmg":
                field = nmg_cycle(nmg_state, field)
            else:
                raise ValueError(f"unknown solver variant {variant!r}")
        except AdmissibilityError as err:
            message = f"aborted at iteration {k}: {err}"
            break
        if correct:
            field = mass_correction(field, target)
        k += 1
    return SolveResult(field, history, converged, k, message)
