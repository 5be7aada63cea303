"""Benchmark problem definitions: planar Couette flow, standing shock
structure, and the lid-driven cavity (nondimensionalized argon setups)."""

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from .collision import KIND_COUETTE, KIND_VHS, CollisionModel
from .errors import ConfigError
from .grid import (BoundarySpec, Grid, MaxwellWall, MomentField,
                   PrescribedMaxwellian)
from .states import maxwellian_state

BOLTZMANN_K = 1.380649e-23   # J/K
ARGON_MASS = 6.63e-26        # kg
WALL_TEMPERATURE_K = 273.0   # cavity wall temperature
LID_SPEED_MS = 50.0          # cavity lid speed, m/s
COUETTE_RELATIVE_SPEED = 1.2577


@dataclass
class Problem:
    kind: str
    M: int
    grid: Grid
    bc: BoundarySpec
    model: CollisionModel
    rho0: float = 1.0
    u0: tuple = (0.0, 0.0, 0.0)
    theta0: float = 1.0
    kn: float | None = None
    mach: float | None = None
    mass_correction: bool = True
    target_mass: float | None = None
    gamma2: int = 40
    outer_tol: float = 1.0e-8
    left_state: tuple | None = None   # shock only: (rho, u(3), theta)
    right_state: tuple | None = None

    def initial_field(self):
        if self.kind == "shock":
            return _riemann_field(self)
        f = MomentField.uniform(self.grid, self.M, self.rho0, self.u0,
                                self.theta0)
        return f


def _validate(kind, kn, M):
    if M < 2:
        raise ConfigError(f"problem.order: moment order must be >= 2 "
                          f"(hydrodynamic subsystem needs it), got {M}")
    if kn is not None and kn <= 0:
        raise ConfigError(f"problem.kn: Knudsen number must be positive, "
                          f"got {kn}")


def _gamma2_default(kind, kn):
    """Hydro inner-step budgets used in the benchmark runs."""
    if kind == "shock":
        return 5
    hi, mid, lo = (40, 300, 600) if kind == "couette" else (20, 100, 200)
    if kn >= 0.05:
        return hi
    if kn >= 0.005:
        return mid
    return lo


def build_couette(kn, M, n1):
    """Planar Couette flow: unit channel, diffuse walls at theta = 1
    moving in +-x2 with relative speed 1.2577 (split symmetrically),
    initially the global Maxwellian (1, 0, 1)."""
    _validate("couette", kn, M)
    half = COUETTE_RELATIVE_SPEED / 2.0
    grid = Grid((n1,), ((0.0, 1.0),))
    bc = BoundarySpec(((MaxwellWall((0.0, -half, 0.0), 1.0),
                        MaxwellWall((0.0, half, 0.0), 1.0)),))
    model = CollisionModel(KIND_COUETTE, kn, 0.81)
    return Problem("couette", M, grid, bc, model, kn=kn,
                   mass_correction=True, target_mass=1.0,
                   gamma2=_gamma2_default("couette", kn), outer_tol=1e-8)


def shock_states(ma):
    """Upstream/downstream Maxwellian states of the standing shock at Mach
    number ma (Rankine-Hugoniot with gamma = 5/3)."""
    if ma <= 1.0:
        raise ConfigError(f"problem.mach: shock Mach number must exceed 1, "
                          f"got {ma}")
    c = math.sqrt(5.0 / 3.0)
    rho_l, u_l, th_l = 1.0, c * ma, 1.0
    rho_r = 4.0 * ma * ma / (ma * ma + 3.0)
    u_r = c * (ma * ma + 3.0) / (4.0 * ma)
    th_r = (5.0 * ma * ma - 1.0) / (4.0 * rho_r)
    return (rho_l, (u_l, 0.0, 0.0), th_l), (rho_r, (u_r, 0.0, 0.0), th_r)


def build_shock(ma, M, n1, kn=0.1, omega=0.72):
    """Standing shock structure: Riemann initial data on [-1.5, 1.5],
    prescribed Maxwellian ghosts on both ends, VHS collision frequency."""
    _validate("shock", kn, M)
    left, right = shock_states(ma)
    grid = Grid((n1,), ((-1.5, 1.5),))
    bc = BoundarySpec(((PrescribedMaxwellian(left[0], left[1], left[2]),
                        PrescribedMaxwellian(right[0], right[1], right[2])),))
    model = CollisionModel(KIND_VHS, kn, omega)
    return Problem("shock", M, grid, bc, model, kn=kn, mach=ma,
                   mass_correction=False, gamma2=_gamma2_default("shock", kn),
                   outer_tol=5e-5, left_state=left, right_state=right)


def _riemann_field(problem):
    f = MomentField(problem.grid, problem.M)
    x = problem.grid.centers(0)
    left = maxwellian_state(*problem.left_state, problem.M)
    right = maxwellian_state(*problem.right_state, problem.M)
    for i in range(problem.grid.ncells):
        f.set_state(i, left if x[i] < 0.0 else right)
    return f


def cavity_lid_speed():
    """Dimensionless lid speed: 50 m/s over sqrt((k_B/m) 273 K)."""
    theta_ref = BOLTZMANN_K / ARGON_MASS * WALL_TEMPERATURE_K
    return LID_SPEED_MS / math.sqrt(theta_ref)


def build_cavity(kn, M, n1, n2):
    """Lid-driven square cavity, nondimensionalized: unit box, resting
    diffuse walls at theta = 1 except the top lid sliding in +x1 at the
    dimensionless speed ~0.2097, initial global Maxwellian (1, 0, 1)."""
    _validate("cavity", kn, M)
    ulid = cavity_lid_speed()
    grid = Grid((n1, n2), ((0.0, 1.0), (0.0, 1.0)))
    rest = MaxwellWall((0.0, 0.0, 0.0), 1.0)
    lid = MaxwellWall((ulid, 0.0, 0.0), 1.0)
    bc = BoundarySpec(((rest, rest), (rest, lid)))
    model = CollisionModel(KIND_COUETTE, kn, 0.81)
    return Problem("cavity", M, grid, bc, model, kn=kn,
                   mass_correction=True, target_mass=1.0,
                   gamma2=_gamma2_default("cavity", kn), outer_tol=1e-8)


def build_problem(kind, *, kn=None, mach=None, M=None, shape=None):
    if kind == "couette":
        if kn is None:
            raise ConfigError("missing config key problem.kn")
        return build_couette(kn, M, shape[0])
    if kind == "shock":
        if mach is None:
            raise ConfigError("missing config key problem.mach")
        return build_shock(mach, M, shape[0], kn=0.1 if kn is None else kn)
    if kind == "cavity":
        if kn is None:
            raise ConfigError("missing config key problem.kn")
        if len(shape) != 2:
            raise ConfigError("problem.grid: cavity needs N1xN2")
        return build_cavity(kn, M, shape[0], shape[1])
    raise ConfigError(f"problem.kind: unknown benchmark {kind!r}")


def normalize_shock_profile(field, problem):
    """Profile table with the shock normalization
    rho_bar = (rho - rho_l)/(rho_r - rho_l),
    u_bar = (u1 - u_{1,r})/(u_{1,l} - u_{1,r}),
    theta_bar = (theta - theta_l)/(theta_r - theta_l)."""
    if problem.left_state is None:
        raise ValueError("not a shock problem")
    (rho_l, ul, th_l), (rho_r, ur, th_r) = (problem.left_state,
                                            problem.right_state)
    c, u, th = field.interior()
    rho = c[:, 0]
    u1 = u[:, 0]
    return {
        "x": field.grid.centers(0),
        "rho": rho.copy(),
        "u1": u1.copy(),
        "theta": th.copy(),
        "rho_norm": (rho - rho_l) / (rho_r - rho_l),
        "u1_norm": (u1 - ur[0]) / (ul[0] - ur[0]),
        "theta_norm": (th - th_l) / (th_r - th_l),
    }
