"""Per-cell truncated distribution states and macroscopic extraction.

A state is *native* when its basis parameters coincide with its own mean
velocity and temperature, i.e. f_{e_d} = 0 and sum_d f_{2e_d} = 0.  The
solver keeps all interior cells native between steps; non-native states
appear transiently inside the update stages.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._tables import index_count, table
from .basis import _as_u, _infer_M, project_expansion
from .errors import AdmissibilityError

NATIVE_TOL = 1e-10


@dataclass
class MomentState:
    """Expansion coefficients plus the basis parameters they refer to."""

    u: np.ndarray
    theta: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.u = _as_u(self.u)
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        self.M = _infer_M(self.coeffs.shape[0])
        if self.theta <= 0.0:
            raise AdmissibilityError(None, f"basis theta = {self.theta}")

    def copy(self):
        return MomentState(self.u.copy(), self.theta, self.coeffs.copy())

    def is_native(self, tol=NATIVE_TOL):
        tab = table(self.M)
        scale = abs(self.coeffs[0]) + np.abs(self.coeffs).max() + 1e-300
        if np.abs(self.coeffs[tab.pos_e]).max() > tol * scale:
            return False
        return abs(self.coeffs[tab.pos_2e].sum()) <= tol * scale


@dataclass
class MacroQuantities:
    rho: float
    u: np.ndarray
    theta: float
    sigma: np.ndarray
    q: np.ndarray
    E: float = field(init=False)
    p: float = field(init=False)

    def __post_init__(self):
        self.E = 0.5 * (3.0 * self.theta + float(self.u @ self.u))
        self.p = self.rho * self.theta


def maxwellian_state(rho, u, theta, M):
    """Native state whose leading coefficient is the local Maxwellian."""
    if rho <= 0.0:
        raise AdmissibilityError(None, f"rho = {rho}")
    if theta <= 0.0:
        raise AdmissibilityError(None, f"theta = {theta}")
    c = np.zeros(index_count(M))
    c[0] = rho
    return MomentState(_as_u(u), float(theta), c)


def primary_moments(s):
    """(rho, u, theta) of a state, native or not (generalized relations)."""
    tab = table(s.M)
    rho, u0, u1, u2, th = _kernels.moments_of(s.coeffs, s.u[0], s.u[1],
                                              s.u[2], s.theta, tab)
    if rho <= 0.0:
        raise AdmissibilityError(None, f"rho = {rho}")
    if th <= 0.0:
        raise AdmissibilityError(None, f"theta = {th}")
    return rho, np.array([u0, u1, u2]), th


def stress_heat(s):
    """Stress tensor and heat flux of a native state:
    sigma_ij = (1 + delta_ij) f_{e_i + e_j},
    q_i = 2 f_{3 e_i} + sum_d f_{2 e_d + e_i}."""
    if not s.is_native():
        raise ValueError("stress_heat requires a native state")
    return _native_stress_heat(s.coeffs, s.M)


def _native_stress_heat(c, M):
    tab = table(M)
    sigma = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            pos = tab.pos_pair[i, j]
            sigma[i, j] = (2.0 if i == j else 1.0) * c[pos]
    q = np.empty(3)
    for i in range(3):
        v = 0.0
        if tab.pos_3e[i] >= 0:
            v += 2.0 * c[tab.pos_3e[i]]
        for d in range(3):
            pos = tab.pos_2e_e[d, i]
            if pos >= 0:
                v += c[pos]
        q[i] = v
    return sigma, q


def macro_quantities(s):
    """Full macroscopic record of a native state."""
    rho, u, th = primary_moments(s)
    sigma, q = stress_heat(s)
    return MacroQuantities(rho, u, th, sigma, q)


def renormalize(s):
    """Native state with the same primary moments (and the same function
    content up to the truncation order)."""
    tab = table(s.M)
    cn, u0, u1, u2, th, ok = _kernels.make_native(
        s.coeffs, s.u[0], s.u[1], s.u[2], s.theta, tab)
    if not ok:
        raise AdmissibilityError(None, "nonpositive density or temperature")
    return MomentState(np.array([u0, u1, u2]), th, cn)
