"""Hermite polynomial machinery: index enumeration, evaluation, root
tables, and analytic re-expansion between basis parameters.

The expansion basis is H_alpha^[u,theta](xi) =
(2 pi theta)^{-3/2} theta^{-|alpha|/2} prod_d He_{alpha_d}(v_d) e^{-v_d^2/2}
with v = (xi - u)/sqrt(theta), which equals (-d/dxi)^alpha applied to the
isotropic Gaussian of variance theta centered at u.  All operations here
are pure; tables are immutable after construction and shareable across
threads.
"""

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite_e

from . import _kernels
from ._tables import Tab, graded_indices, index_count, table


class MultiIndexSet:
    """Canonical graded ordering of 3-component multi-indices with
    |alpha| <= M."""

    def __init__(self, M):
        if M < 0:
            raise ValueError(f"order must be nonnegative, got {M}")
        self.M = M
        self.indices = graded_indices(M)
        self.lookup = {a: p for p, a in enumerate(self.indices)}

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def position(self, alpha):
        return self.lookup[tuple(alpha)]

    def position_e(self, d):
        """Slot of the unit index e_d (d in 0..2)."""
        e = [0, 0, 0]
        e[d] = 1
        return self.lookup[tuple(e)]

    def position_2e(self, d):
        e = [0, 0, 0]
        e[d] = 2
        return self.lookup[tuple(e)]


@lru_cache(maxsize=None)
def enumerate_indices(M):
    """Graded index set for truncation order M (cached)."""
    return MultiIndexSet(M)


def hermite_eval(n, x):
    """He_n(x) by the three-term recurrence He_{n+1} = x He_n - n He_{n-1}.

    Works elementwise for array-valued x.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return h0 if h0.ndim else float(h0)
    h1 = x.copy()
    for k in range(1, n):
        h0, h1 = h1, x * h1 - k * h0
    return h1 if h1.ndim else float(h1)


@lru_cache(maxsize=None)
def hermite_roots(n):
    """Sorted roots of He_n (cached).  Computed by the Golub-Welsch nodes
    of the probabilists' Gauss-Hermite rule."""
    if n < 1:
        raise ValueError("need degree >= 1 for roots")
    roots, _ = hermite_e.hermegauss(n)
    roots = np.array(roots)
    roots.flags.writeable = False
    return roots


def max_hermite_root(n):
    """Largest real root of He_n."""
    return float(hermite_roots(n)[-1])


class HermiteRootTable:
    """Root tables of He_n for n = 1..max_degree, with the largest root
    c_max(n) exposed for wave-speed bounds."""

    def __init__(self, max_degree):
        self.max_degree = max_degree
        self.roots = {n: hermite_roots(n) for n in range(1, max_degree + 1)}

    def c_max(self, n):
        return float(self.roots[n][-1])


def _infer_M(ncoef):
    M = 0
    while index_count(M) < ncoef:
        M += 1
    if index_count(M) != ncoef:
        raise ValueError(f"coefficient array of length {ncoef} does not "
                         "match any truncation order")
    return M


def _as_u(u):
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size == 1:
        u = np.array([u[0], 0.0, 0.0])
    if u.shape != (3,):
        raise ValueError("velocity must be a scalar or 3-vector")
    return u


def project_expansion(coeffs, u_from, theta_from, u_to, theta_to, M=None):
    """Re-expand a truncated series from basis (u_from, theta_from) onto
    (u_to, theta_to).

    Exact (to roundoff) in the sense that every velocity moment of order
    <= M of the represented function is preserved.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if M is None:
        M = _infer_M(coeffs.shape[-1])
    elif index_count(M) != coeffs.shape[-1]:
        raise ValueError("coefficient length does not match order M")
    if theta_to <= 0.0 or theta_from <= 0.0:
        raise ValueError("basis temperature must be positive")
    uf = _as_u(u_from)
    ut = _as_u(u_to)
    tab = table(M)
    return _kernels.project(coeffs, uf[0] - ut[0], uf[1] - ut[1],
                            uf[2] - ut[2], theta_from - theta_to, tab)


def evaluate_expansion(coeffs, u, theta, xi):
    """Pointwise values of the reconstructed distribution at velocities
    ``xi`` (shape (..., 3)).  Reference-quality path used by diagnostics
    and tests; not performance critical."""
    coeffs = np.asarray(coeffs, dtype=float)
    M = _infer_M(coeffs.shape[-1])
    u = _as_u(u)
    xi = np.asarray(xi, dtype=float)
    v = (xi - u) / math.sqrt(theta)
    weight = np.exp(-0.5 * (v ** 2).sum(axis=-1)) / (2 * math.pi * theta) ** 1.5
    he = [hermite_eval_all(M, v[..., d]) for d in range(3)]
    out = np.zeros(xi.shape[:-1])
    tp = theta ** 0.5
    idx = enumerate_indices(M)
    for p, a in enumerate(idx):
        if coeffs[p] == 0.0:
            continue
        term = he[0][a[0]] * he[1][a[1]] * he[2][a[2]]
        out += coeffs[p] * term / tp ** sum(a)
    return out * weight


def hermite_eval_all(M, x):
    """He_k(x) for k = 0..M, stacked along axis 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty((M + 1,) + x.shape)
    out[0] = 1.0
    if M >= 1:
        out[1] = x
    for k in range(1, M):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def xi_times(coeffs, u, theta, d, M=None):
    """Coefficients of xi_d * f truncated at the same order, same basis."""
    coeffs = np.asarray(coeffs, dtype=float)
    if M is None:
        M = _infer_M(coeffs.shape[-1])
    u = _as_u(u)
    return _kernels.xi_product(coeffs, u[d], theta, d, table(M))
