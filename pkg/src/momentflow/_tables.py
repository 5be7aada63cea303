"""Multi-index bookkeeping for truncated Hermite expansions.

Coefficient arrays are laid out in graded order (by total degree |alpha|,
ties broken so that e_1, e_2, e_3 come in that order), which keeps all
hydrodynamic indices (|alpha| <= 2) in a contiguous prefix.  The lookup
arrays built here are what the numba kernels consume.
"""

import math
from collections import namedtuple
from functools import lru_cache

import numpy as np

# Index-table bundle shared by all kernels.  Fields:
#   alpha    : (n, 3) int64, multi-index of each slot
#   order    : (n,) int64, |alpha|
#   lower    : (3, n) int64, slot of alpha - e_d (or -1)
#   raise_   : (3, n) int64, slot of alpha + e_d (or -1 beyond order M)
#   inv_fact : (M + 2,) float64, 1/j!
#   pos_e    : (3,) slots of e_d
#   pos_2e   : (3,) slots of 2 e_d
#   pos_3e   : (3,) slots of 3 e_d
#   pos_pair : (3, 3) slots of e_i + e_j
#   pos_2e_e : (3, 3) [d, i] slots of 2 e_d + e_i
#   axis_pos : (3, M + 1) slots of n e_d
#   top_pos  : (ntop,) slots with |alpha| == M
#   reg1     : (3, ntop, 3) slots of alpha + e_d - e_dp (or -1)
#   reg2     : (3, ntop, 3) slots of alpha + e_d - 2 e_dp (or -1)
Tab = namedtuple(
    "Tab",
    "M n alpha order lower raise_ inv_fact pos_e pos_2e pos_3e "
    "pos_pair pos_2e_e axis_pos top_pos reg1 reg2",
)


def graded_indices(M):
    """All 3-component multi-indices with |alpha| <= M, graded order."""
    out = []
    for total in range(M + 1):
        for a1 in range(total, -1, -1):
            for a2 in range(total - a1, -1, -1):
                out.append((a1, a2, total - a1 - a2))
    return out


def index_count(M):
    return math.comb(M + 3, 3)


@lru_cache(maxsize=None)
def table(M):
    """Build (and cache) the kernel index table for truncation order M."""
    if M < 0:
        raise ValueError(f"truncation order must be nonnegative, got {M}")
    idx = graded_indices(M)
    n = len(idx)
    lookup = {a: p for p, a in enumerate(idx)}

    alpha = np.array(idx, dtype=np.int64)
    order = alpha.sum(axis=1)

    lower = np.full((3, n), -1, dtype=np.int64)
    raise_ = np.full((3, n), -1, dtype=np.int64)
    for p, a in enumerate(idx):
        for d in range(3):
            if a[d] > 0:
                b = list(a)
                b[d] -= 1
                lower[d, p] = lookup[tuple(b)]
            if sum(a) < M:
                b = list(a)
                b[d] += 1
                raise_[d, p] = lookup[tuple(b)]

    inv_fact = np.array([1.0 / math.factorial(j) for j in range(M + 2)])

    def pos(a):
        return lookup.get(tuple(a), -1)

    e = np.eye(3, dtype=int)
    pos_e = np.array([pos(e[d]) for d in range(3)], dtype=np.int64)
    pos_2e = np.array([pos(2 * e[d]) for d in range(3)], dtype=np.int64)
    pos_3e = np.array([pos(3 * e[d]) for d in range(3)], dtype=np.int64)
    pos_pair = np.array(
        [[pos(e[i] + e[j]) for j in range(3)] for i in range(3)], dtype=np.int64
    )
    pos_2e_e = np.array(
        [[pos(2 * e[d] + e[i]) for i in range(3)] for d in range(3)], dtype=np.int64
    )
    axis_pos = np.array(
        [[pos(k * e[d]) for k in range(M + 1)] for d in range(3)], dtype=np.int64
    )

    top = [p for p in range(n) if order[p] == M]
    top_pos = np.array(top, dtype=np.int64)
    ntop = len(top)
    reg1 = np.full((3, ntop, 3), -1, dtype=np.int64)
    reg2 = np.full((3, ntop, 3), -1, dtype=np.int64)
    for k, p in enumerate(top):
        a = np.asarray(idx[p])
        for d in range(3):
            for dp in range(3):
                reg1[d, k, dp] = pos(a + e[d] - e[dp])
                reg2[d, k, dp] = pos(a + e[d] - 2 * e[dp])

    return Tab(M, n, alpha, order, lower, raise_, inv_fact, pos_e, pos_2e,
               pos_3e, pos_pair, pos_2e_e, axis_pos, top_pos, reg1, reg2)
