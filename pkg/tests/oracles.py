"""Independent reference computations used only by the tests.

Each oracle takes a different route from the package code: natural-log
entropies converted at the end, numpy/LAPACK spectra, linear programming
over permutation matrices, and plain bisection.
"""

import itertools
import math

import numpy as np
from scipy.optimize import linprog


def entropy_bits(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum() / math.log(2))


def cond_entropy_bits(grid):
    """H(X|Y) as the py-weighted average of column entropies."""
    g = np.asarray(grid, dtype=float)
    total = 0.0
    for j in range(g.shape[1]):
        py = g[:, j].sum()
        if py > 0:
            total += py * entropy_bits(g[:, j] / py)
    return total


def vn_entropy_bits(m):
    w = np.linalg.eigvalsh(np.asarray(m))
    return entropy_bits(np.clip(w, 0, None))


def cond_vn_entropy_bits(m, dA, dB):
    t = np.asarray(m).reshape(dA, dB, dA, dB)
    rho_b = np.trace(t, axis1=0, axis2=2)
    return vn_entropy_bits(m) - vn_entropy_bits(rho_b)


def trace_norm_distance(a, b):
    return 0.5 * float(np.abs(np.linalg.eigvalsh(np.asarray(a) - np.asarray(b))).sum())


def birkhoff_feasible(x, y, tol=1e-6):
    """Is y a convex combination of permutations of x? Solved as an LP feasibility problem."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    perms = [x[list(s)] for s in itertools.permutations(range(len(x)))]
    A = np.vstack([np.array(perms).T, np.ones(len(perms))])
    b = np.concatenate([y, [1.0]])
    res = linprog(np.zeros(len(perms)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        return False
    return bool(np.max(np.abs(A @ res.x - b)) <= tol)


def bisect(f, lo, hi, tol=1e-14):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
