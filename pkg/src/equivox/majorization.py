"""Majorization order on real vectors with constructive witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORDER_TOL = 1e-9


class NotMajorized(ValueError):
    pass


@dataclass(frozen=True)
class TTransform:
    """x -> (1-t) x + t P_ij x, acting on coordinates i and j (0-based)."""

    i: int
    j: int
    t: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("a T-transform needs two distinct indices")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {self.t}")


@dataclass(frozen=True)
class UnjustTransfer:
    """Move ``amount`` from rank j to rank i < j of the descending sorted view."""

    i: int
    j: int
    amount: float

    def __post_init__(self):
        if self.amount < 0:
            raise ValueError(f"transfer amount must be nonnegative, got {self.amount}")
        if not 0 <= self.i < self.j:
            raise ValueError(f"need 0 <= i < j, got i={self.i}, j={self.j}")


def _vec(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"expected a nonempty vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def sort_desc(x) -> tuple[np.ndarray, np.ndarray]:
    """Descending sort with ties kept in original index order."""
    a = _vec(x)
    order = np.argsort(-a, kind="stable")
    return a[order], order


def majorizes(x, y, tol: float = ORDER_TOL) -> bool:
    a = _vec(x)
    b = _vec(y)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch {a.size} vs {b.size}")
    if abs(a.sum() - b.sum()) > tol:
        return False
    pa = np.cumsum(np.sort(a)[::-1])
    pb = np.cumsum(np.sort(b)[::-1])
    return bool(np.all(pa >= pb - tol))


def apply_t_transform(x, T: TTransform) -> np.ndarray:
    a = _vec(x)
    n = a.size
    if not (0 <= T.i < n and 0 <= T.j < n):
        raise IndexError(f"indices ({T.i}, {T.j}) out of range for length {n}")
    out = a.copy()
    xi, xj = a[T.i], a[T.j]
    if T.t == 0.0:
        return out
    if T.t == 1.0:
        out[T.i], out[T.j] = xj, xi
        return out
    out[T.i] = (1.0 - T.t) * xi + T.t * xj
    # pair sum kept exact by construction
    out[T.j] = (xi + xj) - out[T.i]
    return out


def apply_unjust_transfer(x, u: UnjustTransfer) -> np.ndarray:
    """Apply the transfer to the entries holding ranks i and j; positions are kept.

    Transfers that would reorder the sorted view are rejected.
    """
    a = _vec(x)
    if u.j >= a.size:
        raise IndexError(f"rank {u.j} out of range for length {a.size}")
    xs, order = sort_desc(a)
    hi = xs[u.i] + u.amount
    lo = xs[u.j] - u.amount
    # the moved entries must keep their ranks
    if u.i > 0 and hi > xs[u.i - 1] + 1e-12:
        raise ValueError(f"transfer lifts rank {u.i} above rank {u.i - 1}")
    below = xs[u.j + 1] if u.j + 1 < a.size else 0.0
    if lo < below - 1e-12:
        raise ValueError(f"transfer drops rank {u.j} below {'rank ' + str(u.j + 1) if u.j + 1 < a.size else 'zero'}")
    out = a.copy()
    out[order[u.i]] = hi
    out[order[u.j]] = lo
    return out


def t_transform_from_unjust(x, y, tol: float = 1e-12) -> TTransform:
    """T-transform taking sorted x back to sorted y, where x = y plus one unjust transfer.

    The returned indices are ranks in the descending order of x.
    """
    xs, _ = sort_desc(x)
    ys, _ = sort_desc(y)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need two vectors of equal length at least 2")
    diff = np.flatnonzero(np.abs(xs - ys) > tol)
    if diff.size == 0:
        return TTransform(0, 1, 0.0)
    if diff.size != 2:
        raise NotMajorized("vectors differ in more than two ranks")
    i, j = int(diff[0]), int(diff[1])
    eps = xs[i] - ys[i]
    if eps < 0 or abs((ys[j] - xs[j]) - eps) > tol:
        raise NotMajorized("vectors are not related by a single unjust transfer")
    denom = (ys[i] - ys[j]) + 2.0 * eps
    t = 0.0 if denom == 0.0 else float(eps / denom)
    return TTransform(i, j, min(max(t, 0.0), 1.0))


def witness_chain(x, y, tol: float = ORDER_TOL) -> list[TTransform]:
    """T-transforms carrying x onto y, coordinate by coordinate.

    When x and y can be sorted by a common permutation the chain is the
    classic largest-gap reduction and has at most d-1 steps. Otherwise a
    short search for a pinning sequence is tried first, and the fallback
    appends transpositions after the sorted-frame reduction.
    """
    z = _vec(x).copy()
    target = _vec(y)
    if z.shape != target.shape:
        raise ValueError(f"length mismatch {z.size} vs {target.size}")
    if not majorizes(z, target, tol):
        raise NotMajorized("x does not majorize y")
    scale = max(1.0, float(np.abs(z).max()), float(np.abs(target).max()))
    eq_tol = 1e-12 * scale
    _, order = sort_desc(z)
    if np.all(np.diff(target[order]) <= eq_tol):
        return _sorted_frame_chain(z, target, order, eq_tol)
    fixed = np.abs(z - target) <= eq_tol
    chain = _search(z, target, fixed, tol, eq_tol, [200])
    if chain is not None:
        return chain
    chain = _sorted_frame_chain(z, np.sort(target)[::-1][np.argsort(order)], order, eq_tol)
    return chain + _transpositions(apply_chain(z, chain), target, eq_tol)


def _sorted_frame_chain(z, target, order, eq_tol):
    # positions order[0], order[1], ... hold the ranks of z; target is co-sorted
    a = z[order].copy()
    b = target[order]
    chain = []
    for _ in range(a.size):
        over = np.flatnonzero(a - b > eq_tol)
        if over.size == 0:
            break
        j = int(over[-1])
        under = np.flatnonzero(b[j + 1:] - a[j + 1:] > eq_tol)
        if under.size == 0:
            break
        k = j + 1 + int(under[0])
        delta = min(a[j] - b[j], b[k] - a[k])
        t = float(np.clip(delta / (a[j] - a[k]), 0.0, 1.0))
        a[j] -= delta
        a[k] += delta
        # snap the coordinate that reached its target
        if abs(a[j] - b[j]) <= eq_tol:
            a[j] = b[j]
        if abs(a[k] - b[k]) <= eq_tol:
            a[k] = b[k]
        chain.append(TTransform(int(order[j]), int(order[k]), t))
    return chain


def _transpositions(z, target, eq_tol):
    z = z.copy()
    chain = []
    for p in range(z.size):
        if abs(z[p] - target[p]) <= eq_tol * 1e3:
            continue
        rest = np.arange(p + 1, z.size)
        q = int(rest[np.argmin(np.abs(z[rest] - target[p]))])
        chain.append(TTransform(p, q, 1.0))
        z[p], z[q] = z[q], z[p]
    return chain


def _prefix_slack(a, b):
    pa = np.cumsum(np.sort(a)[::-1])
    pb = np.cumsum(np.sort(b)[::-1])
    return float(np.min(pa - pb))


def _pin_candidates(z, target, fixed, tol, eq_tol):
    """Single pins that leave the unpinned part majorizing, best slack first."""
    free = np.flatnonzero(~fixed)
    found = []
    for i in free:
        for k in free:
            if k == i:
                continue
            lo, hi = min(z[i], z[k]), max(z[i], z[k])
            if not (lo - eq_tol <= target[i] <= hi + eq_tol) or hi - lo <= eq_tol:
                continue
            t = float(np.clip((z[i] - target[i]) / (z[i] - z[k]), 0.0, 1.0))
            cand = TTransform(int(i), int(k), t)
            w = apply_t_transform(z, cand)
            keep = ~fixed
            keep[i] = False
            slack = _prefix_slack(w[keep], target[keep])
            if slack >= -tol:
                found.append((-slack, len(found), cand, w))
    found.sort(key=lambda item: item[:2])
    return [(c, w) for _, _, c, w in found]


def _search(z, target, fixed, tol, eq_tol, budget):
    if fixed.sum() >= z.size - 1:
        return []
    budget[0] -= 1
    if budget[0] < 0:
        return None
    for cand, w in _pin_candidates(z, target, fixed, tol, eq_tol):
        pinned = fixed | (np.abs(w - target) <= eq_tol)
        pinned[cand.i] = True
        rest = _search(w, target, pinned, tol, eq_tol, budget)
        if rest is not None:
            return [cand] + rest
    return None


def apply_chain(x, chain) -> np.ndarray:
    z = _vec(x)
    for T in chain:
        z = apply_t_transform(z, T)
    return z


def majorant_vector(m: int, e: float) -> np.ndarray:
    """(1, ..., 1, e - floor(e), 0, ..., 0) of length m."""
    if m < 1:
        raise ValueError("length must be positive")
    if e < 0 or e > m:
        raise ValueError(f"need 0 <= e <= m, got e={e}, m={m}")
    out = np.zeros(m)
    whole = int(math.floor(e))
    out[:whole] = 1.0
    if whole < m:
        out[whole] = e - whole
    return out
