"""Tight continuity bound for H(X|Y) and the reorder / walk / estimate procedure.

Row 0 of a grid is the distinguished outcome that collects probability mass
during the walk. Grids may hold floats or Fractions; the arithmetic is the
same either way, so Fraction inputs give an exact audit trail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .prob import (
    JointDistribution,
    binary_entropy,
    conditional_entropy,
    shannon_entropy,
    tv_distance,
)

TRACE_TOL = 1e-9


class PreconditionViolated(ValueError):
    pass


def bound_conditional(epsilon: float, dx: int) -> float:
    """eps*log2(dx-1) + h(eps) up to eps = 1 - 1/dx, log2(dx) beyond."""
    epsilon = float(epsilon)
    if dx < 2:
        raise ValueError(f"alphabet size must be at least 2, got {dx}")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon > 1.0 - 1.0 / dx:
        return math.log2(dx)
    return epsilon * math.log2(dx - 1) + binary_entropy(epsilon)


def saturating_pair(epsilon: float, dx: int, dy: int):
    """Pair (p, q) with equivocation gap equal to the bound at TV distance epsilon.

    Past the knee epsilon = 1 - 1/dx the pair is the point mass against the
    uniform first column, at TV distance 1 - 1/dx.
    """
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    p = np.zeros((dx, dy))
    q = np.zeros((dx, dy))
    if epsilon <= 1.0 - 1.0 / dx:
        q[0, 0] = 1.0
        p[0, 0] = 1.0 - epsilon
        p[1:, 0] = epsilon / (dx - 1)
    else:
        p[0, 0] = 1.0
        q[:, 0] = 1.0 / dx
    return JointDistribution(p), JointDistribution(q)


@dataclass(frozen=True)
class BoundReport:
    epsilon: float
    gap: float
    bound: float
    slack: float
    saturated: bool

    def row(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "gap": self.gap,
            "bound": self.bound,
            "slack": self.slack,
            "saturated": self.saturated,
        }


def verify_bound(p: JointDistribution, q: JointDistribution) -> BoundReport:
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    eps = float(tv_distance(p, q))
    gap = abs(conditional_entropy(p) - conditional_entropy(q))
    bound = bound_conditional(min(eps, 1.0), p.size_x)
    slack = bound - gap
    return BoundReport(eps, gap, bound, slack, slack <= TRACE_TOL)


def _permute(grid: np.ndarray, cols, rows_per_col) -> np.ndarray:
    out = np.empty_like(grid)
    for new_j, old_j in enumerate(cols):
        out[:, new_j] = grid[rows_per_col[new_j], old_j]
    return out


def reorder(p: JointDistribution, q: JointDistribution):
    """Canonical arrangement of a pair under S_{X|Y}.

    Columns are sorted by q_Y - p_Y descending; inside each column the rows
    where q >= p come first, and each of the two runs is sorted by q
    descending. Ties keep their original order.

    Returns:
        (p', q', blocks) where blocks[j] is the tuple of new row indices
        forming I_j in column j.
    """
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    a, b = p.probs, q.probs
    dx, dy = p.shape
    delta = [b[:, j].sum() - a[:, j].sum() for j in range(dy)]
    cols = sorted(range(dy), key=lambda j: -delta[j])
    rows_per_col = []
    blocks = []
    for j in cols:
        in_set = [i for i in range(dx) if b[i, j] >= a[i, j]]
        out_set = [i for i in range(dx) if b[i, j] < a[i, j]]
        in_set.sort(key=lambda i: -b[i, j])
        out_set.sort(key=lambda i: -b[i, j])
        rows_per_col.append(in_set + out_set)
        blocks.append(tuple(range(len(in_set))))
    return (
        JointDistribution(_permute(a, cols, rows_per_col)),
        JointDistribution(_permute(b, cols, rows_per_col)),
        blocks,
    )


def averaging_map(p: JointDistribution) -> JointDistribution:
    """Replace every column by the mean column."""
    grid = p.probs
    dy = grid.shape[1]
    if p.exact:
        mean = [sum(grid[i, :]) / dy for i in range(grid.shape[0])]
        out = np.empty_like(grid)
        for j in range(dy):
            out[:, j] = mean
        return JointDistribution(out)
    mean = grid.mean(axis=1, keepdims=True)
    return JointDistribution(np.repeat(mean, dy, axis=1))


@dataclass(frozen=True)
class Snapshot:
    label: str
    p: JointDistribution
    q: JointDistribution
    tv: float
    gap: float

    def record(self) -> dict:
        return {"step": self.label, "tv": float(self.tv), "gap": float(self.gap)}


@dataclass
class WalkTrace:
    steps: list = field(default_factory=list)
    swapped: bool = False
    epsilon: float = 0.0

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Snapshot:
        return self.steps[-1]

    def records(self) -> list[dict]:
        return [s.record() for s in self.steps]


def _snapshot(label, p, q) -> Snapshot:
    pj = JointDistribution(p)
    qj = JointDistribution(q)
    return Snapshot(label, pj, qj, tv_distance(pj, qj), conditional_entropy(pj) - conditional_entropy(qj))


def _zero_like(v):
    return Fraction(0) if isinstance(v, Fraction) else 0.0


def _walk_block(a: np.ndarray, b: np.ndarray, j: int, in_set, emit) -> None:
    """Drive column j of q to a point mass on row 0; a is p, b is q (edited in place)."""
    dx = a.shape[0]
    zero = _zero_like(b[0, j])
    if in_set:
        for i in in_set:
            if i == 0 or b[i, j] == a[i, j]:
                continue
            b[0, j] += b[i, j] - a[i, j]
            b[i, j] = a[i, j]
            emit(f"replace j={j} i={i}")
    else:
        # no row where q >= p: lift q's row 0 alone while it stays below p's
        for i in range(dx - 1, 0, -1):
            gap_top = a[0, j] - b[0, j]
            if gap_top <= 0 or b[i, j] == zero:
                continue
            s = b[i, j]
            if s >= gap_top:
                # stop exactly where q(0, j) meets p(0, j)
                b[0, j] = a[0, j]
                b[i, j] = s - gap_top
                emit(f"lift j={j} i={i} split")
                break
            b[0, j] += s
            b[i, j] = zero
            emit(f"lift j={j} i={i}")
    for i in range(dx - 1, 0, -1):
        s = b[i, j]
        if s == zero:
            continue
        b[0, j] += s
        a[0, j] += s
        b[i, j] = zero
        a[i, j] -= s
        emit(f"transfer j={j} i={i}")


def walk(p: JointDistribution, q: JointDistribution) -> WalkTrace:
    """Walk a pair across the simplex until q has no equivocation left.

    The pair is first swapped if needed so that H_p(X|Y) >= H_q(X|Y), then
    put in canonical order. Every nontrivial single-entry move records a
    snapshot, followed by one for the final averaging step. The total
    variation distance never grows and the equivocation gap never shrinks.
    """
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    if p.exact != q.exact:
        raise ValueError("cannot mix exact and floating-point grids")
    dx, dy = p.shape
    eps = tv_distance(p, q)
    limit = 1 - Fraction(1, dx) if p.exact else 1.0 - 1.0 / dx + 1e-12
    if eps > limit:
        raise PreconditionViolated(f"TV distance {float(eps):.6g} exceeds 1 - 1/|X| = {1 - 1 / dx:.6g}")
    trace = WalkTrace(epsilon=float(eps))
    start = "start"
    if conditional_entropy(p) < conditional_entropy(q):
        p, q = q, p
        trace.swapped = True
        start = "start swapped"
    trace.steps.append(_snapshot(start, p.probs, q.probs))
    p, q, blocks = reorder(p, q)
    trace.steps.append(_snapshot("reorder", p.probs, q.probs))
    a = p.probs.copy()
    b = q.probs.copy()
    if not p.exact:
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)

    def emit(label):
        trace.steps.append(_snapshot(label, a.copy(), b.copy()))

    for j in range(dy):
        _walk_block(a, b, j, blocks[j], emit)
    fp = averaging_map(JointDistribution(a))
    fq = averaging_map(JointDistribution(b))
    trace.steps.append(_snapshot("average", fp.probs, fq.probs))
    return trace


def check_trace(trace: WalkTrace, tol: float = TRACE_TOL):
    """Name of the first violated walk invariant, or None if all hold."""
    steps = trace.steps
    for k in range(1, len(steps)):
        if steps[k].tv > steps[k - 1].tv + tol:
            return f"tv increased at step {k} ({steps[k].label})"
        if steps[k].gap < steps[k - 1].gap - tol:
            return f"gap decreased at step {k} ({steps[k].label})"
    last = steps[-1]
    if conditional_entropy(last.q) > tol:
        return "final equivocation of q is nonzero"
    qx = np.array(last.q.marginal_x(), dtype=float)
    if abs(qx[0] - 1.0) > tol:
        return "final q is not concentrated on row 0"
    pa = last.p.as_float()
    py = pa.sum(axis=0)
    if np.max(np.abs(py - 1.0 / pa.shape[1])) > tol:
        return "final Y-marginal is not uniform"
    if np.max(np.abs(pa - np.outer(pa.sum(axis=1), py))) > tol:
        return "final p is not a product distribution"
    hx = shannon_entropy(pa.sum(axis=1))
    if hx > bound_conditional(min(trace.epsilon, 1.0), pa.shape[0]) + tol:
        return "final marginal entropy exceeds the bound"
    if last.gap > bound_conditional(min(trace.epsilon, 1.0), pa.shape[0]) + tol:
        return "final gap exceeds the bound"
    return None
