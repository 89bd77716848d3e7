"""Alignment operators, unitarily invariant norms and two-projector alignment.

Subsets of the n qudits are bitmasks: bit i set means qudit i (0-based)
belongs to the subset. Operators on n qudits use the natural tensor order,
qudit 0 being the most significant factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .eigen import eig_hermitian, eigvals_hermitian
from .majorization import majorizes
from .quantum import DensityOperator

MAX_TOTAL_DIM = 256
CLASSICAL_BUDGET = 10**6


def subset_members(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


def ordered_subsets(n: int) -> list[int]:
    """All bitmasks over n qudits ordered by size, then lexicographically by members."""
    return sorted(range(1 << n), key=lambda m: (bin(m).count("1"), subset_members(m, n)))


class AlignmentSpec:
    """Problem data (d, n, mu, Q) with Q's eigen-decomposition cached."""

    def __init__(self, d: int, n: int, mu: dict, Q):
        if d < 1 or n < 1:
            raise ValueError("d and n must be positive")
        if d**n > MAX_TOTAL_DIM:
            raise ValueError(f"d^n = {d**n} exceeds {MAX_TOTAL_DIM}")
        weights = {}
        for key, w in mu.items():
            mask = int(key)
            if not 0 <= mask < 1 << n:
                raise ValueError(f"subset mask {mask} out of range for n = {n}")
            if w < 0:
                raise ValueError(f"negative weight {w} for subset {mask}")
            if w > 0:
                weights[mask] = weights.get(mask, 0.0) + float(w)
        if abs(sum(weights.values()) - 1.0) > 1e-9:
            raise ValueError(f"mu sums to {sum(weights.values())}, not 1")
        q = np.asarray(Q)
        if q.ndim == 1:
            q = np.diag(q)
        self.Q = DensityOperator(q)
        if self.Q.dim != d:
            raise ValueError(f"Q has dimension {self.Q.dim}, expected {d}")
        self.d = d
        self.n = n
        self.mu = {m: weights[m] for m in ordered_subsets(n) if m in weights}
        lam, vecs = eig_hermitian(self.Q.matrix)
        self.q_eigs = np.clip(lam, 0.0, None)
        self.q_basis = vecs

    @classmethod
    def uniform(cls, d: int, n: int, Q) -> "AlignmentSpec":
        masks = range(1 << n)
        return cls(d, n, {m: 1.0 / (1 << n) for m in masks}, Q)

    @property
    def dim(self) -> int:
        return self.d**self.n

    @property
    def q1(self) -> np.ndarray:
        return self.q_basis[:, 0]


def _kron_all(ops, empty_dim=1):
    out = np.eye(empty_dim, dtype=complex) if not ops else ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def embed(op, mask: int, spec: AlignmentSpec) -> np.ndarray:
    """op on the qudits of ``mask`` (in increasing order) tensored with Q elsewhere."""
    n, d = spec.n, spec.d
    inside = subset_members(mask, n)
    outside = tuple(i for i in range(n) if i not in inside)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d ** len(inside),) * 2:
        raise ValueError(f"operator shape {op.shape} does not fit subset {inside}")
    full = np.kron(op, _kron_all([spec.Q.matrix] * len(outside)))
    order = inside + outside
    axes = [order.index(q) for q in range(n)]
    t = full.reshape((d,) * (2 * n)).transpose(axes + [a + n for a in axes])
    return t.reshape(spec.dim, spec.dim)


def _as_operator(state):
    s = np.asarray(state, dtype=complex)
    if s.ndim == 1:
        norm = np.linalg.norm(s)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state vector has norm {norm}")
        return np.outer(s, s.conj())
    return s


def alignment_operator(spec: AlignmentSpec, states: dict) -> np.ndarray:
    """sum_I mu_I rho_I ⊗ Q^{⊗ I^c}; states maps masks to unit vectors or density matrices."""
    out = np.zeros((spec.dim, spec.dim), dtype=complex)
    for mask, w in spec.mu.items():
        if mask == 0:
            rho = np.ones((1, 1), dtype=complex)
        else:
            rho = _as_operator(states[mask])
        out += w * embed(rho, mask, spec)
    return out


def optimal_tuple(spec: AlignmentSpec) -> dict:
    return {mask: _kron_all([spec.q1] * len(subset_members(mask, spec.n))) for mask in spec.mu if mask}


def conjectured_optimum(spec: AlignmentSpec) -> np.ndarray:
    """Alignment operator at |q1⟩^{⊗I} for every subset."""
    return alignment_operator(spec, optimal_tuple(spec))


def random_tuple(spec: AlignmentSpec, rng: np.random.Generator) -> dict:
    out = {}
    for mask in spec.mu:
        if mask:
            k = spec.d ** len(subset_members(mask, spec.n))
            v = rng.normal(size=k) + 1j * rng.normal(size=k)
            out[mask] = v / np.linalg.norm(v)
    return out


def singular_values(A) -> np.ndarray:
    a = np.asarray(getattr(A, "matrix", A), dtype=complex)
    if a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, atol=1e-10):
        return np.sort(np.abs(eigvals_hermitian(a)))[::-1]
    w = eigvals_hermitian(a.conj().T @ a)
    return np.sqrt(np.clip(w, 0.0, None))


def fan_norm(A, k: int) -> float:
    """Sum of the k largest singular values."""
    s = singular_values(A)
    if not 1 <= k <= s.size:
        raise ValueError(f"k must lie in 1..{s.size}, got {k}")
    return float(s[:k].sum())


def schatten_norm(A, p: float) -> float:
    if p < 1:
        raise ValueError(f"Schatten order must be at least 1, got {p}")
    s = singular_values(A)
    if math.isinf(p):
        return float(s[0])
    top = s[0]
    if top == 0.0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def _power_trace(A: np.ndarray, m: int) -> float:
    """tr(A^m) for PSD A, i.e. the m-th power of its Schatten m-norm."""
    return float(np.trace(np.linalg.matrix_power(A, m)).real)


@dataclass(frozen=True)
class SchattenReport:
    m: int
    trials: int
    violations: int
    max_ratio: float
    optimum_norm: float


def check_schatten_conjecture(spec: AlignmentSpec, m: int, trials: int, seed, tol: float = 1e-9) -> SchattenReport:
    """Compare random pure tuples against the aligned tuple in Schatten m-norm."""
    if m < 1 or int(m) != m:
        raise ValueError(f"m must be a positive integer, got {m}")
    rng = np.random.default_rng(seed)
    best = _power_trace(conjectured_optimum(spec), m) ** (1.0 / m)
    violations = 0
    max_ratio = 0.0
    for _ in range(trials):
        A = alignment_operator(spec, random_tuple(spec, rng))
        val = max(_power_trace(A, m), 0.0) ** (1.0 / m)
        if val > best + tol:
            violations += 1
        max_ratio = max(max_ratio, val / best)
    return SchattenReport(m, trials, violations, max_ratio, best)


def random_unit_trace_norm(k: int, rng: np.random.Generator) -> np.ndarray:
    """U diag(s) V^* with Haar-ish U, V and s on the probability simplex."""
    def unitary():
        z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    s = rng.dirichlet(np.ones(k))
    return (unitary() * s) @ unitary().conj().T


@dataclass(frozen=True)
class OverlapResult:
    value: float
    optimum: float

    @property
    def ok(self) -> bool:
        return self.value <= self.optimum + 1e-9


def overlap_trace(subsets, operators, spec: AlignmentSpec) -> OverlapResult:
    """|tr prod_j (R_j ⊗ Q^{⊗ I_j^c})| next to its value at the aligned tuple."""
    if len(subsets) != len(operators):
        raise ValueError("need one operator per subset")
    prod = np.eye(spec.dim, dtype=complex)
    best = np.eye(spec.dim, dtype=complex)
    for mask, R in zip(subsets, operators):
        k = len(subset_members(mask, spec.n))
        prod = prod @ embed(R if mask else np.ones((1, 1)), mask, spec)
        aligned = _kron_all([np.outer(spec.q1, spec.q1.conj())] * k) if k else np.ones((1, 1))
        best = best @ embed(aligned, mask, spec)
    return OverlapResult(float(abs(np.trace(prod))), float(np.trace(best).real))


@dataclass(frozen=True)
class OverlapReport:
    trials: int
    violations: int
    max_ratio: float


def check_overlap(spec: AlignmentSpec, subsets, trials: int, seed) -> OverlapReport:
    rng = np.random.default_rng(seed)
    violations = 0
    max_ratio = 0.0
    for _ in range(trials):
        ops = [random_unit_trace_norm(spec.d ** len(subset_members(m, spec.n)), rng) if m else np.ones((1, 1))
               for m in subsets]
        res = overlap_trace(subsets, ops, spec)
        violations += not res.ok
        if res.optimum > 0:
            max_ratio = max(max_ratio, res.value / res.optimum)
    return OverlapReport(trials, violations, max_ratio)


def classical_spectrum(spec: AlignmentSpec, assignment: dict) -> np.ndarray:
    """Spectrum of the alignment operator for basis strings t_I, as a vector over strings r.

    Basis index k of each qudit refers to Q's k-th eigenvector (descending).
    """
    n, d = spec.n, spec.d
    strings = np.array(list(itertools.product(range(d), repeat=n))).reshape(-1, n)
    out = np.zeros(len(strings))
    for mask, w in spec.mu.items():
        inside = subset_members(mask, n)
        outside = [i for i in range(n) if i not in inside]
        factor = np.prod(spec.q_eigs[strings[:, outside]], axis=1) if outside else np.ones(len(strings))
        if inside:
            t = np.asarray(assignment[mask])
            match = np.all(strings[:, list(inside)] == t, axis=1)
            factor = factor * match
        out += w * factor
    return out


@dataclass(frozen=True)
class ClassicalReport:
    assignments: int
    violations: int
    min_slack: float


def classical_exhaustive_check(spec: AlignmentSpec, budget: int = CLASSICAL_BUDGET) -> ClassicalReport:
    """Every classical pure tuple against the aligned one, in the majorization order."""
    masks = [m for m in spec.mu if m]
    sizes = [len(subset_members(m, spec.n)) for m in masks]
    total = math.prod(spec.d**k for k in sizes)
    if total > budget:
        raise ValueError(f"{total} classical assignments exceed the budget of {budget}")
    best = np.sort(classical_spectrum(spec, {m: (0,) * k for m, k in zip(masks, sizes)}))[::-1]
    best_prefix = np.cumsum(best)
    choices = [list(itertools.product(range(spec.d), repeat=k)) for k in sizes]
    violations = 0
    min_slack = math.inf
    for combo in itertools.product(*choices):
        spec_vec = classical_spectrum(spec, dict(zip(masks, combo)))
        if not majorizes(best, spec_vec):
            violations += 1
        slack = float(np.min(best_prefix - np.cumsum(np.sort(spec_vec)[::-1])))
        min_slack = min(min_slack, slack)
    return ClassicalReport(total, violations, min_slack)


@dataclass(frozen=True)
class ProjectorPair:
    d: int
    P1: np.ndarray
    P2: np.ndarray
    r1: int
    r2: int
    overlap: float

    def spectrum(self, s1: float, s2: float) -> np.ndarray:
        return eigvals_hermitian(s1 * self.P1 + s2 * self.P2)


def projector_overlap(P1, P2) -> float:
    """tr|P1 P2| computed as sum of sqrt(eig(P2 P1 P2))."""
    w = eigvals_hermitian(P2 @ P1 @ P2)
    # square roots amplify rounding noise around zero
    w[w < 1e-12] = 0.0
    return float(np.sqrt(w).sum())


def feasible_projector_pair(r1: int, r2: int, c: float, d: int) -> bool:
    return r1 + r2 - d <= math.floor(c)


def optimal_projector_pair(r1: int, r2: int, c: float, d: int) -> ProjectorPair:
    """Maximally aligned pair with ranks r1, r2 and tr|P1 P2| = c.

    floor(c) shared basis vectors, one two-dimensional block with overlap
    c - floor(c) when c is fractional, and mutually orthogonal leftovers.
    """
    if not (0 <= r1 <= d and 0 <= r2 <= d):
        raise ValueError("ranks must lie in 0..d")
    if c < 0 or c > min(r1, r2) + 1e-12:
        raise ValueError(f"overlap c = {c} must lie in [0, min(r1, r2)]")
    if not feasible_projector_pair(r1, r2, c, d):
        raise ValueError(f"no pair of ranks {r1}, {r2} in dimension {d} has overlap at most {c}")
    whole = int(math.floor(c + 1e-12))
    frac = max(c - whole, 0.0)
    if frac < 1e-12:
        frac = 0.0
    e = np.eye(d)
    p1_vecs = [e[k] for k in range(whole)]
    p2_vecs = [e[k] for k in range(whole)]
    k = whole
    if frac > 0.0:
        p1_vecs.append(e[k])
        p2_vecs.append(frac * e[k] + math.sqrt(1.0 - frac * frac) * e[k + 1])
        k += 2
    for _ in range(r1 - len(p1_vecs)):
        p1_vecs.append(e[k])
        k += 1
    for _ in range(r2 - len(p2_vecs)):
        p2_vecs.append(e[k])
        k += 1
    P1 = _projector(p1_vecs, d)
    P2 = _projector(p2_vecs, d)
    return ProjectorPair(d, P1, P2, r1, r2, projector_overlap(P1, P2))


def _projector(vecs, d):
    if not vecs:
        return np.zeros((d, d), dtype=complex)
    v = np.array(vecs, dtype=complex).T
    return v @ v.conj().T


def _haar_frame(d, r, rng):
    z = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    q, _ = np.linalg.qr(z)
    return q


def random_g_member(r1: int, r2: int, c: float, d: int, rng: np.random.Generator, exact: bool = False) -> ProjectorPair:
    """Random pair with ranks r1, r2 and tr|P1 P2| <= c.

    Haar subspaces are drawn, then the principal cosines not forced to equal
    1 are moved together to reach a target overlap: scaled down by a common
    factor, or pushed up by shrinking 1 - cos by a common factor. With
    ``exact`` the target is c itself.
    """
    if not feasible_projector_pair(r1, r2, c, d):
        raise ValueError("infeasible parameters")
    U1 = _haar_frame(d, r1, rng)
    U2 = _haar_frame(d, r2, rng)
    if r1 == 0 or r2 == 0:
        return ProjectorPair(d, U1 @ U1.conj().T, U2 @ U2.conj().T, r1, r2, 0.0)
    L, cos, Rh = np.linalg.svd(U1.conj().T @ U2)
    A = U1 @ L  # principal vectors of the first subspace
    B = U2 @ Rh.conj().T  # principal vectors of the second
    cos = np.clip(cos, 0.0, 1.0)
    forced = max(r1 + r2 - d, 0)
    kmax = len(cos)
    free = np.arange(forced, kmax)
    free_sum = float(cos[free].sum())
    target = (c if exact else forced + rng.random() * (c - forced)) - forced
    if target <= free_sum:
        # shrink every free cosine by a common factor
        scale = 1.0 if free_sum <= 0.0 else target / free_sum
        new_cos = cos[free] * scale
    else:
        # shrink every free sine-gap 1 - cos by a common factor
        room = free.size - free_sum
        new_cos = 1.0 - (1.0 - cos[free]) * ((free.size - target) / room)
    B = B.copy()
    for k, new in zip(free, new_cos):
        ck = cos[k]
        if ck >= 1.0 - 1e-12:
            continue
        w = (B[:, k] - ck * A[:, k]) / math.sqrt(1.0 - ck * ck)
        new = min(max(float(new), 0.0), 1.0)
        B[:, k] = new * A[:, k] + math.sqrt(1.0 - new * new) * w
    P1 = A @ A.conj().T
    P2 = B @ B.conj().T
    return ProjectorPair(d, P1, P2, r1, r2, projector_overlap(P1, P2))


def two_projector_spectrum(s1: float, s2: float, overlaps, counts=(0, 0, 0, 0)) -> np.ndarray:
    """Spectrum of s1 P1 + s2 P2 from its Jordan decomposition.

    Each overlap |⟨α|β⟩| gives one two-dimensional block; counts holds the
    numbers of one-dimensional blocks in both ranges, the first only, the
    second only, and neither.
    """
    if s1 < 0 or s2 < 0:
        raise ValueError("weights must be nonnegative")
    o = np.asarray(overlaps, dtype=float).reshape(-1)
    if np.any(o < 0) or np.any(o > 1):
        raise ValueError("overlaps must lie in [0, 1]")
    both, first, second, none = counts
    root = np.sqrt((s1 - s2) ** 2 + 4.0 * s1 * s2 * o**2)
    vals = np.concatenate([
        0.5 * (s1 + s2 + root),
        0.5 * (s1 + s2 - root),
        np.full(both, s1 + s2),
        np.full(first, float(s1)),
        np.full(second, float(s2)),
        np.zeros(none),
    ])
    return np.sort(vals)[::-1]


S_GRID = ((1.0, 1.0), (2.0, 1.0), (1.0, 3.0))


@dataclass(frozen=True)
class DominanceReport:
    samples: int
    violations: int
    overlap: float
    max_member_overlap: float


def check_projector_dominance(r1: int, r2: int, c: float, d: int, samples: int, seed, s_grid=S_GRID) -> DominanceReport:
    rng = np.random.default_rng(seed)
    opt = optimal_projector_pair(r1, r2, c, d)
    opt_spectra = {s: opt.spectrum(*s) for s in s_grid}
    violations = 0
    worst = 0.0
    for k in range(samples):
        pair = random_g_member(r1, r2, c, d, rng, exact=k % 4 == 0)
        worst = max(worst, pair.overlap)
        for s in s_grid:
            if not majorizes(opt_spectra[s], pair.spectrum(*s)):
                violations += 1
                break
    return DominanceReport(samples, violations, opt.overlap, worst)
