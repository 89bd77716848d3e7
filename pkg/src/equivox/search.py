"""Seeded random searches for bound violations.

Trials are split into fixed-size chunks. Chunk k draws from PCG64 seeded by
SeedSequence(seed, spawn_key=(k,)), so a report depends only on the seed and
the configuration, never on how many worker processes ran the chunks.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import quantum as qm
from . import spinalign as sa
from .prob import conditional_entropy_batch

CHUNK = 1000
KINDS = ("classical", "winter", "wilde", "schatten", "overlap")
# conjectures are reported, never counted as failures
PROVEN = {"classical", "winter", "schatten", "overlap"}


@dataclass
class SearchConfig:
    kind: str
    trials: int
    seed: int
    tolerance: float = 1e-9
    dx: int = 3
    dy: int = 3
    dA: int = 2
    dB: int = 2
    spec: object = None
    m: int = 2
    top: int = 20

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown search kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind == "classical" and (self.dx < 2 or self.dy < 2):
            raise ValueError("classical search needs dx, dy >= 2")
        if self.kind in ("winter", "wilde") and (self.dA < 2 or self.dB < 2):
            raise ValueError("quantum search needs dA, dB >= 2")
        if self.kind == "wilde" and self.dA != self.dB:
            raise ValueError("the Wilde search is defined for dA = dB only")
        if self.kind in ("schatten", "overlap") and self.spec is None:
            raise ValueError(f"{self.kind} search needs an alignment spec")
        if self.m < 1:
            raise ValueError("Schatten order must be positive")


@dataclass
class SearchResult:
    config: SearchConfig
    violations: int = 0
    min_slack: float = math.inf
    rows: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.config.kind in PROVEN and self.violations > 0

    def summary(self) -> dict:
        return {
            "kind": self.config.kind,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "proven": self.config.kind in PROVEN,
        }


def chunk_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def bound_conditional_vec(eps: np.ndarray, dx: int) -> np.ndarray:
    e = np.clip(eps, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(e > 0, e * np.log2(np.where(e > 0, e, 1.0)), 0.0) - np.where(
            e < 1, (1 - e) * np.log2(np.where(e < 1, 1 - e, 1.0)), 0.0
        )
    val = e * math.log2(dx - 1) + h
    return np.where(e > 1.0 - 1.0 / dx, math.log2(dx), val)


def random_joint_pairs(n: int, dx: int, dy: int, rng: np.random.Generator):
    """n pairs of dx-by-dy joint distributions from a mix of generators.

    Dense and sparse Dirichlet draws, close perturbations, and block
    permutations of the first measure slightly perturbed.
    """
    k = dx * dy
    alpha = np.where(rng.random(n) < 0.5, 1.0, 0.3)[:, None]
    p = rng.gamma(np.broadcast_to(alpha, (n, k)))
    p /= p.sum(axis=1, keepdims=True)
    r = rng.gamma(np.broadcast_to(alpha, (n, k)))
    r /= r.sum(axis=1, keepdims=True)
    kind = rng.integers(0, 4, size=n)
    lam = (rng.random(n) ** 3)[:, None]
    near = (1 - lam) * p + lam * r
    grid = p.reshape(n, dx, dy)
    cols = rng.random((n, dy)).argsort(axis=1)
    rows = rng.random((n, dx, dy)).argsort(axis=1)
    perm = np.take_along_axis(grid, cols[:, None, :].repeat(dx, axis=1), axis=2)
    perm = np.take_along_axis(perm, rows, axis=1).reshape(n, k)
    perm = (1 - lam) * perm + lam * r
    q = np.where((kind == 0)[:, None], r, np.where((kind == 1)[:, None], near, np.where((kind == 2)[:, None], perm, r)))
    return p.reshape(n, dx, dy), q.reshape(n, dx, dy)


def _classical_chunk(cfg: SearchConfig, k: int, n: int):
    rng = chunk_rng(cfg.seed, k)
    p, q = random_joint_pairs(n, cfg.dx, cfg.dy, rng)
    eps = 0.5 * np.abs(p - q).sum(axis=(1, 2))
    gap = np.abs(conditional_entropy_batch(p) - conditional_entropy_batch(q))
    bound = bound_conditional_vec(eps, cfg.dx)
    return list(zip(eps.tolist(), gap.tolist(), bound.tolist()))


def _quantum_chunk(cfg: SearchConfig, k: int, n: int):
    rng = chunk_rng(cfg.seed, k)
    out = []
    for _ in range(n):
        rho, sigma = qm.random_state_pair(cfg.dA, cfg.dB, rng)
        eps = min(qm.trace_distance(rho, sigma), 1.0)
        gap = abs(qm.conditional_vn_entropy(rho) - qm.conditional_vn_entropy(sigma))
        if cfg.kind == "winter":
            bound = qm.winter_bound(eps, cfg.dA)
        else:
            bound = qm.wilde_bound(eps, cfg.dA)
        out.append((eps, gap, bound))
    return out


def _schatten_chunk(cfg: SearchConfig, k: int, n: int):
    rng = chunk_rng(cfg.seed, k)
    best = sa._power_trace(sa.conjectured_optimum(cfg.spec), cfg.m) ** (1.0 / cfg.m)
    out = []
    for _ in range(n):
        A = sa.alignment_operator(cfg.spec, sa.random_tuple(cfg.spec, rng))
        val = max(sa._power_trace(A, cfg.m), 0.0) ** (1.0 / cfg.m)
        out.append((None, val, best))
    return out


def _overlap_chunk(cfg: SearchConfig, k: int, n: int):
    rng = chunk_rng(cfg.seed, k)
    spec = cfg.spec
    masks = list(spec.mu) or [0]
    out = []
    for _ in range(n):
        ell = int(rng.integers(1, 5))
        subsets = [masks[int(rng.integers(len(masks)))] for _ in range(ell)]
        ops = [
            sa.random_unit_trace_norm(spec.d ** len(sa.subset_members(m, spec.n)), rng) if m else np.ones((1, 1))
            for m in subsets
        ]
        res = sa.overlap_trace(subsets, ops, spec)
        out.append((None, res.value, res.optimum))
    return out


_RUNNERS = {
    "classical": _classical_chunk,
    "winter": _quantum_chunk,
    "wilde": _quantum_chunk,
    "schatten": _schatten_chunk,
    "overlap": _overlap_chunk,
}


def _run_chunk(args):
    cfg, k, n = args
    return k, _RUNNERS[cfg.kind](cfg, k, n)


def worker_count() -> int:
    raw = os.environ.get("EQUIVOX_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_search(cfg: SearchConfig, workers: int | None = None) -> SearchResult:
    workers = worker_count() if workers is None else max(1, workers)
    sizes = [CHUNK] * (cfg.trials // CHUNK)
    if cfg.trials % CHUNK:
        sizes.append(cfg.trials % CHUNK)
    jobs = [(cfg, k, n) for k, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            chunks = dict(pool.map(_run_chunk, jobs))
    else:
        chunks = dict(map(_run_chunk, jobs))
    result = SearchResult(cfg)
    heap = []
    for k in range(len(sizes)):
        for i, (eps, gap, bound) in enumerate(chunks[k]):
            trial = k * CHUNK + i
            slack = bound - gap
            if slack < -cfg.tolerance:
                result.violations += 1
            result.min_slack = min(result.min_slack, slack)
            item = (-slack, -trial, eps, gap, bound)
            if len(heap) < cfg.top:
                heapq.heappush(heap, item)
            elif item > heap[0]:
                heapq.heapreplace(heap, item)
    ordered = sorted(heap, key=lambda it: (-it[0], -it[1]))
    result.rows = [
        {"seed": f"{cfg.seed}:{-t}", "epsilon": e, "gap": g, "bound": b, "slack": -s}
        for s, t, e, g, b in ordered
    ]
    return result
