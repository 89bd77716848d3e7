"""Finite probability measures, entropies and the block-permutation symmetry."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

CLAMP_TOL = 1e-12
SUM_TOL = 1e-9


class InvalidDistribution(ValueError):
    pass


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def _validated(values, ndim: int) -> np.ndarray:
    a = np.asarray(values)
    if a.dtype != object:
        a = np.array(a, dtype=float)
    else:
        a = a.copy()
    if a.ndim != ndim:
        raise InvalidDistribution(f"expected a {ndim}-d array, got shape {a.shape}")
    if a.size == 0:
        raise InvalidDistribution("empty distribution")
    if _is_exact(a):
        flat = a.reshape(-1)
        for k, v in enumerate(flat):
            if not isinstance(v, (int, Fraction)):
                raise InvalidDistribution("exact mode needs int or Fraction entries")
            if v < 0:
                raise InvalidDistribution(f"negative entry {v}")
            flat[k] = Fraction(v)
        if sum(flat) != 1:
            raise InvalidDistribution(f"entries sum to {sum(flat)}, not 1")
        return a
    if not np.all(np.isfinite(a)):
        raise InvalidDistribution("non-finite entry")
    if np.any(a < -CLAMP_TOL):
        raise InvalidDistribution(f"entry {a.min()} is negative")
    a[a < 0] = 0.0
    total = a.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"entries sum to {total}, not 1")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector on a finite alphabet."""

    probs: np.ndarray

    def __init__(self, probs):
        object.__setattr__(self, "probs", _validated(probs, 1))

    def __len__(self):
        return len(self.probs)

    @classmethod
    def uniform(cls, d: int) -> "Distribution":
        return cls(np.full(d, 1.0 / d))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint measure on X×Y stored as an |X|×|Y| grid (rows x, columns y).

    Entries may be floats, or Fractions for exact bookkeeping.
    """

    probs: np.ndarray

    def __init__(self, probs):
        a = _validated(probs, 2)
        if a.shape[0] < 2 or a.shape[1] < 2:
            raise InvalidDistribution(f"both alphabets need at least 2 symbols, got {a.shape}")
        object.__setattr__(self, "probs", a)

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    @property
    def size_x(self) -> int:
        return self.probs.shape[0]

    @property
    def size_y(self) -> int:
        return self.probs.shape[1]

    @property
    def exact(self) -> bool:
        return _is_exact(self.probs)

    def marginal_x(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal_y(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def as_float(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.probs == other.probs))

    def __hash__(self):
        return hash((self.shape, tuple(self.as_float().ravel())))


@dataclass(frozen=True)
class BlockPermutation:
    """Element of S_{X|Y}.

    ``y_perm[j]`` is the destination column of column ``j``; ``x_perms[j][i]``
    is the destination row of entry ``(i, j)`` inside that column.
    """

    y_perm: tuple
    x_perms: tuple

    def __post_init__(self):
        y = tuple(int(v) for v in self.y_perm)
        xs = tuple(tuple(int(v) for v in xp) for xp in self.x_perms)
        if sorted(y) != list(range(len(y))):
            raise ValueError(f"y_perm {y} is not a permutation")
        if len(xs) != len(y):
            raise ValueError("need one x permutation per y symbol")
        for xp in xs:
            if sorted(xp) != list(range(len(xs[0]))):
                raise ValueError(f"x permutation {xp} is not a permutation")
        object.__setattr__(self, "y_perm", y)
        object.__setattr__(self, "x_perms", xs)

    @classmethod
    def identity(cls, dx: int, dy: int) -> "BlockPermutation":
        return cls(tuple(range(dy)), tuple(tuple(range(dx)) for _ in range(dy)))

    @classmethod
    def random(cls, dx: int, dy: int, rng: np.random.Generator) -> "BlockPermutation":
        return cls(tuple(rng.permutation(dy)), tuple(tuple(rng.permutation(dx)) for _ in range(dy)))


def _xlogx_sum(v) -> float:
    total = 0.0
    for x in v:
        x = float(x)
        if x > 0.0:
            total -= x * math.log2(x)
    return total


def shannon_entropy(p) -> float:
    """Entropy in bits; zero-probability symbols contribute nothing."""
    probs = p.probs if isinstance(p, (Distribution, JointDistribution)) else _validated(p, np.ndim(p))
    return max(0.0, _xlogx_sum(np.ravel(probs)))


def binary_entropy(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def conditional_entropy(p: JointDistribution) -> float:
    """H(X|Y) = sum_j p_Y(j) H(X|Y=j); empty columns contribute zero."""
    grid = p.probs
    total = 0.0
    for j in range(grid.shape[1]):
        col = [float(v) for v in grid[:, j]]
        py = sum(col)
        if py <= 0.0:
            continue
        h = 0.0
        for v in col:
            if v > 0.0:
                r = v / py
                h -= r * math.log2(r)
        total += py * h
    return max(0.0, total)


def conditional_entropy_batch(grids: np.ndarray) -> np.ndarray:
    """Vectorized H(X|Y) for a stack of float grids of shape (n, dX, dY)."""
    g = np.asarray(grids, dtype=float)
    py = g.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        hxy = -np.where(g > 0, g * np.log2(np.where(g > 0, g, 1.0)), 0.0).sum(axis=(1, 2))
        hy = -np.where(py > 0, py * np.log2(np.where(py > 0, py, 1.0)), 0.0).sum(axis=1)
    return np.maximum(hxy - hy, 0.0)


def tv_distance(p: JointDistribution, q: JointDistribution) -> float:
    a = p.probs if hasattr(p, "probs") else np.asarray(p)
    b = q.probs if hasattr(q, "probs") else np.asarray(q)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if _is_exact(a) and _is_exact(b):
        return sum(abs(x - y) for x, y in zip(a.ravel(), b.ravel())) / 2
    return 0.5 * float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).sum())


def apply_block_permutation(p: JointDistribution, g: BlockPermutation) -> JointDistribution:
    dx, dy = p.shape
    if len(g.y_perm) != dy or len(g.x_perms[0]) != dx:
        raise ValueError("permutation does not match the distribution shape")
    src = p.probs
    out = np.empty_like(src)
    for j in range(dy):
        for i in range(dx):
            out[g.x_perms[j][i], g.y_perm[j]] = src[i, j]
    return JointDistribution(out)
