"""Density operators on small bipartite systems, conditional entropy and continuity bounds."""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .eigen import MAX_DIM, NotHermitianError, eig_hermitian, eigvals_hermitian
from .prob import binary_entropy

HERMITIAN_TOL = 1e-10
EIG_CLAMP = 1e-8
TRACE_TOL = 1e-9


class InvalidState(ValueError):
    pass


class HermitianOperator:
    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
        scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
            raise NotHermitianError("matrix is not conjugate-symmetric")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return eigvals_hermitian(self.matrix)


class DensityOperator(HermitianOperator):
    """Hermitian, positive semidefinite, unit trace (small negative eigenvalues clamp to 0)."""

    def __init__(self, matrix):
        super().__init__(matrix)
        tr = float(np.trace(self.matrix).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace is {tr}, not 1")
        if self.eigenvalues[-1] < -EIG_CLAMP:
            raise InvalidState(f"eigenvalue {self.eigenvalues[-1]} is negative")

    @cached_property
    def spectrum(self) -> np.ndarray:
        w = self.eigenvalues.copy()
        w[w < 0] = 0.0
        return w


class BipartiteState(DensityOperator):
    """State on A⊗B with basis index a*dB + b."""

    def __init__(self, matrix, dA: int, dB: int):
        super().__init__(matrix)
        if dA < 1 or dB < 1 or dA * dB != self.dim:
            raise InvalidState(f"factor dimensions {dA}x{dB} do not match {self.dim}")
        self.dA = dA
        self.dB = dB

    def reduced(self, keep: str = "B") -> DensityOperator:
        return DensityOperator(partial_trace(self.matrix, self.dA, self.dB, keep))


def partial_trace(matrix, dA: int, dB: int, keep: str = "B") -> np.ndarray:
    t = np.asarray(matrix).reshape(dA, dB, dA, dB)
    if keep == "B":
        return np.einsum("abad->bd", t)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _entropy_of_spectrum(w) -> float:
    total = 0.0
    for x in w:
        if x > 0.0:
            total -= x * math.log2(x)
    return max(0.0, total)


def von_neumann_entropy(rho) -> float:
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    return _entropy_of_spectrum(rho.spectrum)


def conditional_vn_entropy(rho: BipartiteState) -> float:
    """H(A|B) = H(AB) - H(B); negative for entangled states."""
    return von_neumann_entropy(rho) - von_neumann_entropy(rho.reduced("B"))


def trace_distance(rho, sigma) -> float:
    a = getattr(rho, "matrix", rho)
    b = getattr(sigma, "matrix", sigma)
    if np.shape(a) != np.shape(b):
        raise ValueError(f"dimension mismatch {np.shape(a)} vs {np.shape(b)}")
    w = eigvals_hermitian(np.asarray(a) - np.asarray(b))
    return 0.5 * float(np.abs(w).sum())


def _check_eps(epsilon):
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return epsilon


def winter_bound(epsilon: float, dA: int) -> float:
    """2 eps log2(dA) + (1 + eps) h(eps / (1 + eps))."""
    epsilon = _check_eps(epsilon)
    if dA < 1:
        raise ValueError("dimension must be positive")
    return 2.0 * epsilon * math.log2(dA) + (1.0 + epsilon) * binary_entropy(epsilon / (1.0 + epsilon))


def wilde_bound(epsilon: float, d: int) -> float:
    """eps log2(d^2 - 1) + h(eps), capped at 2 log2(d) past eps = 1 - 1/d^2."""
    epsilon = _check_eps(epsilon)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if epsilon >= 1.0 - 1.0 / d**2:
        return 2.0 * math.log2(d)
    return epsilon * math.log2(d * d - 1) + binary_entropy(epsilon)


class MaxEntangledBasis:
    def __init__(self, d: int, vectors):
        v = np.array(vectors, dtype=complex)
        if v.shape != (d * d, d * d):
            raise ValueError(f"expected {d * d} vectors of length {d * d}")
        self.d = d
        # row k is the k-th basis vector
        self.vectors = v

    def __len__(self):
        return self.d * self.d

    def projector(self, k: int) -> np.ndarray:
        v = self.vectors[k]
        return np.outer(v, v.conj())


def max_entangled_vector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1.0 / math.sqrt(d)
    return v


def shift_clock(d: int):
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return shift, clock


def bell_basis(d: int) -> MaxEntangledBasis:
    """Vectors (X^a Z^b ⊗ 1)|Φ⟩ for a, b in 0..d-1, listed with a major."""
    if not 2 <= d <= 8:
        raise ValueError(f"d must lie in 2..8, got {d}")
    phi = max_entangled_vector(d)
    shift, clock = shift_clock(d)
    vecs = []
    for a in range(d):
        for b in range(d):
            local = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            vecs.append(np.kron(local, np.eye(d)) @ phi)
    return MaxEntangledBasis(d, vecs)


def pinch_operator(matrix, basis: MaxEntangledBasis) -> np.ndarray:
    """sum_k |φ_k⟩⟨φ_k| ⟨φ_k|M|φ_k⟩ for any square operator M."""
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (basis.d**2, basis.d**2):
        raise ValueError(f"operator shape {m.shape} does not match basis dimension {basis.d**2}")
    v = basis.vectors
    weights = np.einsum("ki,ij,kj->k", v.conj(), m, v)
    return (v.T * weights) @ v.conj()


def pinch(rho: BipartiteState, basis: MaxEntangledBasis) -> BipartiteState:
    if rho.dA != basis.d or rho.dB != basis.d:
        raise ValueError("state and basis dimensions differ")
    return BipartiteState(pinch_operator(rho.matrix, basis), rho.dA, rho.dB)


def isotropic_pair(d: int, epsilon: float):
    """(Φ, (1-eps) Φ + eps/(d^2-1) (1 - Φ)) on C^d ⊗ C^d."""
    epsilon = _check_eps(epsilon)
    if epsilon > 1.0 - 1.0 / d**2 + 1e-12:
        raise ValueError(f"epsilon must not exceed 1 - 1/d^2 = {1 - 1 / d**2}")
    phi = max_entangled_vector(d)
    proj = np.outer(phi, phi.conj())
    mixed = (1.0 - epsilon) * proj + epsilon / (d * d - 1) * (np.eye(d * d) - proj)
    return BipartiteState(proj, d, d), BipartiteState(mixed, d, d)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Wishart-style G G^* / tr(G G^*) with a dim x rank complex Gaussian G."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_bell_diagonal(d: int, rng: np.random.Generator, basis: MaxEntangledBasis | None = None) -> np.ndarray:
    basis = basis or bell_basis(d)
    w = rng.dirichlet(np.ones(d * d) * rng.choice([0.3, 1.0]))
    v = basis.vectors
    return (v.T * w) @ v.conj()


def random_state_pair(dA: int, dB: int, rng: np.random.Generator):
    """Two states drawn from a mix of pure, full-rank, low-rank and nearby pairs."""
    dim = dA * dB
    kind = rng.integers(4)
    if kind == 0:
        v = random_pure_state(dim, rng)
        rho = np.outer(v, v.conj())
    else:
        rho = random_density(dim, rng, rank=int(rng.integers(1, dim + 1)))
    if kind == 3:
        lam = rng.random() ** 2
        sigma = (1.0 - lam) * rho + lam * random_density(dim, rng)
    else:
        sigma = random_density(dim, rng, rank=int(rng.integers(1, dim + 1)))
    return BipartiteState(rho, dA, dB), BipartiteState(sigma, dA, dB)


def eig_decompose(h):
    """Spectral decomposition through the Jacobi solver (descending order)."""
    return eig_hermitian(getattr(h, "matrix", h))
