"""Cyclic Jacobi eigensolver for small Hermitian matrices."""

from __future__ import annotations

import numpy as np

MAX_DIM = 64
MAX_SWEEPS = 64
HERMITIAN_TOL = 1e-10


class NotHermitianError(ValueError):
    pass


def _check_hermitian(h: np.ndarray) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {h.shape[0]} exceeds {MAX_DIM}")
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not conjugate-symmetric")


def _sweep(a: np.ndarray, v: np.ndarray | None, n: int, negligible: float) -> None:
    for p in range(n - 1):
        for q in range(p + 1, n):
            z = a[p, q]
            az = abs(z)
            if az <= negligible:
                a[p, q] = 0.0
                a[q, p] = 0.0
                continue
            app = a[p, p].real
            aqq = a[q, q].real
            phase = z / az
            # real 2x2 problem [[app, az], [az, aqq]] after a phase shift on column q
            theta = (aqq - app) / (2.0 * az)
            t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
            if theta < 0.0:
                t = -t
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # U restricted to (p, q) is [[c, s], [-s*conj(phase), c*conj(phase)]]
            # conj(phase) on row q makes the (p, q) entry real before rotating
            u_pp = c
            u_pq = s
            u_qp = -s * phase.conjugate()
            u_qq = c * phase.conjugate()
            col_p = a[:, p].copy()
            col_q = a[:, q]
            a[:, p] = col_p * u_pp + col_q * u_qp
            a[:, q] = col_p * u_pq + col_q * u_qq
            row_p = a[p, :].copy()
            row_q = a[q, :]
            a[p, :] = np.conj(u_pp) * row_p + np.conj(u_qp) * row_q
            a[q, :] = np.conj(u_pq) * row_p + np.conj(u_qq) * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * az
            a[q, q] = aqq + t * az
            if v is not None:
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = vp * u_pp + vq * u_qp
                v[:, q] = vp * u_pq + vq * u_qq


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diagonal(a))
    return float(np.linalg.norm(off))


def _jacobi(h: np.ndarray, vectors: bool, tol: float):
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if vectors else None
    norm = float(np.linalg.norm(a))
    if n > 1 and norm > 0.0:
        target = tol * norm
        for _ in range(MAX_SWEEPS):
            if _off_norm(a) <= target:
                break
            _sweep(a, v, n, 1e-30 * norm)
        else:
            raise RuntimeError("Jacobi iteration did not converge")
    w = np.diagonal(a).real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if v is not None:
        v = v[:, order]
    return w, v


def eig_hermitian(h, tol: float = 1e-13) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix with cyclic Jacobi sweeps.

    Iterates until the off-diagonal Frobenius mass is at most ``tol`` times
    the Frobenius norm of ``h``.

    Returns:
        (eigenvalues, eigenvectors): eigenvalues sorted descending and a
        unitary whose columns are the matching eigenvectors, so that
        ``h = V @ diag(w) @ V^*``.
    """
    h = np.asarray(getattr(h, "matrix", h))
    _check_hermitian(h)
    return _jacobi(h, True, tol)


def eigvals_hermitian(h, tol: float = 1e-13) -> np.ndarray:
    """Eigenvalues only (descending); skips accumulating the rotations."""
    h = np.asarray(getattr(h, "matrix", h))
    _check_hermitian(h)
    return _jacobi(h, False, tol)[0]
