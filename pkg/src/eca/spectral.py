"""Sorted eigendecomposition with a sign convention, angle and subspace
metrics, and Davis-Kahan bound evaluation.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NumericError

SIGN_TOL = 1e-12


class EigenResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def fix_signs(V: np.ndarray, tol: float = SIGN_TOL) -> np.ndarray:
    """Flip columns so the first entry with |.| > tol is positive."""
    V = np.array(V, dtype=float, copy=True)
    single = V.ndim == 1
    if single:
        V = V[:, None]
    for j in range(V.shape[1]):
        nz = np.flatnonzero(np.abs(V[:, j]) > tol)
        if nz.size and V[nz[0], j] < 0:
            V[:, j] = -V[:, j]
    return V[:, 0] if single else V


def _check_sym(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix has non-finite entries")
    return M


def eigh_sorted(M) -> EigenResult:
    """Eigenvalues in descending order with sign-normalized eigenvectors."""
    M = _check_sym(M)
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return EigenResult(w[::-1].copy(), fix_signs(V[:, ::-1]))


def eca_leading(K, m: int = 1) -> np.ndarray:
    """First ``m`` eigenvectors (columns) of K."""
    K = _check_sym(K)
    if not 1 <= m <= K.shape[0]:
        raise ValueError(f"m must be in [1, {K.shape[0]}]")
    return eigh_sorted(K).vectors[:, :m]


def spectral_norm(M) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(_check_sym(M)))))


def _unit(v, name) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-8:
        raise ValueError(f"{name} must have unit norm (got {np.linalg.norm(v):.3g})")
    return v


def sin_angle(u, v) -> float:
    """|sin| of the angle between unit vectors; sign-invariant.

    Uses ``sqrt(1 - c^2) = |u - v| |u + v| / 2``, which keeps full precision
    for nearly parallel vectors.
    """
    u, v = _unit(u, "u"), _unit(v, "v")
    val = np.linalg.norm(u - v) * np.linalg.norm(u + v) / 2.0
    return float(min(1.0, val))


def projector(U) -> np.ndarray:
    """Orthogonal projector onto the span of the orthonormal columns of U."""
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    P = U @ U.T
    return 0.5 * (P + P.T)


def subspace_frobenius_dist(P1, P2) -> float:
    P1, P2 = np.asarray(P1, dtype=float), np.asarray(P2, dtype=float)
    if P1.shape != P2.shape:
        raise ValueError(f"dimension mismatch: {P1.shape} vs {P2.shape}")
    return float(np.linalg.norm(P1 - P2, "fro"))


def davis_kahan_rhs(Khat, Kref, m: int = 1) -> float:
    """Right-hand side of the Davis-Kahan bound for the top-m eigenspace.

    ``2 ||Khat - Kref||_2 / gap`` for m = 1 and
    ``2 sqrt(2m) ||Khat - Kref||_2 / gap`` otherwise, with
    ``gap = lambda_m(Kref) - lambda_{m+1}(Kref)``.
    """
    Khat, Kref = _check_sym(Khat), _check_sym(Kref)
    lam = np.linalg.eigvalsh(Kref)[::-1]
    if not 1 <= m < lam.size:
        raise ValueError(f"m must be in [1, {lam.size - 1}]")
    gap = lam[m - 1] - lam[m]
    if gap <= 0:
        raise NumericError("reference matrix has zero eigengap at m")
    c = 2.0 if m == 1 else 2.0 * np.sqrt(2.0 * m)
    return c * spectral_norm(Khat - Kref) / gap
