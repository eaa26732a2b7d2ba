"""Fantope-constrained, l1-penalized principal subspace estimation.

Solves

    max <K, M> - lam * sum_jk |M_jk|   s.t.   0 <= M <= I,  tr(M) = m

by ADMM on the split M = Z: the M-step is a Euclidean projection onto the
Fantope, the Z-step an entrywise soft-threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import _check_sym, eigh_sorted, projector


@dataclass(frozen=True)
class FantopeParams:
    """ADMM settings. ``rho=None`` uses the top eigenvalue of the input, which
    makes the iteration count invariant to the scale of K."""

    lam: float = 0.0
    m: int = 1
    rho: float | None = None
    tol_primal: float = 1e-6
    tol_dual: float = 1e-6
    max_iter: int = 2000

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("tolerances must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class FantopeSolution:
    X_m: np.ndarray
    X_hat: np.ndarray
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    ambiguous: bool = False


def default_lambda(K, n: int) -> float:
    """Penalty on the scale ``||K||_max * sqrt(log d / n)``."""
    K = np.asarray(K, dtype=float)
    d = K.shape[0]
    return float(np.max(np.abs(K)) * np.sqrt(np.log(max(d, 2)) / n))


def _capped_shift(lam: np.ndarray, m: int, max_steps: int = 200) -> float:
    """theta with sum(clip(lam - theta, 0, 1)) == m."""

    def total(theta):
        return np.clip(lam - theta, 0.0, 1.0).sum()

    lo, hi = lam.min() - 1.0, lam.max()
    # total(lo) = d >= m and total(hi) = 0 < m
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
            break
        if total(mid) > m:
            lo = mid
        else:
            hi = mid
    else:
        raise AssertionError("Fantope bisection did not converge in %d steps" % max_steps)
    theta = 0.5 * (lo + hi)
    # the map is affine on the active set; finish exactly there
    shifted = lam - theta
    free = (shifted > 0) & (shifted < 1)
    if free.any():
        n_top = np.count_nonzero(shifted >= 1)
        theta = (lam[free].sum() + n_top - m) / free.sum()
    return float(theta)


def fantope_project(A, m: int) -> np.ndarray:
    """Frobenius-nearest point of the rank-m Fantope to the symmetric A."""
    A = _check_sym(A)
    d = A.shape[0]
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}]")
    w, U = np.linalg.eigh(0.5 * (A + A.T))
    theta = _capped_shift(w, m)
    gamma = np.clip(w - theta, 0.0, 1.0)
    P = (U * gamma) @ U.T
    return 0.5 * (P + P.T)


def round_to_projector(X, m: int):
    """Rank-m projector onto the top-m eigenvectors of X.

    Returns ``(P, ambiguous)``; ``ambiguous`` flags a tie between the m-th and
    (m+1)-th eigenvalues, where the subspace is not unique.
    """
    X = _check_sym(X)
    if not 1 <= m <= X.shape[0]:
        raise ValueError(f"m must be in [1, {X.shape[0]}]")
    vals, vecs = eigh_sorted(X)
    ambiguous = m < vals.size and np.isclose(vals[m - 1], vals[m], rtol=0, atol=1e-12)
    return projector(vecs[:, :m]), bool(ambiguous)


def soft_threshold(A, t: float) -> np.ndarray:
    return np.sign(A) * np.maximum(np.abs(A) - t, 0.0)


def fantope_objective(K, M, lam: float) -> float:
    return float(np.sum(K * M) - lam * np.abs(M).sum())


def solve_fantope_pca(K, params: FantopeParams = FantopeParams()) -> FantopeSolution:
    """ADMM for the Fantope program.

    Stops when ``||M - Z||_F <= tol_primal * d`` and
    ``||Z - Z_prev||_F <= tol_dual * d``. Both residuals are measured in the
    units of M (the usual dual residual divided by rho), so the stopping rule
    does not depend on the scale of K. If ``max_iter`` is hit the last
    feasible iterate is returned with ``converged=False``.
    """
    K = _check_sym(K)
    K = 0.5 * (K + K.T)
    d = K.shape[0]
    if params.m > d:
        raise ValueError(f"m={params.m} exceeds dimension {d}")
    rho = params.rho
    if rho is None:
        rho = float(np.max(np.abs(np.linalg.eigvalsh(K)))) or 1.0
    thr = params.lam / rho
    Z = np.zeros((d, d))
    U = np.zeros((d, d))
    r = s = np.inf
    converged = False
    it = 0
    for it in range(1, params.max_iter + 1):
        M = fantope_project(Z - U + K / rho, params.m)
        Z_prev = Z
        Z = soft_threshold(M + U, thr)
        U = U + M - Z
        r = np.linalg.norm(M - Z, "fro")
        s = np.linalg.norm(Z - Z_prev, "fro")
        if r <= params.tol_primal * d and s <= params.tol_dual * d:
            converged = True
            break
    X_hat, ambiguous = round_to_projector(M, params.m)
    return FantopeSolution(
        X_m=M,
        X_hat=X_hat,
        objective=fantope_objective(K, M, params.lam),
        iterations=it,
        primal_residual=float(r),
        dual_residual=float(s),
        converged=converged,
        ambiguous=ambiguous,
    )
