"""Fantope-initialized truncated power method (FTPM), deflation, and
validation-based choice of the truncation level.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .combinatoric import SparseEigenResult
from .errors import DeadIterateError, InitializationError, NumericError
from .fantope import FantopeParams, FantopeSolution, solve_fantope_pca
from .spectral import _check_sym, eigh_sorted, fix_signs


@dataclass(frozen=True)
class FtpmParams:
    """Tuning for one FTPM run.

    ``init_sparsity``, when set, overrides ``delta`` with the threshold that
    keeps exactly that many entries of the Fantope eigenvector (ties may keep
    more).
    """

    k: int
    epsilon: float = 1e-6
    max_iter: int = 1000
    delta: float = 0.0
    init_sparsity: int | None = None
    fantope: FantopeParams = field(default_factory=FantopeParams)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.init_sparsity is not None and self.init_sparsity < 1:
            raise ValueError("init_sparsity must be >= 1")
        if self.fantope.m != 1:
            object.__setattr__(self, "fantope", replace(self.fantope, m=1))


def trc(v, J) -> np.ndarray:
    """Zero every entry of v outside the index set J."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    J = np.asarray(sorted(J), dtype=np.intp)
    out[J] = v[J]
    return out


def top_k_indices(x: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest |x|; the smaller index wins ties."""
    order = np.argsort(-np.abs(x), kind="stable")
    return np.sort(order[:k])


def delta_for_sparsity(u, target: int) -> float:
    """Largest threshold keeping at least ``target`` entries of u."""
    a = np.sort(np.abs(np.asarray(u, dtype=float)))[::-1]
    target = min(max(int(target), 1), a.size)
    return float(a[target - 1])


def init_from_fantope(X1, delta: float = 0.0) -> np.ndarray:
    """Normalized truncation of the leading eigenvector of X1 to |u_j| >= delta."""
    u = eigh_sorted(X1).vectors[:, 0]
    J = np.flatnonzero(np.abs(u) >= delta)
    if J.size == 0:
        raise InitializationError(
            f"no entry of the Fantope eigenvector reaches delta={delta:.3g}; use a smaller delta"
        )
    w = trc(u, J)
    nrm = np.linalg.norm(w)
    if nrm == 0:
        raise InitializationError("truncated starting vector is zero; use a smaller delta")
    return w / nrm


def truncated_power(K, v0, params: FtpmParams, record: bool = False) -> SparseEigenResult:
    """Truncated power iteration from ``v0``.

    Each step multiplies by K, keeps the k largest entries in absolute value
    and renormalizes. Stops once successive iterates differ by at most
    ``epsilon`` in Euclidean norm.
    """
    K = _check_sym(K)
    d = K.shape[0]
    if params.k > d:
        raise ValueError(f"k={params.k} exceeds dimension {d}")
    v = np.asarray(v0, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-8:
        raise ValueError("v0 must be a unit vector")
    history = [float(v @ K @ v)] if record else None
    converged = False
    t = 0
    for t in range(1, params.max_iter + 1):
        x = K @ v
        if not np.all(np.isfinite(x)):
            raise NumericError("non-finite iterate in truncated power method")
        if np.count_nonzero(x) > params.k:
            x = trc(x, top_k_indices(x, params.k))
        nrm = np.linalg.norm(x)
        if nrm == 0:
            raise DeadIterateError(
                "K v vanished: the iterate is orthogonal to the range of K"
            )
        v_new = x / nrm
        step = np.linalg.norm(v_new - v)
        v = v_new
        if record:
            history.append(float(v @ K @ v))
        if step <= params.epsilon:
            converged = True
            break
    v = fix_signs(v)
    info = {"history": history} if record else {}
    return SparseEigenResult(
        vector=v,
        support=tuple(int(i) for i in np.flatnonzero(v)),
        objective=float(v @ K @ v),
        iterations=t,
        converged=converged,
        info=info,
    )


def ftpm_leading(K, params: FtpmParams, fantope: FantopeSolution | None = None) -> SparseEigenResult:
    """Fantope solve (m=1), truncated initialization, then truncated power.

    A precomputed ``fantope`` solution may be passed to reuse it across
    several values of k.
    """
    K = _check_sym(K)
    if fantope is None:
        fantope = solve_fantope_pca(K, params.fantope)
    delta = params.delta
    if params.init_sparsity is not None:
        delta = delta_for_sparsity(eigh_sorted(fantope.X_m).vectors[:, 0], params.init_sparsity)
    v0 = init_from_fantope(fantope.X_m, delta)
    res = truncated_power(K, v0, params)
    res.info.update(
        fantope_objective=fantope.objective,
        fantope_iterations=fantope.iterations,
        fantope_converged=fantope.converged,
        init_support_size=int(np.count_nonzero(v0)),
    )
    return res


def deflate(M, v) -> np.ndarray:
    """Projection deflation (I - vv^T) M (I - vv^T)."""
    M = _check_sym(M)
    v = np.asarray(v, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-8:
        raise ValueError("v must be a unit vector")
    Mv = M @ v
    vMv = v @ Mv
    out = M - np.outer(Mv, v) - np.outer(v, Mv) + vMv * np.outer(v, v)
    return 0.5 * (out + out.T)


def ftpm_top_m(K, m: int, params: FtpmParams | Sequence[FtpmParams]) -> list[SparseEigenResult]:
    """Leading m sparse components by FTPM with projection deflation.

    A single ``params`` is reused at every step; a sequence gives per-component
    settings.
    """
    K = _check_sym(K)
    if not 1 <= m <= K.shape[0]:
        raise ValueError(f"m must be in [1, {K.shape[0]}]")
    plist = [params] * m if isinstance(params, FtpmParams) else list(params)
    if len(plist) != m:
        raise ValueError(f"need {m} parameter sets, got {len(plist)}")
    found = []
    work = K
    for p in plist:
        res = ftpm_leading(work, p)
        found.append(res)
        work = deflate(work, res.vector)
    return found


@dataclass
class KSelection:
    k: int
    scores: dict[int, float]


def select_k(X_train, X_val, k_grid: Sequence[int], params: FtpmParams,
             estimator: Callable | None = None) -> KSelection:
    """Pick k maximizing ``u_k^T K_val u_k`` (ties go to the smallest k)."""
    from .scatter import multivariate_kendall

    estimator = estimator or multivariate_kendall
    X_train, X_val = np.asarray(X_train, dtype=float), np.asarray(X_val, dtype=float)
    if X_train.shape[1] != X_val.shape[1]:
        raise ValueError("training and validation data differ in dimension")
    if not k_grid:
        raise ValueError("k_grid is empty")
    K = estimator(X_train)
    K_val = estimator(X_val)
    fsol = solve_fantope_pca(K, params.fantope)
    scores = {}
    for k in sorted(set(int(k) for k in k_grid)):
        u = ftpm_leading(K, replace(params, k=k), fantope=fsol).vector
        scores[k] = float(u @ K_val @ u)
    best = max(scores.values())
    return KSelection(min(k for k, v in scores.items() if v == best), scores)
