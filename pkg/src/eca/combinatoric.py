"""Exact s-sparse leading eigenvector by exhaustive support search.

Exponential in s; this is the statistically optimal estimator and serves as
a brute-force reference for the truncated power method.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CombinatorialBlowupError
from .spectral import _check_sym, fix_signs

DEFAULT_BUDGET = 2_000_000
_BATCH = 4096


@dataclass
class SparseEigenResult:
    vector: np.ndarray
    support: tuple[int, ...]
    objective: float
    iterations: int = 0
    converged: bool = True
    info: dict = field(default_factory=dict)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.vector))


def _check_budget(d: int, s: int, budget: int) -> int:
    if not 1 <= s <= d:
        raise ValueError(f"s must be in [1, {d}]")
    total = comb(d, s)
    if total > budget:
        raise CombinatorialBlowupError(
            f"C({d},{s}) = {total} supports exceeds the budget of {budget}"
        )
    return total


def _batches(d: int, s: int):
    it = itertools.combinations(range(d), s)
    while True:
        chunk = list(itertools.islice(it, _BATCH))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp)


def _scan(M: np.ndarray, s: int):
    """Yield (supports, |lambda|_max per support, eigh output) batch by batch."""
    for idx in _batches(M.shape[0], s):
        sub = M[idx[:, :, None], idx[:, None, :]]
        w, V = np.linalg.eigh(sub)
        yield idx, w, V


def sparse_leading_eigenvector(M, s: int, budget: int = DEFAULT_BUDGET) -> SparseEigenResult:
    """Maximize ``|v^T M v|`` over unit vectors with at most ``s`` nonzeros.

    Supports are scanned in lexicographic order; among equal objectives the
    lexicographically smallest support wins.
    """
    M = _check_sym(M)
    M = 0.5 * (M + M.T)
    d = M.shape[0]
    _check_budget(d, s, budget)
    best_obj, best_idx, best_vec = -np.inf, None, None
    for idx, w, V in _scan(M, s):
        lo, hi = -w[:, 0], w[:, -1]
        obj = np.maximum(lo, hi)
        b = int(np.argmax(obj))
        if obj[b] > best_obj:
            best_obj = float(obj[b])
            best_idx = idx[b]
            best_vec = V[b][:, -1] if hi[b] >= lo[b] else V[b][:, 0]
    v = np.zeros(d)
    v[best_idx] = best_vec
    v = fix_signs(v)
    return SparseEigenResult(
        vector=v,
        support=tuple(int(i) for i in best_idx),
        objective=abs(float(v @ M @ v)),
    )


def restricted_spectral_norm(M, s: int, budget: int = DEFAULT_BUDGET) -> float:
    """max over size-s supports J of the spectral radius of M[J, J]."""
    M = _check_sym(M)
    M = 0.5 * (M + M.T)
    _check_budget(M.shape[0], s, budget)
    best = 0.0
    for idx in _batches(M.shape[0], s):
        w = np.linalg.eigvalsh(M[idx[:, :, None], idx[:, None, :]])
        best = max(best, float(np.max(np.abs(w[:, [0, -1]]))))
    return best
