"""Scatter statistics: multivariate Kendall's tau, the sin-transformed marginal
Kendall's tau (TCA) covariance, the Pearson covariance, and Monte Carlo
oracles for the population multivariate Kendall's tau.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DataError, DegeneratePairError
from .sampling import _rng, check_data


class PairPolicy(enum.Enum):
    """What to do with a pair of identical observations."""

    ERROR = "error"
    SKIP = "skip"


def kernel(xa, xb) -> np.ndarray:
    """Rank-one projector onto the direction of ``xa - xb``."""
    diff = np.asarray(xa, dtype=float) - np.asarray(xb, dtype=float)
    sq = diff @ diff
    if sq == 0:
        raise DegeneratePairError(0, 1)
    return np.outer(diff, diff) / sq


def multivariate_kendall(X, policy: PairPolicy = PairPolicy.ERROR) -> np.ndarray:
    """Sample multivariate Kendall's tau.

    Averages ``(Xi - Xj)(Xi - Xj)^T / ||Xi - Xj||^2`` over all unordered
    pairs ``i < j``. The result is symmetric PSD with unit trace.

    Parameters
    ----------
    X : (n, d) array_like
        Observations in rows, n >= 2.
    policy : PairPolicy
        ``ERROR`` raises :class:`DegeneratePairError` on the first identical
        pair; ``SKIP`` drops such pairs and averages over the rest.
    """
    X = check_data(X)
    n, d = X.shape
    acc = np.zeros((d, d))
    used = 0
    for i in range(n - 1):
        D = X[i + 1 :] - X[i]
        sq = np.einsum("ij,ij->i", D, D)
        zero = sq == 0
        if zero.any():
            if policy is PairPolicy.ERROR:
                raise DegeneratePairError(i, i + 1 + int(np.flatnonzero(zero)[0]))
            D, sq = D[~zero], sq[~zero]
        W = D / np.sqrt(sq)[:, None]
        acc += W.T @ W
        used += W.shape[0]
    if used == 0:
        raise DataError("every pair of observations is degenerate")
    K = acc / used
    return 0.5 * (K + K.T)


def marginal_kendall_tau(X) -> np.ndarray:
    """Entrywise Kendall's tau; ties contribute sign(0) = 0."""
    X = check_data(X)
    n, d = X.shape
    acc = np.zeros((d, d))
    for i in range(n - 1):
        S = np.sign(X[i + 1 :] - X[i])
        acc += S.T @ S
    tau = acc * (2.0 / (n * (n - 1)))
    return 0.5 * (tau + tau.T)


def marginal_kendall_corr(X) -> np.ndarray:
    """Correlation estimate sin(pi/2 * tau) from marginal Kendall's tau."""
    return np.sin(0.5 * np.pi * marginal_kendall_tau(X))


def tca_covariance(X) -> np.ndarray:
    """Kendall correlation rescaled by sample standard deviations (ddof=1)."""
    X = check_data(X)
    sd = X.std(axis=0, ddof=1)
    if np.any(sd == 0):
        raise DataError(f"zero-variance column(s): {np.flatnonzero(sd == 0).tolist()}")
    return marginal_kendall_corr(X) * np.outer(sd, sd)


def pearson_cov(X) -> np.ndarray:
    X = check_data(X)
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / (X.shape[0] - 1)
    return 0.5 * (S + S.T)


# Monte Carlo oracles --------------------------------------------------------

_CHUNK = 1 << 16


class _Moments:
    """Chunked mean/variance accumulation (Chan et al. pairwise update)."""

    def __init__(self, shape):
        self.n = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add(self, count, mean, m2):
        tot = self.n + count
        delta = mean - self.mean
        self.mean = self.mean + delta * (count / tot)
        self.m2 = self.m2 + m2 + delta**2 * (self.n * count / tot)
        self.n = tot

    def se(self):
        return np.sqrt(self.m2 / (self.n - 1) / self.n)


def _tie_groups(lam: np.ndarray, rtol: float = 1e-12) -> list[np.ndarray]:
    order = np.argsort(-lam, kind="stable")
    groups, cur = [], [order[0]]
    for a, b in zip(order, order[1:]):
        if abs(lam[a] - lam[b]) <= rtol * max(abs(lam[a]), abs(lam[b]), 1e-300):
            cur.append(b)
        else:
            groups.append(np.array(cur))
            cur = [b]
    groups.append(np.array(cur))
    return groups


def population_kendall_eigs_mc(sigma_eigs, mc_samples: int = 1_000_000, seed=0,
                               tie_average: bool = True):
    """Monte Carlo eigenvalues of the population multivariate Kendall's tau.

    Estimates ``E[lam_j Y_j^2 / sum_i lam_i Y_i^2]`` for standard Gaussian Y.
    With ``tie_average`` the ratios of equal eigenvalues are pooled, which is
    exact by exchangeability and makes the all-equal case deterministic.

    Returns
    -------
    eigs : (d,) ndarray
        Sums to one.
    se : (d,) ndarray
        Monte Carlo standard errors.
    """
    lam = np.asarray(sigma_eigs, dtype=float).ravel()
    if np.any(lam < 0):
        raise ValueError("eigenvalues must be nonnegative")
    if not np.any(lam > 0):
        raise ValueError("at least one eigenvalue must be positive")
    if mc_samples < 2:
        raise ValueError("mc_samples must be >= 2")
    rng = _rng(seed)
    d = lam.size
    groups = _tie_groups(lam) if tie_average else [np.array([j]) for j in range(d)]
    pos = lam > 0
    acc = _Moments(d)
    done = 0
    while done < mc_samples:
        b = min(_CHUNK, mc_samples - done)
        Y2 = rng.standard_normal((b, int(pos.sum()))) ** 2
        R = np.zeros((b, d))
        R[:, pos] = Y2 * lam[pos]
        R /= R.sum(axis=1, keepdims=True)
        for g in groups:
            if g.size > 1:
                R[:, g] = R[:, g].mean(axis=1, keepdims=True)
        mu = R.mean(axis=0)
        acc.add(b, mu, ((R - mu) ** 2).sum(axis=0))
        done += b
    return acc.mean / acc.mean.sum(), acc.se()


def population_kendall(sigma, mc_samples: int = 1_000_000, seed=0):
    """Population K assembled as ``V diag(lambda(K)) V^T`` from the
    eigenvectors V of ``sigma`` and Monte Carlo eigenvalues.

    Returns ``(K, eig_se)``.
    """
    sigma = np.asarray(sigma, dtype=float)
    w, V = np.linalg.eigh(sigma)
    w = np.clip(w, 0.0, None)
    eigs, se = population_kendall_eigs_mc(w, mc_samples, seed)
    K = (V * eigs) @ V.T
    return 0.5 * (K + K.T), se


def population_kendall_mc(sigma, mc_samples: int = 1_000_000, seed=0):
    """Entrywise Monte Carlo estimate of ``E[Z Z^T / ||Z||^2]``, Z ~ N(0, sigma).

    Returns ``(K, se)`` with entrywise standard errors.
    """
    sigma = np.asarray(sigma, dtype=float)
    from .sampling import factor_from_cov

    A = factor_from_cov(sigma)
    d, q = A.shape
    rng = _rng(seed)
    acc = _Moments((d, d))
    done = 0
    while done < mc_samples:
        b = min(_CHUNK, mc_samples - done)
        Z = rng.standard_normal((b, q)) @ A.T
        W = Z / np.linalg.norm(Z, axis=1, keepdims=True)
        mu = W.T @ W / b
        W2 = W * W
        # sum_i (w_ij w_ik - mu_jk)^2 = sum_i w_ij^2 w_ik^2 - b mu_jk^2
        m2 = np.maximum(W2.T @ W2 - b * mu**2, 0.0)
        acc.add(b, mu, m2)
        done += b
    K = acc.mean
    return 0.5 * (K + K.T), acc.se()
