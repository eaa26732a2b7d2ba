"""Spiked covariance construction and elliptical sampling.

Every draw follows the stochastic representation ``X = mu + xi * A @ U``
with ``U`` uniform on the unit sphere of R^q and ``A @ A.T = Sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class CovarianceSpec:
    """Block-sparse spike model.

    ``components`` lists ``(eigenvalue, support_size)`` pairs. Component j is
    supported on the j-th consecutive block of coordinates with equal
    entries ``1/sqrt(s_j)``.
    """

    d: int
    components: tuple[tuple[float, int], ...] = ()
    baseline: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "components", tuple((float(w), int(s)) for w, s in self.components)
        )
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.baseline <= 0:
            raise ValueError("baseline eigenvalue must be positive")
        omegas = [w for w, _ in self.components] + [self.baseline]
        if any(a <= b for a, b in zip(omegas, omegas[1:])):
            raise ValueError(f"eigenvalues must strictly decrease to the baseline: {omegas}")
        sizes = [s for _, s in self.components]
        if any(s < 1 for s in sizes):
            raise ValueError("support sizes must be >= 1")
        if sum(sizes) > self.d:
            raise ValueError(f"support blocks overlap: sum of sizes {sum(sizes)} > d={self.d}")

    @property
    def m(self) -> int:
        return len(self.components)

    def supports(self) -> list[np.ndarray]:
        out, start = [], 0
        for _, s in self.components:
            out.append(np.arange(start, start + s))
            start += s
        return out

    def eigenvectors(self) -> np.ndarray:
        """d x m matrix whose columns are the sparse leading eigenvectors."""
        V = np.zeros((self.d, self.m))
        for j, (idx, (_, s)) in enumerate(zip(self.supports(), self.components)):
            V[idx, j] = 1.0 / np.sqrt(s)
        return V

    def eigenvalues(self) -> np.ndarray:
        lam = np.full(self.d, self.baseline)
        lam[: self.m] = [w for w, _ in self.components]
        return lam


def build_spike_covariance(spec: CovarianceSpec) -> np.ndarray:
    """Sigma = sum_j (omega_j - omega_d) v_j v_j^T + omega_d I."""
    sigma = spec.baseline * np.eye(spec.d)
    V = spec.eigenvectors()
    for j, (omega, _) in enumerate(spec.components):
        v = V[:, j]
        sigma += (omega - spec.baseline) * np.outer(v, v)
    # outer(v, v) is exactly symmetric, but keep the guarantee explicit
    return 0.5 * (sigma + sigma.T)


# radial laws -----------------------------------------------------------------


@dataclass(frozen=True)
class GaussianChi:
    """xi = chi_q; gives the Gaussian N(mu, Sigma)."""

    def draw(self, rng, n, q, d):
        return np.sqrt(rng.chisquare(q, size=n))

    def second_moment(self, q):
        return float(q)


@dataclass(frozen=True)
class MultivariateT:
    """xi = sqrt(kappa) chi_q / chi_kappa (multivariate t with kappa dof)."""

    kappa: float = 3.0

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")

    def draw(self, rng, n, q, d):
        num = np.sqrt(rng.chisquare(q, size=n))
        den = np.sqrt(rng.chisquare(self.kappa, size=n))
        return np.sqrt(self.kappa) * num / den

    def second_moment(self, q):
        if self.kappa <= 2:
            return None
        return q * self.kappa / (self.kappa - 2)


@dataclass(frozen=True)
class FDist:
    """xi ~ F(d, 1), no finite mean."""

    def draw(self, rng, n, q, d):
        return rng.f(d, 1, size=n)

    def second_moment(self, q):
        return None


@dataclass(frozen=True)
class Exp1:
    """xi ~ Exp(1)."""

    def draw(self, rng, n, q, d):
        return rng.exponential(1.0, size=n)

    def second_moment(self, q):
        return 2.0


@dataclass(frozen=True)
class Cauchy:
    """xi = sqrt(q) chi_q / chi_1 (the extra sqrt(q) is part of the law)."""

    def draw(self, rng, n, q, d):
        num = np.sqrt(rng.chisquare(q, size=n))
        den = np.sqrt(rng.chisquare(1, size=n))
        return np.sqrt(q) * num / den

    def second_moment(self, q):
        return None


RadialLaw = Union[GaussianChi, MultivariateT, FDist, Exp1, Cauchy]


def factor_from_cov(sigma: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Return A (d x q) with A A^T = sigma via the symmetric eigendecomposition.

    Eigenvalues below ``rtol * max`` are dropped, so q = numerical rank.
    """
    sigma = np.asarray(sigma, dtype=float)
    w, U = np.linalg.eigh(sigma)
    if w[-1] <= 0:
        raise DataError("scatter matrix has no positive eigenvalue")
    if w[0] < -1e-8 * w[-1]:
        raise DataError("scatter matrix is not positive semidefinite")
    keep = w > rtol * w[-1]
    # descending, so the factor's columns follow the eigenvalue order
    w, U = w[keep][::-1], U[:, keep][:, ::-1]
    return U * np.sqrt(w)


@dataclass(frozen=True)
class EllipticalModel:
    mu: np.ndarray
    factor: np.ndarray
    generator: RadialLaw = field(default_factory=GaussianChi)
    normalize: bool = True

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).ravel()
        A = np.atleast_2d(np.asarray(self.factor, dtype=float))
        if A.shape[0] != mu.size:
            raise ValueError(f"factor has {A.shape[0]} rows but mu has length {mu.size}")
        if np.linalg.matrix_rank(A) != A.shape[1]:
            raise ValueError("factor must have full column rank")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "factor", A)
        if self.normalize and self.generator.second_moment(self.q) is None:
            raise ValueError(
                f"{type(self.generator).__name__} has no finite second moment; "
                "use normalize=False"
            )

    @classmethod
    def from_cov(cls, sigma, mu=None, generator=None, normalize=True):
        sigma = np.asarray(sigma, dtype=float)
        mu = np.zeros(sigma.shape[0]) if mu is None else mu
        return cls(mu, factor_from_cov(sigma), generator or GaussianChi(), normalize)

    @property
    def d(self) -> int:
        return self.factor.shape[0]

    @property
    def q(self) -> int:
        return self.factor.shape[1]

    @property
    def scatter(self) -> np.ndarray:
        return self.factor @ self.factor.T


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _sphere(rng: np.random.Generator, n: int, q: int) -> np.ndarray:
    G = rng.standard_normal((n, q))
    norms = np.linalg.norm(G, axis=1)
    # a Gaussian draw of exact zero norm has probability zero; redraw anyway
    while np.any(norms == 0):
        bad = norms == 0
        G[bad] = rng.standard_normal((int(bad.sum()), q))
        norms = np.linalg.norm(G, axis=1)
    return G / norms[:, None]


def sample_unit_sphere(q: int, seed=None) -> np.ndarray:
    """One uniform draw from the unit sphere in R^q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return _sphere(_rng(seed), 1, q)[0]


def sample(model: EllipticalModel, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` rows from the elliptical law ``model``.

    Parameters
    ----------
    model : EllipticalModel
    n : int
        Number of observations, at least 1.
    seed : int, sequence of ints, or numpy Generator
        Fixed seeds give bitwise-identical output.

    Returns
    -------
    X : (n, d) ndarray
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    U = _sphere(rng, n, model.q)
    xi = model.generator.draw(rng, n, model.q, model.d)
    if model.normalize:
        xi = xi * np.sqrt(model.q / model.generator.second_moment(model.q))
    return model.mu + (xi[:, None] * U) @ model.factor.T


# named laws used by the simulation schemes
DISTRIBUTIONS = {
    "normal": (GaussianChi(), True),
    "t3": (MultivariateT(3.0), True),
    "ec1": (FDist(), False),
    "ec2": (Exp1(), True),
    "cauchy": (Cauchy(), False),
}


def model_for(sigma: np.ndarray, dist: str) -> EllipticalModel:
    try:
        gen, normalize = DISTRIBUTIONS[dist]
    except KeyError:
        raise ValueError(f"unknown distribution {dist!r}; choose from {sorted(DISTRIBUTIONS)}")
    return EllipticalModel.from_cov(sigma, generator=gen, normalize=normalize)


# simulation schemes: (n, d, cardinalities, eigenvalues incl. baseline last)
SCHEMES: dict[int, tuple[int, int, tuple[int, ...], tuple[float, ...]]] = {
    1: (50, 100, (10, 10), (6.0, 3.0, 1.0)),
    2: (100, 100, (10, 10), (6.0, 3.0, 1.0)),
    3: (100, 200, (10, 10), (6.0, 3.0, 1.0)),
    4: (50, 100, (10, 8, 6, 5), (8.0, 4.0, 2.0, 1.0, 0.01)),
    5: (100, 100, (10, 8, 6, 5), (8.0, 4.0, 2.0, 1.0, 0.01)),
    6: (100, 200, (10, 8, 6, 5), (8.0, 4.0, 2.0, 1.0, 0.01)),
}


def scheme_spec(scheme: int, d: int | None = None) -> CovarianceSpec:
    """CovarianceSpec for a numbered scheme, optionally at another dimension."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {sorted(SCHEMES)}")
    _, d0, sizes, eigs = SCHEMES[scheme]
    return CovarianceSpec(
        d=d0 if d is None else d,
        components=tuple(zip(eigs[:-1], sizes)),
        baseline=eigs[-1],
    )


def scheme_n(scheme: int) -> int:
    return SCHEMES[scheme][0]


def check_data(X, min_rows: int = 2) -> np.ndarray:
    """Validate an observation matrix (rows are samples)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"expected a 2-D data matrix, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise DataError(f"need at least {min_rows} observations, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise DataError("data matrix has no columns")
    if not np.all(np.isfinite(X)):
        raise DataError("data matrix contains non-finite entries")
    return X
