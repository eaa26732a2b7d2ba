import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from eca.combinatoric import restricted_spectral_norm, sparse_leading_eigenvector
from eca.errors import CombinatorialBlowupError
from eca.spectral import eigh_sorted, sin_angle, spectral_norm

from conftest import random_psd, random_sym


def direct_search(M, s):
    """Second enumerator: plain loop, scipy eigensolver, explicit tie rule."""
    best = (-1.0, None, None)
    for J in itertools.combinations(range(M.shape[0]), s):
        w, V = scipy.linalg.eigh(M[np.ix_(J, J)])
        for lam, vec in ((w[0], V[:, 0]), (w[-1], V[:, -1])):
            if abs(lam) > best[0]:
                best = (abs(lam), J, vec)
    return best


def test_diagonal_cases():
    r = sparse_leading_eigenvector(np.diag([1.0, 5.0, 3.0]), 1)
    assert r.support == (1,)
    np.testing.assert_array_equal(r.vector, [0, 1, 0])
    assert r.objective == 5
    r = sparse_leading_eigenvector(np.diag([-7.0, 5.0]), 1)
    assert r.support == (0,) and r.objective == 7


def test_matches_independent_enumerator(rng):
    for _ in range(5):
        M = random_sym(rng, 8)
        r = sparse_leading_eigenvector(M, 3)
        obj, J, vec = direct_search(M, 3)
        assert r.support == J
        assert r.objective == pytest.approx(obj, abs=1e-10)
        full = np.zeros(8)
        full[list(J)] = vec
        assert sin_angle(r.vector, full) < 1e-8


def test_result_invariants(rng):
    M = random_psd(rng, 9)
    r = sparse_leading_eigenvector(M, 4)
    assert abs(np.linalg.norm(r.vector) - 1) < 1e-12
    assert set(np.flatnonzero(r.vector)) <= set(r.support)
    assert len(r.support) <= 4
    assert abs(r.objective - abs(r.vector @ M @ r.vector)) < 1e-10
    assert r.iterations == 0 and r.converged


def test_lexicographic_tie_break():
    r = sparse_leading_eigenvector(np.eye(4), 2)
    assert r.support == (0, 1)


def test_s_equals_d_recovers_top_eigenvector(rng):
    M = random_psd(rng, 7)
    r = sparse_leading_eigenvector(M, 7)
    assert sin_angle(r.vector, eigh_sorted(M).vectors[:, 0]) <= 1e-10


def test_s_equals_d_indefinite(rng):
    M = random_sym(rng, 6)
    r = sparse_leading_eigenvector(M, 6)
    w, V = np.linalg.eigh(M)
    j = 0 if abs(w[0]) > abs(w[-1]) else -1
    assert sin_angle(r.vector, V[:, j]) <= 1e-8


@settings(max_examples=20)
@given(st.integers(0, 2**31))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    M = random_sym(rng, 7)
    perm = rng.permutation(7)
    a = sparse_leading_eigenvector(M, 3)
    b = sparse_leading_eigenvector(M[np.ix_(perm, perm)], 3)
    assert a.objective == pytest.approx(b.objective, abs=1e-12)
    assert sorted(perm[list(b.support)]) == sorted(a.support)


def test_budget():
    with pytest.raises(CombinatorialBlowupError, match="C\\(30,10\\)"):
        sparse_leading_eigenvector(np.eye(30), 10, budget=1000)
    with pytest.raises(CombinatorialBlowupError):
        restricted_spectral_norm(np.eye(30), 10, budget=1000)


def test_restricted_norm(rng):
    M = random_sym(rng, 8)
    assert restricted_spectral_norm(M, 8) == pytest.approx(spectral_norm(M), abs=1e-12)
    assert restricted_spectral_norm(np.diag([1.0, 2.0, 3.0]), 2) == 3
    chain = [restricted_spectral_norm(M, s) for s in range(1, 9)]
    assert all(a <= b + 1e-14 for a, b in zip(chain, chain[1:]))
