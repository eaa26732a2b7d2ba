import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eca.fantope import (
    FantopeParams,
    fantope_project,
    round_to_projector,
    soft_threshold,
    solve_fantope_pca,
)
from eca.sampling import EllipticalModel, build_spike_covariance, sample, scheme_spec
from eca.scatter import multivariate_kendall, population_kendall
from eca.spectral import eigh_sorted, projector, sin_angle

from conftest import random_psd, random_sym


def fantope_sdp(objective_builder, d, m):
    M = cp.Variable((d, d), symmetric=True)
    cons = [M >> 0, np.eye(d) - M >> 0, cp.trace(M) == m]
    prob = cp.Problem(objective_builder(M), cons)
    prob.solve(solver=cp.CLARABEL)
    return M.value


def assert_in_fantope(P, m, tol):
    w = np.linalg.eigvalsh(P)
    assert w.min() >= -tol and w.max() <= 1 + tol
    assert abs(np.trace(P) - m) <= tol


# projection -------------------------------------------------------------------


def test_feasible_point_is_fixed():
    A = np.diag([1.0, 0.5, 0.5, 0.0])
    np.testing.assert_allclose(fantope_project(A, 2), A, atol=1e-10)


def test_diag_examples():
    np.testing.assert_allclose(fantope_project(np.diag([10.0, 0.0]), 1), np.diag([1.0, 0.0]), atol=1e-12)
    np.testing.assert_allclose(fantope_project(np.diag([0.8, 0.8]), 1), np.diag([0.5, 0.5]), atol=1e-12)


def test_projection_matches_sdp(rng):
    for m in (1, 2, 3):
        A = 2 * random_sym(rng, 6)
        ref = fantope_sdp(lambda M: cp.Minimize(cp.sum_squares(M - A)), 6, m)
        np.testing.assert_allclose(fantope_project(A, m), ref, atol=1e-5)


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(0, 2**31), st.floats(0.01, 100))
def test_projection_feasible_idempotent(d, seed, scale):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, d + 1))
    P = fantope_project(scale * random_sym(rng, d), m)
    assert_in_fantope(P, m, 1e-10)
    np.testing.assert_allclose(fantope_project(P, m), P, atol=1e-10)


@settings(max_examples=40)
@given(st.integers(2, 12), st.integers(0, 2**31))
def test_projection_nonexpansive(d, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, d + 1))
    A, B = 3 * random_sym(rng, d), 3 * random_sym(rng, d)
    lhs = np.linalg.norm(fantope_project(A, m) - fantope_project(B, m))
    assert lhs <= np.linalg.norm(A - B) + 1e-12


def test_projection_rejects_bad_rank():
    with pytest.raises(ValueError):
        fantope_project(np.eye(3), 0)
    with pytest.raises(ValueError):
        fantope_project(np.eye(3), 4)


# rounding ---------------------------------------------------------------------


def test_round_examples(rng):
    U = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    P = projector(U)
    R, amb = round_to_projector(P, 2)
    np.testing.assert_allclose(R, P, atol=1e-10)
    assert not amb
    R, _ = round_to_projector(np.diag([0.9, 0.6, 0.5]), 2)
    np.testing.assert_allclose(R, np.diag([1.0, 1.0, 0.0]), atol=1e-14)
    _, amb = round_to_projector(np.diag([0.9, 0.5, 0.5]), 2)
    assert amb


def test_rounding_inequality_random(rng):
    """||C - P||_F <= 4 ||A - P||_F for PSD A and rank-m projector P."""
    for _ in range(1000):
        d = int(rng.integers(2, 21))
        m = int(rng.integers(1, d))
        A = random_psd(rng, d, rank=int(rng.integers(1, d + 1))) * rng.uniform(0.01, 3)
        P = projector(np.linalg.qr(rng.standard_normal((d, m)))[0])
        C, _ = round_to_projector(A, m)
        assert np.linalg.norm(C - P) <= 4 * np.linalg.norm(A - P)


# ADMM -------------------------------------------------------------------------


def test_soft_threshold():
    np.testing.assert_array_equal(soft_threshold(np.array([-3.0, -0.5, 0.0, 2.0]), 1.0), [-2, 0, 0, 1])


def test_zero_penalty_gives_top_eigenvalue_sum(rng):
    X = rng.standard_normal((60, 12)) * np.linspace(3, 1, 12)
    K = multivariate_kendall(X)
    top = eigh_sorted(K).values
    for m in (1, 2, 3):
        sol = solve_fantope_pca(K, FantopeParams(lam=0.0, m=m))
        assert sol.converged
        assert abs(np.sum(K * sol.X_m) - top[:m].sum()) <= 1e-6
        assert_in_fantope(sol.X_m, m, 1e-8)
        assert_in_fantope(sol.X_hat, m, 1e-8)
        np.testing.assert_allclose(sol.X_hat @ sol.X_hat, sol.X_hat, atol=1e-8)
    sol = solve_fantope_pca(K, FantopeParams(lam=0.0, m=1))
    u = eigh_sorted(K).vectors[:, 0]
    np.testing.assert_allclose(sol.X_hat, np.outer(u, u), atol=1e-6)


def test_huge_penalty_kills_off_diagonal():
    sol = solve_fantope_pca(np.diag([0.7, 0.3]), FantopeParams(lam=10.0, m=1))
    assert abs(sol.X_m[0, 1]) <= 1e-8
    assert_in_fantope(sol.X_m, 1, 1e-8)


def test_admm_matches_sdp(rng):
    X = rng.standard_normal((40, 7)) * np.linspace(2, 1, 7)
    K = multivariate_kendall(X)
    lam = 0.01
    ref = fantope_sdp(lambda M: cp.Maximize(cp.trace(K @ M) - lam * cp.sum(cp.abs(M))), 7, 2)
    sol = solve_fantope_pca(K, FantopeParams(lam=lam, m=2, tol_primal=1e-9, tol_dual=1e-9, max_iter=20000))
    obj_ref = np.sum(K * ref) - lam * np.abs(ref).sum()
    assert sol.objective == pytest.approx(obj_ref, abs=1e-6)
    np.testing.assert_allclose(sol.X_m, ref, atol=1e-4)


def test_scale_invariance_of_solution(rng):
    K = multivariate_kendall(rng.standard_normal((50, 8)) * np.linspace(3, 1, 8))
    a = solve_fantope_pca(K, FantopeParams(lam=0.003))
    b = solve_fantope_pca(100 * K, FantopeParams(lam=0.3))
    # identical iterations up to rounding; compare at the stopping tolerance
    np.testing.assert_allclose(a.X_m, b.X_m, atol=1e-6 * 8)
    assert a.iterations == b.iterations


def test_max_iter_flag(rng):
    K = multivariate_kendall(rng.standard_normal((30, 6)))
    sol = solve_fantope_pca(K, FantopeParams(lam=0.01, max_iter=2, tol_primal=1e-14, tol_dual=1e-14))
    assert not sol.converged and sol.iterations == 2


def test_scheme1_fantope_direction():
    # penalty on the lambda_1(K) sqrt(log d / n) scale; the constant 0.1 is ours
    d, n = 50, 100
    spec = scheme_spec(1, d=d)
    model = EllipticalModel.from_cov(build_spike_covariance(spec))
    v1 = spec.eigenvectors()[:, 0]
    angles = []
    for r in range(50):
        K = multivariate_kendall(sample(model, n, seed=r))
        lam = 0.1 * eigh_sorted(K).values[0] * np.sqrt(np.log(d) / n)
        sol = solve_fantope_pca(K, FantopeParams(lam=lam))
        angles.append(sin_angle(eigh_sorted(sol.X_m).vectors[:, 0], v1))
    assert np.mean(angles) <= 0.3


def test_penalized_subspace_bound():
    """With lam >= ||Khat - K||_max: ||Xhat - Pi||_F <= 16 s lam / gap."""
    spec = scheme_spec(1, d=30)
    S = build_spike_covariance(spec)
    K, _ = population_kendall(S, 400_000, seed=0)
    lam_K = eigh_sorted(K).values
    Pi = projector(spec.eigenvectors()[:, :1])
    model = EllipticalModel.from_cov(S)
    for r in range(10):
        Khat = multivariate_kendall(sample(model, 400, seed=r))
        lam = np.max(np.abs(Khat - K))
        sol = solve_fantope_pca(Khat, FantopeParams(lam=lam, m=1))
        bound = 16 * 10 * lam / (lam_K[0] - lam_K[1])
        assert np.linalg.norm(sol.X_hat - Pi) <= bound
        assert np.linalg.norm(sol.X_hat - Pi) <= 4 * np.linalg.norm(sol.X_m - Pi) + 1e-12
