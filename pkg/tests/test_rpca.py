import numpy as np
import pytest

from regfact.matrix_core import frobenius_norm_sq, svd, truncate_svd
from regfact.regularizers import path_adjacency, regularizer
from regfact.rpca import PcaProblem, build_k_matrix, rpca_objective, solve_rpca, stationary_p

from conftest import random_orthonormal


def smooth_problem(rng, n=6, m=5, k=2, lam=0.5, mu=0.2):
    A = rng.standard_normal((n, m))
    L = regularizer("second_difference", n)
    M = regularizer("graph_laplacian", m, path_adjacency(m))
    return PcaProblem(A, k, lam, mu, L, M)


def test_k_matrix_unregularised(rng):
    A = rng.standard_normal((4, 3))
    np.testing.assert_allclose(build_k_matrix(PcaProblem(A, 1)), A.T @ A, atol=1e-13)


def test_k_matrix_identity_penalty(rng):
    A = rng.standard_normal((4, 3))
    lam = 0.7
    K = build_k_matrix(PcaProblem(A, 1, lam, 0.0, regularizer("identity", 4)))
    np.testing.assert_allclose(K, A.T @ A / (1 + lam), atol=1e-13)


def test_k_matrix_matches_dense_inverse(rng):
    prob = smooth_problem(rng, 4, 3, 1, 0.7, 0.3)
    C = np.eye(4) + 0.7 * prob.L
    inverse = np.column_stack([np.linalg.solve(C, e) for e in np.eye(4)])
    expected = prob.A.T @ inverse @ prob.A - 0.3 * prob.M
    np.testing.assert_allclose(build_k_matrix(prob), expected, atol=1e-10)


def test_unregularised_reduces_to_truncated_svd(rng):
    A = rng.standard_normal((7, 5))
    sol = solve_rpca(PcaProblem(A, 2))
    assert np.linalg.norm(sol.reconstruct() - truncate_svd(svd(A), 2)) <= 1e-8 * np.linalg.norm(A)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_identity_penalty_rank_one(rng, lam):
    A = rng.standard_normal((6, 4))
    ref = svd(A)
    sol = solve_rpca(PcaProblem(A, 1, lam, 0.0, regularizer("identity", 6)))
    s = np.sign(sol.Q[:, 0] @ ref.V[:, 0])
    np.testing.assert_allclose(s * sol.Q[:, 0], ref.V[:, 0], atol=1e-8)
    np.testing.assert_allclose(s * sol.P[:, 0], ref.sigma[0] * ref.U[:, 0] / (1 + lam), atol=1e-8)


def test_solution_invariants(rng):
    prob = smooth_problem(rng)
    sol = solve_rpca(prob)
    assert np.abs(sol.Q.T @ sol.Q - np.eye(2)).max() <= 1e-10
    AQ = prob.A @ sol.Q
    resid = (np.eye(6) + prob.lam * prob.L) @ sol.P - AQ
    assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(AQ)
    expected = frobenius_norm_sq(prob.A) - sol.k_spectrum.sum()
    assert abs(sol.objective - expected) <= 1e-8 * abs(expected)
    assert np.all(np.diff(sol.k_spectrum) <= 0)


def test_beats_random_feasible_points(rng):
    prob = smooth_problem(rng)
    best = solve_rpca(prob).objective
    for _ in range(1000):
        Q = random_orthonormal(rng, 5, 2)
        P = stationary_p(prob, Q)
        assert best <= rpca_objective(prob.A, P, Q, prob.lam, prob.mu, prob.L, prob.M) + 1e-10


def test_finite_difference_gradient_in_p(rng):
    prob = smooth_problem(rng)
    sol = solve_rpca(prob)

    def F(P):
        return rpca_objective(prob.A, P, sol.Q, prob.lam, prob.mu, prob.L, prob.M)

    h = 1e-5
    grad = np.zeros_like(sol.P)
    for idx in np.ndindex(*sol.P.shape):
        E = np.zeros_like(sol.P)
        E[idx] = h
        grad[idx] = (F(sol.P + E) - F(sol.P - E)) / (2 * h)
    # entrywise scale of the gradient terms, ||P Q^T Q|| + ||A Q|| + lam ||L P||
    scale = np.linalg.norm(sol.P) + np.linalg.norm(prob.A @ sol.Q) + prob.lam * np.linalg.norm(prob.L @ sol.P)
    assert np.linalg.norm(grad) <= 1e-4 * (1 + scale)


def test_trace_identity_for_random_q(rng):
    prob = smooth_problem(rng)
    K = build_k_matrix(prob)
    for _ in range(20):
        Q = random_orthonormal(rng, 5, 2)
        F = rpca_objective(prob.A, stationary_p(prob, Q), Q, prob.lam, prob.mu, prob.L, prob.M)
        expected = frobenius_norm_sq(prob.A) - np.trace(Q.T @ K @ Q)
        assert abs(F - expected) <= 1e-8 * abs(expected)


def test_residual_grows_with_lambda(rng):
    A = rng.standard_normal((8, 6))
    L = regularizer("second_difference", 8)
    resid = []
    for lam in (0.0, 0.5, 1.0, 2.0):
        sol = solve_rpca(PcaProblem(A, 2, lam, 0.0, L))
        resid.append(frobenius_norm_sq(A - sol.reconstruct()))
    assert all(b >= a - 1e-12 for a, b in zip(resid, resid[1:]))


def test_same_subspace_regardless_of_rotation(rng):
    # the solution is only unique up to Q -> Q R; compare projector and product
    prob = smooth_problem(rng)
    sol = solve_rpca(prob)
    R = random_orthonormal(rng, 2, 2)
    Q2 = sol.Q @ R
    P2 = stationary_p(prob, Q2)
    np.testing.assert_allclose(P2 @ Q2.T, sol.reconstruct(), atol=1e-10)
    np.testing.assert_allclose(Q2 @ Q2.T, sol.Q @ sol.Q.T, atol=1e-12)


def test_objective_examples(rng):
    A = rng.standard_normal((4, 3))
    Q = random_orthonormal(rng, 3, 2)
    assert rpca_objective(A, np.zeros((4, 2)), Q) == pytest.approx(frobenius_norm_sq(A), rel=1e-15)
    P = rng.standard_normal((4, 2))
    assert rpca_objective(P @ Q.T, P, Q) == pytest.approx(0.0, abs=1e-24)


def test_objective_termwise(rng):
    A = rng.standard_normal((5, 4))
    P = rng.standard_normal((5, 2))
    Q = random_orthonormal(rng, 4, 2)
    L = regularizer("second_difference", 5).L
    M = regularizer("identity", 4).L
    lam, mu = 0.3, 1.7
    penalty_p = sum(P[:, i] @ L @ P[:, i] for i in range(2))
    penalty_q = sum(Q[:, i] @ M @ Q[:, i] for i in range(2))
    expected = frobenius_norm_sq(A - P @ Q.T) + lam * penalty_p + mu * penalty_q
    assert rpca_objective(A, P, Q, lam, mu, L, M) == pytest.approx(expected, rel=1e-12)


def test_objective_dimension_mismatch(rng):
    with pytest.raises(ValueError, match="compose"):
        rpca_objective(np.ones((3, 3)), np.ones((2, 1)), np.ones((3, 1)))


def test_problem_validation(rng):
    A = rng.standard_normal((4, 3))
    with pytest.raises(ValueError, match="rank"):
        PcaProblem(A, 4)
    with pytest.raises(ValueError, match="nonnegative"):
        PcaProblem(A, 1, lam=-1.0)
    with pytest.raises(ValueError, match="4x4"):
        PcaProblem(A, 1, L=np.eye(3))


def test_degeneracy_flag():
    sol = solve_rpca(PcaProblem(np.eye(3), 1))
    assert sol.diagnostics["degenerate"]
    sol = solve_rpca(PcaProblem(np.diag([3.0, 2.0, 1.0]), 1))
    assert not sol.diagnostics["degenerate"]


def test_uncorrected_p_rule_is_worse(rng):
    # P = A Q ignores the smoothing term; the correct rule solves (I + lam L) P = A Q
    A = rng.standard_normal((8, 6))
    L = regularizer("second_difference", 8)
    prob = PcaProblem(A, 2, 1.0, 0.0, L)
    sol = solve_rpca(prob)
    wrong = rpca_objective(A, A @ sol.Q, sol.Q, 1.0, 0.0, prob.L, None)
    assert wrong > sol.objective + 1e-6
