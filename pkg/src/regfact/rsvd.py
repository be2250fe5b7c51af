"""Regularised SVD-type factorisation A ~ P diag(beta) Q^T.

Constraints: Q^T Q = I, unit-norm columns of P, diagonal B. For fixed Q the
optimal P column i is the bottom eigenvector of ``S(q_i) = lam L - (A q_i)(A q_i)^T``
and the optimal beta_i is ``p_i^T A q_i``, so the search reduces to minimising

    psi(Q) = sum_i [ lambda_min(S(q_i)) + mu q_i^T M q_i ]

over orthonormal Q, which :mod:`regfact.descent` handles with plane rotations.
The mu = 0 case is the same code path with the M term vanishing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .descent import DescentConfig, minimize, orthonormality_error
from .matrix_core import (as_matrix, frobenius_norm_sq, orthonormalize, smallest_eigenvalue,
                          svd, sym_eigen)
from .rpca import penalty_matrix

INITS = ("warm", "random")
# psi is re-evaluated thousands of times per solve; LAPACK keeps that tractable
DEFAULT_EIG_METHOD = "lapack"


@dataclass(frozen=True)
class RsvdProblem:
    A: np.ndarray
    k: int
    lam: float = 0.0
    mu: float = 0.0
    L: object = None
    M: object = None
    descent: DescentConfig = DescentConfig()
    init: str = "warm"
    eig_method: str = DEFAULT_EIG_METHOD

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        n, m = A.shape
        if not 1 <= self.k <= min(n, m):
            raise ValueError(f"rank k={self.k} must lie in 1..{min(n, m)}")
        if self.lam < 0 or self.mu < 0:
            raise ValueError("weights lambda and mu must be nonnegative")
        if self.init not in INITS:
            raise ValueError(f"unknown init {self.init!r}; choose warm or random")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "L", penalty_matrix(self.L, n, "L"))
        object.__setattr__(self, "M", penalty_matrix(self.M, m, "M"))


@dataclass
class RsvdSolution:
    P: np.ndarray
    beta: np.ndarray
    Q: np.ndarray
    psi_trace: list
    objective: float
    converged: bool
    iterations: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def B(self) -> np.ndarray:
        return np.diag(self.beta)

    def reconstruct(self) -> np.ndarray:
        return (self.P * self.beta) @ self.Q.T


def _check_unit(q, tol=1e-10):
    nrm = np.linalg.norm(q)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"q must be a unit vector, has norm {nrm:.12g}")


def _check_orthonormal(Q, tol=1e-8):
    if orthonormality_error(Q) > tol:
        raise ValueError("Q must have orthonormal columns")


def s_matrix(q, A, lam, L) -> np.ndarray:
    """``lam L - (A q)(A q)^T``."""
    q = np.asarray(q, dtype=np.float64)
    _check_unit(q)
    a = A @ q
    S = lam * L - np.outer(a, a)
    return 0.5 * (S + S.T)


def psi(Q, A, lam, mu, L, M, eig_method: str = DEFAULT_EIG_METHOD) -> float:
    Q = as_matrix(Q, "Q")
    _check_orthonormal(Q)
    total = 0.0
    for i in range(Q.shape[1]):
        q = Q[:, i] / np.linalg.norm(Q[:, i])
        total += smallest_eigenvalue(s_matrix(q, A, lam, L), eig_method) + mu * float(q @ M @ q)
    return total


def extract_p(Q, A, lam, L, eig_method: str = DEFAULT_EIG_METHOD):
    """Bottom eigenvector of each S(q_i), signed so that p_i^T A q_i >= 0.

    Returns ``(P, degenerate)`` where ``degenerate[i]`` flags a repeated
    smallest eigenvalue (any vector of that eigenspace is equally optimal).
    """
    Q = as_matrix(Q, "Q")
    _check_orthonormal(Q)
    n = A.shape[0]
    P = np.empty((n, Q.shape[1]))
    degenerate = []
    for i in range(Q.shape[1]):
        q = Q[:, i] / np.linalg.norm(Q[:, i])
        eig = sym_eigen(s_matrix(q, A, lam, L), eig_method)
        p = eig.vectors[:, 0] / np.linalg.norm(eig.vectors[:, 0])
        if p @ (A @ q) < 0:
            p = -p
        P[:, i] = p
        gap = eig.values[1] - eig.values[0] if n > 1 else np.inf
        degenerate.append(bool(gap <= 1e-12 * max(np.abs(eig.values).max(), 1.0)))
    return P, degenerate


def extract_b(P, A, Q) -> np.ndarray:
    """``beta_i = (P^T A Q)_ii``, computed column-wise."""
    P, A, Q = as_matrix(P, "P"), as_matrix(A, "A"), as_matrix(Q, "Q")
    if P.shape[1] != Q.shape[1] or P.shape[0] != A.shape[0] or Q.shape[0] != A.shape[1]:
        raise ValueError(f"shapes do not compose: P {P.shape}, A {A.shape}, Q {Q.shape}")
    return np.einsum("ni,ni->i", P, A @ Q)


def rsvd_objective(A, P, beta, Q, lam, mu, L, M) -> float:
    R = A - (P * beta) @ Q.T
    return (frobenius_norm_sq(R) + lam * float(np.trace(P.T @ L @ P))
            + mu * float(np.trace(Q.T @ M @ Q)))


def initial_q(prob: RsvdProblem) -> np.ndarray:
    n, m = prob.A.shape
    k = prob.k
    if prob.init == "random":
        rng = np.random.default_rng(prob.descent.seed)
        return orthonormalize(rng.standard_normal((m, k)))
    V = svd(prob.A).V[:, :k]
    if V.shape[1] < k:
        # rank-deficient A: complete the leading right singular vectors with coordinate axes
        V = orthonormalize(np.hstack([V, np.eye(m)]))[:, :k]
    return V


def solve_rsvd(prob: RsvdProblem) -> RsvdSolution:
    A, lam, mu, L, M = prob.A, prob.lam, prob.mu, prob.L, prob.M
    start = time.perf_counter()

    def psi_fn(Q):
        return psi(Q, A, lam, mu, L, M, prob.eig_method)

    Q0 = initial_q(prob)
    run = minimize(psi_fn, Q0, prob.descent)
    Q = run.Q
    P, degenerate = extract_p(Q, A, lam, L, prob.eig_method)
    beta = extract_b(P, A, Q)
    diagnostics = {
        "psi_initial": run.trace[0],
        "psi_final": run.psi,
        "evaluations": run.evaluations,
        "max_orthonormality_error": run.max_orthonormality_error,
        "p_gram_offdiag": float(np.abs(P.T @ P - np.eye(prob.k)).max()),
        "degenerate": degenerate,
        "seconds": time.perf_counter() - start,
    }
    return RsvdSolution(P, beta, Q, run.trace, rsvd_objective(A, P, beta, Q, lam, mu, L, M),
                        run.converged, run.iterations, diagnostics)
