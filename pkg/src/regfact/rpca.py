"""Closed-form regularised PCA: minimise ||A - P Q^T||^2 + lam Tr(P^T L P) + mu Tr(Q^T M Q)
subject to Q^T Q = I.

Q holds the eigenvectors of ``K = A^T (I + lam L)^{-1} A - mu M`` for the k
algebraically largest eigenvalues, and ``P = (I + lam L)^{-1} A Q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix_core import as_matrix, frobenius_norm_sq, spd_solve, sym_eigen
from .regularizers import RegularizerMatrix

DEGENERACY_RTOL = 1e-10


def penalty_matrix(R, size: int, name: str) -> np.ndarray:
    """Accept a RegularizerMatrix, a raw square array, or None (zero penalty)."""
    if R is None:
        return np.zeros((size, size))
    L = R.L if isinstance(R, RegularizerMatrix) else as_matrix(R, name)
    if L.shape != (size, size):
        raise ValueError(f"{name} must be {size}x{size}, got {L.shape[0]}x{L.shape[1]}")
    return L


@dataclass(frozen=True)
class PcaProblem:
    A: np.ndarray
    k: int
    lam: float = 0.0
    mu: float = 0.0
    L: object = None
    M: object = None

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        n, m = A.shape
        if not 1 <= self.k <= min(n, m):
            raise ValueError(f"rank k={self.k} must lie in 1..{min(n, m)}")
        if self.lam < 0 or self.mu < 0:
            raise ValueError("weights lambda and mu must be nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "L", penalty_matrix(self.L, n, "L"))
        object.__setattr__(self, "M", penalty_matrix(self.M, m, "M"))


@dataclass(frozen=True)
class PcaSolution:
    P: np.ndarray
    Q: np.ndarray
    objective: float
    k_spectrum: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def reconstruct(self) -> np.ndarray:
        return self.P @ self.Q.T


def _smoother(prob: PcaProblem) -> np.ndarray:
    return np.eye(prob.A.shape[0]) + prob.lam * prob.L


def build_k_matrix(prob: PcaProblem) -> np.ndarray:
    X = spd_solve(_smoother(prob), prob.A)
    K = prob.A.T @ X - prob.mu * prob.M
    return 0.5 * (K + K.T)


def stationary_p(prob: PcaProblem, Q) -> np.ndarray:
    """Optimal P for a fixed orthonormal Q: solves (I + lam L) P = A Q."""
    return spd_solve(_smoother(prob), prob.A @ Q)


def rpca_objective(A, P, Q, lam=0.0, mu=0.0, L=None, M=None) -> float:
    A, P, Q = as_matrix(A, "A"), as_matrix(P, "P"), as_matrix(Q, "Q")
    n, m = A.shape
    if P.shape[0] != n or Q.shape[0] != m or P.shape[1] != Q.shape[1]:
        raise ValueError(f"shapes do not compose: A {A.shape}, P {P.shape}, Q {Q.shape}")
    L = penalty_matrix(L, n, "L")
    M = penalty_matrix(M, m, "M")
    return (frobenius_norm_sq(A - P @ Q.T)
            + lam * float(np.trace(P.T @ L @ P))
            + mu * float(np.trace(Q.T @ M @ Q)))


def solve_rpca(prob: PcaProblem) -> PcaSolution:
    k = prob.k
    eig = sym_eigen(build_k_matrix(prob))
    values = eig.values[::-1]
    vectors = eig.vectors[:, ::-1]
    Q = vectors[:, :k].copy()
    P = stationary_p(prob, Q)
    # a tie across the k-th/(k+1)-th eigenvalue means the subspace is not unique
    scale = max(np.abs(values).max(), 1.0)
    degenerate = bool(k < len(values) and values[k - 1] - values[k] <= DEGENERACY_RTOL * scale)
    objective = rpca_objective(prob.A, P, Q, prob.lam, prob.mu, prob.L, prob.M)
    diagnostics = {
        "degenerate": degenerate,
        "objective_identity": frobenius_norm_sq(prob.A) - float(values[:k].sum()),
    }
    return PcaSolution(P, Q, objective, values[:k].copy(), diagnostics)
