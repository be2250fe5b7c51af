"""Dense real-matrix kernels: Frobenius norm, Jacobi eigensolver, SVD, Cholesky solves.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Every public
function validates its inputs with :func:`as_matrix` and returns fresh arrays,
so callers can treat results as immutable values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 64
ASYMMETRY_TOL = 1e-8
RANK_RTOL = 1e-12


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorisation met a non-positive pivot."""

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(f"matrix is not positive definite: pivot {pivot} is {value:.3e}")


def as_matrix(X, name: str = "matrix") -> np.ndarray:
    """Return ``X`` as a finite 2-D float64 array or raise ``ValueError``."""
    arr = np.array(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def frobenius_norm_sq(X) -> float:
    """Sum of squared entries of ``X``."""
    X = as_matrix(X)
    return float(np.sum(X * X))


def sign_flips(vectors: np.ndarray) -> np.ndarray:
    """Per-column +-1 making the largest-magnitude entry (first on ties) nonnegative."""
    if vectors.shape[1] == 0:
        return np.ones(0)
    lead = np.argmax(np.abs(vectors), axis=0)
    return np.where(vectors[lead, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    return vectors * sign_flips(vectors)


@dataclass(frozen=True)
class SymEigen:
    """Eigenpairs of a symmetric matrix, eigenvalues ascending."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _symmetrised(S) -> np.ndarray:
    S = as_matrix(S, "symmetric matrix")
    if S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    scale = np.linalg.norm(S)
    asym = np.linalg.norm(S - S.T)
    if asym > ASYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise ValueError(f"matrix is not symmetric: ||S - S^T|| = {asym:.3e}")
    return 0.5 * (S + S.T)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps on a symmetric matrix (modified in place)."""
    n = a.shape[0]
    v = np.eye(n)
    target = JACOBI_TOL * np.linalg.norm(a)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J = [[c, s], [-s, c]] in the (p, q) plane
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def sym_eigen(S, method: str = "jacobi") -> SymEigen:
    """Eigen-decomposition of a symmetric matrix.

    ``method="jacobi"`` runs cyclic Jacobi sweeps until the off-diagonal mass
    drops below ``1e-14 * ||S||`` (or 64 sweeps). ``method="lapack"`` defers to
    ``numpy.linalg.eigh`` and exists for hot loops where the matrix is
    re-decomposed thousands of times. Both return ascending eigenvalues and
    sign-normalised eigenvectors.
    """
    S = _symmetrised(S)
    if method == "jacobi":
        values, vectors = _jacobi(S.copy())
    elif method == "lapack":
        values, vectors = np.linalg.eigh(S)
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    order = np.argsort(values, kind="stable")
    return SymEigen(values[order], fix_signs(vectors[:, order]))


def smallest_eigenvalue(S, method: str = "jacobi") -> float:
    if method == "lapack":
        return float(np.linalg.eigvalsh(_symmetrised(S))[0])
    return float(sym_eigen(S, method).values[0])


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U diag(sigma) V^T`` restricted to the numerical rank."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.sigma)

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


def _gram_floor(top_eig: float, dim: int) -> float:
    # Gram eigenvalues carry absolute error ~ dim * eps * top_eig; anything
    # below that is indistinguishable from an exact zero singular value.
    return 8.0 * dim * np.finfo(float).eps * top_eig


def svd(A, method: str = "jacobi") -> SvdResult:
    """SVD via the eigen-decomposition of the smaller Gram matrix.

    The factor not obtained from the Gram matrix is recovered column-wise as
    ``A v / sigma`` (or ``A^T u / sigma``). Singular values at or below the
    rank cutoff are dropped together with their vectors.
    """
    A = as_matrix(A)
    n, m = A.shape
    wide = m > n
    gram = A @ A.T if wide else A.T @ A
    eig = sym_eigen(gram, method)
    vals = eig.values[::-1]
    vecs = eig.vectors[:, ::-1]
    top = max(vals[0], 0.0)
    sigma = np.sqrt(np.clip(vals, 0.0, None))
    keep = (vals > _gram_floor(top, gram.shape[0])) & (sigma > RANK_RTOL * np.sqrt(top))
    if not keep.any():
        return SvdResult(np.zeros((n, 0)), np.zeros(0), np.zeros((m, 0)))
    sigma = sigma[keep]
    vecs = vecs[:, keep]
    # The recovered factor loses orthogonality like eps * sigma_1^2 / (sigma_i sigma_j);
    # a sign-preserving QR pass restores it without disturbing the leading columns.
    if wide:
        U = vecs
        V = orthonormalize((A.T @ U) / sigma)
    else:
        V = vecs
        U = orthonormalize((A @ V) / sigma)
    signs = sign_flips(V)
    return SvdResult(U * signs, sigma, V * signs)


def truncate_svd(res: SvdResult, k: int) -> np.ndarray:
    """Rank-``k`` approximant ``sum_{i<=k} sigma_i U_i V_i^T``."""
    full = min(res.U.shape[0], res.V.shape[0])
    if not 1 <= k <= full:
        raise ValueError(f"rank k={k} out of range 1..{full}")
    r = min(k, res.rank)
    return (res.U[:, :r] * res.sigma[:r]) @ res.V[:, :r].T


def cholesky(C) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = C``."""
    C = as_matrix(C)
    n = C.shape[0]
    if C.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {C.shape}")
    if np.linalg.norm(C - C.T) > ASYMMETRY_TOL * max(np.linalg.norm(C), 1.0):
        raise ValueError("matrix is not symmetric")
    L = np.zeros_like(C)
    for j in range(n):
        d = C[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise NotPositiveDefiniteError(j, float(d))
        L[j, j] = np.sqrt(d)
        L[j + 1:, j] = (C[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _forward(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    Y = np.empty_like(B)
    for i in range(L.shape[0]):
        Y[i] = (B[i] - L[i, :i] @ Y[:i]) / L[i, i]
    return Y


def _backward(U: np.ndarray, B: np.ndarray) -> np.ndarray:
    X = np.empty_like(B)
    for i in range(U.shape[0] - 1, -1, -1):
        X[i] = (B[i] - U[i, i + 1:] @ X[i + 1:]) / U[i, i]
    return X


def spd_solve(C, B) -> np.ndarray:
    """Solve ``C X = B`` for symmetric positive-definite ``C`` by Cholesky.

    ``B`` may be a vector or a matrix; the result has the same shape.
    """
    L = cholesky(C)
    B = np.asarray(B, dtype=np.float64)
    vector = B.ndim == 1
    B2 = as_matrix(B[:, None] if vector else B, "right-hand side")
    if B2.shape[0] != L.shape[0]:
        raise ValueError(f"right-hand side has {B2.shape[0]} rows, expected {L.shape[0]}")
    X = _backward(L.T, _forward(L, B2))
    return X[:, 0] if vector else X


def orthonormalize(Q) -> np.ndarray:
    """QR-based re-orthonormalisation that keeps column signs (R has positive diagonal)."""
    q, r = np.linalg.qr(as_matrix(Q))
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d
