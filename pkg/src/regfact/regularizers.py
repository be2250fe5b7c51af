"""Penalty matrices L = D^T D (data side) and M = G^T G (feature side)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matrix_core import as_matrix, sym_eigen

KINDS = ("none", "identity", "second_difference", "graph_laplacian", "custom")
PSD_TOL = 1e-8


class RegularizerError(ValueError):
    pass


def build_second_difference(n: int) -> np.ndarray:
    """Second-derivative stencil with one-sided first differences at both ends."""
    if n < 3:
        raise RegularizerError(f"second-difference matrix needs n >= 3, got {n}")
    D = np.zeros((n, n))
    D[0, :2] = (-1.0, 1.0)
    D[-1, -2:] = (1.0, -1.0)
    for i in range(1, n - 1):
        D[i, i - 1:i + 2] = (1.0, -2.0, 1.0)
    return D


def check_adjacency(W, size: Optional[int] = None) -> np.ndarray:
    W = as_matrix(W, "adjacency")
    if W.shape[0] != W.shape[1]:
        raise RegularizerError(f"adjacency must be square, got shape {W.shape}")
    if size is not None and W.shape[0] != size:
        raise RegularizerError(f"adjacency has size {W.shape[0]}, expected {size}")
    if np.abs(W - W.T).max() > 1e-12:
        raise RegularizerError("adjacency is not symmetric")
    if np.any(W < 0):
        raise RegularizerError("adjacency has negative weights")
    if np.any(np.diag(W) != 0):
        raise RegularizerError("adjacency must have a zero diagonal")
    return W


def build_graph_laplacian(adjacency) -> np.ndarray:
    """Unnormalised Laplacian ``Degree - Adjacency``."""
    W = check_adjacency(adjacency)
    W = 0.5 * (W + W.T)
    return np.diag(W.sum(axis=1)) - W


def path_adjacency(n: int) -> np.ndarray:
    W = np.zeros((n, n))
    idx = np.arange(n - 1)
    W[idx, idx + 1] = W[idx + 1, idx] = 1.0
    return W


def check_psd(L, name: str = "regulariser") -> np.ndarray:
    L = as_matrix(L, name)
    if L.shape[0] != L.shape[1]:
        raise RegularizerError(f"{name} must be square, got shape {L.shape}")
    if np.abs(L - L.T).max() > 1e-12 * max(1.0, np.abs(L).max()):
        raise RegularizerError(f"{name} is not symmetric")
    lowest = sym_eigen(L).values[0]
    if lowest < -PSD_TOL * np.linalg.norm(L):
        raise RegularizerError(f"{name} is not positive semi-definite (min eigenvalue {lowest:.3e})")
    return 0.5 * (L + L.T)


@dataclass(frozen=True)
class RegularizerSpec:
    kind: str
    size: int
    adjacency: Optional[np.ndarray] = None
    custom_L: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RegularizerError(f"unknown regulariser kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.size < 1:
            raise RegularizerError(f"regulariser size must be positive, got {self.size}")

    def describe(self) -> str:
        return self.kind


@dataclass(frozen=True)
class RegularizerMatrix:
    L: np.ndarray
    spec: RegularizerSpec

    @property
    def size(self) -> int:
        return self.L.shape[0]


def realize(spec: RegularizerSpec) -> RegularizerMatrix:
    n = spec.size
    if spec.kind == "none":
        L = np.zeros((n, n))
    elif spec.kind == "identity":
        L = np.eye(n)
    elif spec.kind == "second_difference":
        D = build_second_difference(n)
        L = D.T @ D
    elif spec.kind == "graph_laplacian":
        if spec.adjacency is None:
            raise RegularizerError("graph_laplacian regulariser needs an adjacency matrix")
        L = build_graph_laplacian(check_adjacency(spec.adjacency, n))
    else:
        if spec.custom_L is None:
            raise RegularizerError("custom regulariser needs an explicit matrix")
        L = check_psd(spec.custom_L, "custom regulariser")
        if L.shape[0] != n:
            raise RegularizerError(f"custom regulariser has size {L.shape[0]}, expected {n}")
    return RegularizerMatrix(L, spec)


def regularizer(kind: str, size: int, matrix=None) -> RegularizerMatrix:
    """Shorthand for ``realize(RegularizerSpec(...))``; ``matrix`` is the adjacency or custom L."""
    if kind == "graph_laplacian":
        return realize(RegularizerSpec(kind, size, adjacency=matrix))
    if kind == "custom":
        return realize(RegularizerSpec(kind, size, custom_L=matrix))
    return realize(RegularizerSpec(kind, size))
