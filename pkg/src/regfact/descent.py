"""Minimisation over orthonormal-column matrices by plane rotations.

Every move left-multiplies Q by ``exp(t K_ij)``, the rotation generated by the
skew basis matrix with +1 at (i, j) and -1 at (j, i). Rotations preserve
``Q^T Q = I`` exactly (up to rounding), so no projection or retraction is needed.
Indices are zero-based: pairs run (0, 1), (0, 2), ..., (m-2, m-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .matrix_core import orthonormalize

STRATEGIES = ("steepest", "random")
REORTH_EVERY = 50


@dataclass(frozen=True)
class DescentConfig:
    strategy: str = "steepest"
    t0: float = 0.5
    t_min: float = 1e-8
    fd_step: float = 1e-6
    max_iters: int = 2000
    tol_abs: float = 1e-12
    tol_rel: float = 1e-9
    random_trials_per_iter: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose steepest or random")
        if not 0 < self.t_min < self.t0:
            raise ValueError(f"need 0 < t_min < t0, got t_min={self.t_min}, t0={self.t0}")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if self.max_iters < 1 or self.random_trials_per_iter < 1:
            raise ValueError("max_iters and random_trials_per_iter must be positive")
        if self.tol_abs < 0 or self.tol_rel < 0:
            raise ValueError("tolerances must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def threshold(self, psi: float) -> float:
        """Smallest decrease of psi that counts as progress."""
        return self.tol_abs + self.tol_rel * abs(psi)


class SkewIndex(NamedTuple):
    i: int
    j: int
    alpha: int


def n_directions(m: int) -> int:
    return m * (m - 1) // 2


def skew_indices(m: int) -> list[SkewIndex]:
    out = []
    for i in range(m - 1):
        for j in range(i + 1, m):
            out.append(SkewIndex(i, j, len(out)))
    return out


def skew_index(m: int, alpha: int) -> SkewIndex:
    """Inverse of the row-major enumeration of pairs i < j."""
    if not 0 <= alpha < n_directions(m):
        raise ValueError(f"alpha={alpha} out of range for m={m}")
    i, rest = 0, alpha
    while rest >= m - 1 - i:
        rest -= m - 1 - i
        i += 1
    return SkewIndex(i, i + 1 + rest, alpha)


def _check_index(m: int, idx: SkewIndex):
    if not (0 <= idx.i < idx.j < m):
        raise ValueError(f"invalid plane ({idx.i}, {idx.j}) for m={m}")


def skew_generator(m: int, idx: SkewIndex) -> np.ndarray:
    _check_index(m, idx)
    K = np.zeros((m, m))
    K[idx.i, idx.j] = 1.0
    K[idx.j, idx.i] = -1.0
    return K


def givens_rotation(m: int, idx: SkewIndex, t: float) -> np.ndarray:
    """Closed form of ``exp(t K_ij)``."""
    _check_index(m, idx)
    c, s = math.cos(t), math.sin(t)
    R = np.eye(m)
    R[idx.i, idx.i] = R[idx.j, idx.j] = c
    R[idx.i, idx.j] = s
    R[idx.j, idx.i] = -s
    return R


def rotate(Q: np.ndarray, idx: SkewIndex, t: float) -> np.ndarray:
    """``givens_rotation(m, idx, t) @ Q`` touching only rows i and j."""
    c, s = math.cos(t), math.sin(t)
    out = Q.copy()
    qi, qj = Q[idx.i], Q[idx.j]
    out[idx.i] = c * qi + s * qj
    out[idx.j] = c * qj - s * qi
    return out


def orthonormality_error(Q: np.ndarray) -> float:
    return float(np.abs(Q.T @ Q - np.eye(Q.shape[1])).max())


def directional_derivative(psi_fn: Callable, Q: np.ndarray, idx: SkewIndex,
                           fd_step: float, psi0: Optional[float] = None) -> float:
    """Forward-difference slope of psi along the rotation ``exp(t K_ij)`` at t = 0."""
    if psi0 is None:
        psi0 = psi_fn(Q)
    return (psi_fn(rotate(Q, idx, fd_step)) - psi0) / fd_step


class StepResult(NamedTuple):
    Q: np.ndarray
    psi: float
    accepted: bool


def _line_search(psi_fn, Q, idx, direction, psi0, config):
    t = config.t0
    need = config.threshold(psi0)
    while t >= config.t_min:
        Qn = rotate(Q, idx, direction * t)
        psin = psi_fn(Qn)
        if psi0 - psin > need:
            return StepResult(Qn, psin, True)
        t *= 0.5
    return None


def steepest_step(psi_fn: Callable, Q: np.ndarray, config: DescentConfig,
                  psi0: Optional[float] = None) -> StepResult:
    """Probe all m(m-1)/2 planes, then line-search along the steepest signed direction.

    A positive forward slope along +t means -t descends, so each plane offers
    two directions. When the steepest one fails its line search, the next
    steepest is tried; only planes whose slope could reach the progress
    threshold within ``t0`` are considered.
    """
    if psi0 is None:
        psi0 = psi_fn(Q)
    indices = skew_indices(Q.shape[0])
    slopes = np.array([directional_derivative(psi_fn, Q, idx, config.fd_step, psi0)
                       for idx in indices])
    need = config.threshold(psi0)
    # stable sort keeps the lowest alpha first among equal slopes
    for a in np.argsort(-np.abs(slopes), kind="stable"):
        if abs(slopes[a]) * config.t0 <= need:
            break
        step = _line_search(psi_fn, Q, indices[a], -np.sign(slopes[a]), psi0, config)
        if step is not None:
            return step
    return StepResult(Q, psi0, False)


def random_step(psi_fn: Callable, Q: np.ndarray, config: DescentConfig,
                rng: np.random.Generator, psi0: Optional[float] = None) -> StepResult:
    """Try random plane rotations until one lowers psi; ``rng`` is advanced in place."""
    if psi0 is None:
        psi0 = psi_fn(Q)
    m = Q.shape[0]
    need = config.threshold(psi0)
    lo, hi = math.log(config.t_min), math.log(config.t0)
    for _ in range(config.random_trials_per_iter):
        idx = skew_index(m, int(rng.integers(n_directions(m))))
        t = math.exp(rng.uniform(lo, hi))
        if rng.random() < 0.5:
            t = -t
        Qn = rotate(Q, idx, t)
        psin = psi_fn(Qn)
        if psi0 - psin > need:
            return StepResult(Qn, psin, True)
    return StepResult(Q, psi0, False)


@dataclass
class DescentResult:
    Q: np.ndarray
    psi: float
    trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    evaluations: int = 0
    max_orthonormality_error: float = 0.0


def minimize(psi_fn: Callable, Q0, config: DescentConfig = DescentConfig(),
             reorth_every: int = REORTH_EVERY) -> DescentResult:
    """Repeat the configured step until a full step finds no progress or the budget runs out.

    ``trace[0]`` is psi at ``Q0``; each later entry is psi after an accepted step.
    """
    Q = np.array(Q0, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[1] > Q.shape[0]:
        raise ValueError(f"Q0 must be a tall m x k matrix, got shape {Q.shape}")
    if orthonormality_error(Q) > 1e-8:
        raise ValueError("Q0 does not have orthonormal columns")
    if Q.shape[0] < 2:
        raise ValueError("rotations need m >= 2")

    calls = 0

    def counted(X):
        nonlocal calls
        calls += 1
        return float(psi_fn(X))

    rng = np.random.default_rng(config.seed)
    psi = counted(Q)
    res = DescentResult(Q, psi, [psi], max_orthonormality_error=orthonormality_error(Q))
    while res.iterations < config.max_iters:
        if config.strategy == "steepest":
            step = steepest_step(counted, Q, config, psi)
        else:
            step = random_step(counted, Q, config, rng, psi)
        if not step.accepted:
            res.converged = True
            break
        Q, psi = step.Q, step.psi
        res.iterations += 1
        res.trace.append(psi)
        if res.iterations % reorth_every == 0:
            # drift here is ~1e-15, far below the progress threshold, so the
            # trace stays monotone across the re-evaluation
            Q = orthonormalize(Q)
            psi = counted(Q)
        res.max_orthonormality_error = max(res.max_orthonormality_error, orthonormality_error(Q))
    res.Q, res.psi, res.evaluations = Q, psi, calls
    return res
