"""Eigen computations.

Production extracts exactly one leading eigenpair by power iteration
(O(n^2) per iteration: one matrix-vector product plus normalization) and
the smallest eigenvalue by power iteration on the spectrally shifted matrix
mu*I - R. A cyclic-Jacobi full decomposition is provided as an independent
reference for small n; the production path never needs all n pairs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._kernels import power_iteration
from .core import CovMatrix, EigenSystem, Feature
from .errors import DimensionTooLargeError, NoConvergenceError

JACOBI_MAX_DIM = 64


@dataclass(frozen=True)
class PowerIterConfig:
    """Iteration controls; residual_tol is relative to ||R||_F."""

    max_iters: int = 500
    residual_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.residual_tol > 0:
            raise ValueError(f"residual_tol must be > 0, got {self.residual_tol}")


@functools.lru_cache(maxsize=256)
def _start_vector_cached(n: int, seed: int) -> np.ndarray:
    rng = _rng.make_rng(seed, _rng.TAG_START_VECTOR)
    x = rng.standard_normal(n)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        x[0] = 1.0
        nrm = 1.0
    x /= nrm
    x.setflags(write=False)
    return x


def _start_vector(n: int, seed: int) -> np.ndarray:
    # generator construction dominates small solves; the cache keeps start
    # vectors deterministic per (n, seed) without paying it per call
    return _start_vector_cached(n, seed).copy()


def _leading_of_array(A: np.ndarray, cfg: PowerIterConfig) -> tuple[np.ndarray, float]:
    """Leading eigenpair of a symmetric PSD array, with one reseeded restart
    to guard against a start vector orthogonal to the top eigenspace."""
    norm = float(np.linalg.norm(A))
    if norm == 0.0:
        return _start_vector(A.shape[0], cfg.seed), 0.0
    tol_abs = cfg.residual_tol * norm
    total_iters = 0
    res = np.inf
    for attempt in range(2):
        x = _start_vector(A.shape[0], cfg.seed + attempt)
        lam, res, iters = power_iteration(A, x, cfg.max_iters, tol_abs)
        total_iters += iters
        # lam = 0 on a nonzero PSD matrix means the start vector fell in the
        # nullspace; that is a reason to restart, not a converged answer
        if res <= tol_abs and lam > 0.0:
            return x, float(lam)
    raise NoConvergenceError(total_iters, float(res))


def leading_eigenvector(R: CovMatrix, cfg: PowerIterConfig = PowerIterConfig()) -> tuple[Feature, float]:
    """Unit-norm, sign-canonical leading eigenvector with its eigenvalue."""
    x, lam = _leading_of_array(R.values, cfg)
    return Feature.from_vector(x), lam


def min_eigenvalue(R: CovMatrix, cfg: PowerIterConfig = PowerIterConfig()) -> float:
    """Smallest eigenvalue via the shift mu*I - R with mu just above lam_max.

    The 1e-6 relative margin on mu keeps the shifted matrix PSD despite
    rounding in the computed leading eigenvalue.
    """
    return extreme_eigenvalues(R, cfg)[1]


def extreme_eigenvalues(R: CovMatrix, cfg: PowerIterConfig = PowerIterConfig()) -> tuple[float, float, Feature]:
    """(lam_max, lam_min, leading feature) sharing one leading solve."""
    x, lam_max = _leading_of_array(R.values, cfg)
    feature = Feature.from_vector(x)
    if lam_max == 0.0 and not R.values.any():
        return 0.0, 0.0, feature
    mu = lam_max * (1.0 + 1e-6)
    shifted = mu * np.eye(R.n) - R.values
    _, lam_shift = _leading_of_array(shifted, cfg)
    return lam_max, mu - lam_shift, feature


def jacobi_eigensystem(R: CovMatrix) -> EigenSystem:
    """Full decomposition by cyclic Jacobi rotations (reference path, n <= 64).

    Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
    mass falls below 1e-12 * ||R||_F. Eigenvalues come back descending with
    orthonormal, sign-canonical eigenvectors as columns.
    """
    n = R.n
    if n > JACOBI_MAX_DIM:
        raise DimensionTooLargeError(n, JACOBI_MAX_DIM)
    A = np.array(R.values, dtype=np.float64)
    V = np.eye(n)
    norm = float(np.linalg.norm(A))
    if norm == 0.0:
        return EigenSystem(eigenvalues=np.zeros(n), eigenvectors=V)
    target = 1e-12 * norm
    for _ in range(60):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2.0)
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # symmetric Schur rotation annihilating A[p,q]
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                A[[p, q], :] = rot.T @ A[[p, q], :]
                A[:, [p, q]] = A[:, [p, q]] @ rot
                V[:, [p, q]] = V[:, [p, q]] @ rot
                A[p, q] = 0.0
                A[q, p] = 0.0
    else:
        raise NoConvergenceError(60, float(off))
    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    V = V[:, order]
    for k in range(n):
        pivot = int(np.argmax(np.abs(V[:, k])))
        if V[pivot, k] < 0:
            V[:, k] = -V[:, k]
    return EigenSystem(eigenvalues=eigenvalues, eigenvectors=V)
