"""Kernel functions, Gram matrices, and the centering matrix.

The RBF kernel is exp(-||u - v||^2 / (2 w^2)); width is tuned in log-space
so the exact parametrisation does not affect tuned results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = ("rbf", "linear", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    width: float = 1.0  # rbf only
    degree: int = 3  # polynomial only
    offset: float = 0.0  # polynomial only

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "rbf" and not self.width > 0:
            raise ValueError("rbf width must be positive")
        if self.family == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")


def kernel_eval(spec: KernelSpec, u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if spec.family == "rbf":
        return float(np.exp(-np.sum((u - v) ** 2) / (2.0 * spec.width**2)))
    if spec.family == "linear":
        return float(np.dot(u, v))
    return float((np.dot(u, v) + spec.offset) ** spec.degree)


def _mirror_upper(G: np.ndarray) -> np.ndarray:
    """Copy the strict upper triangle onto the lower one (bitwise symmetry)."""
    il = np.tril_indices(G.shape[0], -1)
    G[il] = G.T[il]
    return G


def gram(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """N x N matrix of pairwise kernel values, bitwise symmetric."""
    X = np.asarray(X, dtype=float)
    if spec.family == "rbf":
        diff = X[:, None, :] - X[None, :, :]
        sq = np.sum(diff**2, axis=-1)
        G = np.exp(-sq / (2.0 * spec.width**2))
    elif spec.family == "linear":
        G = X @ X.T
    else:
        G = (X @ X.T + spec.offset) ** spec.degree
    return _mirror_upper(G)


def gram_cross(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """len(A) x len(B) matrix of kernel values between two point sets."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.family == "rbf":
        diff = A[:, None, :] - B[None, :, :]
        sq = np.sum(diff**2, axis=-1)
        return np.exp(-sq / (2.0 * spec.width**2))
    if spec.family == "linear":
        return A @ B.T
    return (A @ B.T + spec.offset) ** spec.degree


def centering_matrix(n: int) -> np.ndarray:
    """H = I - (1/n) 11^T; symmetric, idempotent, annihilates constants."""
    if n < 1:
        raise ValueError("centering_matrix needs n >= 1")
    return np.eye(n) - np.full((n, n), 1.0 / n)
