"""Brute-force ground truth: exact time evolution, trace distances, Schatten
power moments, and identity Pauli coefficients.

Every matrix function here goes through one Hermitian eigendecomposition
kernel so there is a single numerically audited code path.
"""

from __future__ import annotations

import math

import numpy as np

from .hamiltonians import LocalHamiltonian

HERMITIAN_TOL = 1e-10


def hermitian_eig(a: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Shared eigendecomposition kernel; rejects visibly non-Hermitian input."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    if np.max(np.abs(a - a.conj().T)) > tol * max(1.0, np.max(np.abs(a))):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh(a)


def evolve(h: LocalHamiltonian, t: float) -> np.ndarray:
    """exp(-i t H) via eigendecomposition; unitary to 1e-10."""
    w, v = hermitian_eig(h.to_matrix())
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def evolve_matrix(hmat: np.ndarray, t: float) -> np.ndarray:
    w, v = hermitian_eig(hmat)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace norm of rho - sigma (sum of singular values)."""
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    w, _ = hermitian_eig(rho - sigma)
    return float(np.sum(np.abs(w)))


def operator_norm_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest singular value of a - b (works for non-Hermitian a, b)."""
    return float(np.linalg.norm(a - b, ord=2))


def schatten_moment(h: LocalHamiltonian, l: int) -> float:
    """(Tr[|H|^l] / 2^n)^(1/l) from the exact spectrum."""
    if l < 2:
        raise ValueError(f"moment order must be >= 2, got {l}")
    w, _ = hermitian_eig(h.to_matrix())
    return float(np.mean(np.abs(w) ** l) ** (1.0 / l))


def identity_coeff(u: np.ndarray) -> complex:
    """Pauli coefficient of the identity string: Tr[U] / 2^n."""
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got {u.shape}")
    return complex(np.trace(u)) / u.shape[0]


def moment_tail_partial_sums(x: float, k: int, l_max: int) -> np.ndarray:
    """Partial sums sum_{l=3..L} x^l l^(lk/2) / l! for L = 3..l_max.

    This is the Taylor-tail majorant that the moment bound
    (Tr|H|^l/2^n)^(1/l) <= l^(k/2) ||H||_F produces for the identity
    coefficient of exp(-i t H) at x = t ||H||_F.  For k = 2 the terms decay
    geometrically once x e < 1; for k >= 3 the terms eventually grow without
    bound, which is the obstruction to certifying k >= 3 this way.  Terms are
    evaluated in log space to dodge factorial overflow.
    """
    if x <= 0:
        raise ValueError(f"series argument must be positive, got {x}")
    if l_max < 3:
        raise ValueError(f"l_max must be >= 3, got {l_max}")
    ls = np.arange(3, l_max + 1, dtype=float)
    log_terms = ls * math.log(x) + 0.5 * k * ls * np.log(ls) - np.array(
        [math.lgamma(l + 1.0) for l in ls]
    )
    return np.cumsum(np.exp(log_terms))
