"""Dense spectral helpers: Perron pairs, dominant eigenvectors, pseudoinverse.

Matrices in this package are small (typically n <= 10), so the default
strategy is a full eigendecomposition followed by selection of the dominant
eigenvalue.  A power-method path exists for nonnegative matrices above a
size threshold where the full decomposition stops being the cheapest option.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph

from .errors import (
    ComplexDominantError,
    NoConvergenceError,
    NotNonnegativeError,
    ReducibleMatrixError,
    ShapeMismatchError,
)

POWER_METHOD_THRESHOLD = 64
POWER_METHOD_BUDGET = 100_000


@dataclass(frozen=True)
class SpectralPair:
    """Eigenvalue with matching right and left eigenvectors.

    Both vectors are scaled to unit 1-norm; when the matrix is nonnegative
    irreducible they are strictly positive.
    """

    value: float
    right: np.ndarray
    left: np.ndarray


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ShapeMismatchError(f"expected a square matrix, got shape {M.shape}")
    return M


def is_irreducible(M) -> bool:
    """True when the directed graph of the nonzero pattern is strongly connected."""
    M = _square(M)
    if M.shape[0] == 1:
        return True
    graph = scipy.sparse.csr_matrix((M != 0).astype(np.int8))
    ncomp, _ = scipy.sparse.csgraph.connected_components(
        graph, directed=True, connection="strong"
    )
    return int(ncomp) == 1


def _realify(vec: np.ndarray) -> np.ndarray:
    """Rotate a numerically real eigenvector onto the real axis, anchor entry positive."""
    anchor = int(np.argmax(np.abs(vec)))
    pivot = vec[anchor]
    if pivot == 0:
        return np.real(vec).copy()
    return np.real(vec * (np.conj(pivot) / np.abs(pivot)))


def _unit_1norm(vec: np.ndarray) -> np.ndarray:
    s = np.abs(vec).sum()
    return vec / s if s > 0 else vec


def _select_maximal(vals: np.ndarray) -> int:
    # max real part; ties: larger modulus, then smaller |imag|, then imag >= 0
    neg_imag = (vals.imag < 0).astype(np.int8)
    order = np.lexsort((neg_imag, np.abs(vals.imag), -np.abs(vals), -vals.real))
    return int(order[0])


def maximal_eigenvector(M, eig_tol: float = 1e-12) -> SpectralPair:
    """Eigenpair for the eigenvalue of maximal real part of a real square matrix.

    Raises ComplexDominantError when that eigenvalue has an imaginary part
    above eig_tol (relative to the matrix inf-norm); callers treat this as a
    diagnostic rather than guessing a real surrogate.
    """
    M = _square(M)
    vals, vl, vr = scipy.linalg.eig(M, left=True, right=True)
    idx = _select_maximal(vals)
    lam = vals[idx]
    scale = max(1.0, float(np.abs(M).sum(axis=1).max()))
    if abs(lam.imag) > eig_tol * scale:
        raise ComplexDominantError(
            f"dominant eigenvalue {lam:.6g} has imaginary part above {eig_tol:g}*|M|"
        )
    right = _unit_1norm(_realify(vr[:, idx]))
    left = _unit_1norm(_realify(vl[:, idx]))
    return SpectralPair(value=float(lam.real), right=right, left=left)


def _power_vector(M: np.ndarray, eig_tol: float, budget: int) -> tuple[float, np.ndarray]:
    n = M.shape[0]
    scale = max(1.0, float(np.abs(M).sum(axis=1).max()))
    u = np.full(n, 1.0 / n)
    z = M @ u
    for _ in range(budget):
        lam = z.sum()  # u has unit 1-norm and M, u are nonnegative
        if lam <= 0:
            raise ReducibleMatrixError("power iteration collapsed to the zero vector")
        u = z / lam
        z = M @ u
        if np.max(np.abs(z - lam * u)) <= eig_tol * scale:
            return float(lam), u
    raise NoConvergenceError(f"power method did not converge in {budget} iterations")


def perron_pair(
    M,
    eig_tol: float = 1e-12,
    power_threshold: int = POWER_METHOD_THRESHOLD,
    power_budget: int = POWER_METHOD_BUDGET,
) -> SpectralPair:
    """Perron value and strictly positive right/left Perron vectors.

    The input must be entrywise nonnegative and irreducible.  Below
    power_threshold the full eigendecomposition is used; at or above it, a
    power iteration on M and its transpose.
    """
    M = _square(M)
    if not np.isfinite(M).all() or (M < 0).any():
        raise NotNonnegativeError("matrix must have finite nonnegative entries")
    if not is_irreducible(M):
        raise ReducibleMatrixError("matrix is reducible")
    if M.shape[0] < power_threshold:
        vals, vl, vr = scipy.linalg.eig(M, left=True, right=True)
        idx = _select_maximal(vals)
        right = _unit_1norm(_realify(vr[:, idx]))
        left = _unit_1norm(_realify(vl[:, idx]))
        return SpectralPair(value=float(vals[idx].real), right=right, left=left)
    lam, right = _power_vector(M, eig_tol, power_budget)
    _, left = _power_vector(M.T, eig_tol, power_budget)
    return SpectralPair(value=lam, right=right, left=left)


def pseudoinverse(M, rank_tol: float = 1e-12) -> np.ndarray:
    """Moore-Penrose pseudoinverse, inverting singular values > rank_tol * s_max."""
    M = _square(M)
    U, s, Vt = np.linalg.svd(M)
    s_inv = np.zeros_like(s)
    if s.size and s[0] > 0:
        mask = s > rank_tol * s[0]
        s_inv[mask] = 1.0 / s[mask]
    return (Vt.T * s_inv) @ U.T
