"""Problem model and bilinear-operator views for x = a + B(x kron x).

A Problem holds the data (a, B) of a Markovian binary tree: an individual of
type i dies with probability a_i or is replaced by an ordered pair of
children (j, k) with the probability stored in column j*n + k of row i of B.
Row stochasticity makes the all-ones vector e an exact solution of the
quadratic vector equation; the minimal nonnegative solution is the
extinction probability of the branching process.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import eigen
from .errors import (
    NegativeEntryError,
    ReducibleMeanMatrixError,
    ShapeMismatchError,
    StochasticityViolationError,
)

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class Problem:
    """Validated data (n, a, B) of the quadratic vector equation.

    Column c = j*n + k of B (0-based j, k) multiplies u_j * v_k in the
    bilinear map B(u kron v); this matches numpy.kron's stacking order.
    Instances are immutable; build them through validate_problem.
    """

    n: int
    a: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.a.setflags(write=False)
        self.B.setflags(write=False)

    @property
    def e(self) -> np.ndarray:
        return np.ones(self.n)


@dataclass(frozen=True)
class CriticalityReport:
    rho: float
    classification: str  # subcritical | critical | supercritical
    tolerance: float


@dataclass(frozen=True)
class ResidualReport:
    vector: np.ndarray
    norm1: float


def validate_problem(a, B, tol: float = 1e-12) -> Problem:
    """Check (a, B) and build a Problem with the row invariant enforced.

    Parameters
    ----------
    a : array_like, shape (n,)
        Death (no-offspring) probabilities.
    B : array_like, shape (n, n*n)
        Branching probabilities, columns ordered as j*n + k.
    tol : float
        Largest allowed inf-norm deviation of a + B(e kron e) from e.

    Returns
    -------
    Problem
        The stored a is recomputed as e - B(e kron e) so that e solves the
        equation to machine precision regardless of how a was rounded.

    Raises
    ------
    ShapeMismatchError, NegativeEntryError, StochasticityViolationError
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    B = np.asarray(B, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ShapeMismatchError("a must be a nonempty vector")
    n = a.size
    if B.shape != (n, n * n):
        raise ShapeMismatchError(f"B must have shape ({n}, {n * n}), got {B.shape}")
    for name, arr in (("a", a), ("B", B)):
        if not np.isfinite(arr).all() or (arr < 0).any():
            raise NegativeEntryError(f"{name} must have finite nonnegative entries")
    mass = B @ np.ones(n * n)  # B(e kron e), same evaluation as apply_bilinear
    defect = float(np.abs(a + mass - 1.0).max())
    if defect > tol:
        raise StochasticityViolationError(
            f"a + B(e kron e) deviates from e by {defect:.3e} (tol {tol:g})"
        )
    return Problem(n=n, a=1.0 - mass, B=B.copy())


def _vector(p: Problem, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (p.n,):
        raise ShapeMismatchError(f"expected a vector of length {p.n}, got shape {v.shape}")
    return v


def _tensor(p: Problem) -> np.ndarray:
    # view with axes (parent, first child, second child)
    return p.B.reshape(p.n, p.n, p.n)


def apply_bilinear(p: Problem, u, v) -> np.ndarray:
    """Evaluate the bilinear form B(u kron v)."""
    u = _vector(p, u)
    v = _vector(p, v)
    return p.B @ np.kron(u, v)


def left_matrix(p: Problem, u) -> np.ndarray:
    """Matrix M with M v = apply_bilinear(p, u, v); M[i, k] = sum_j B[i, j*n+k] u_j."""
    u = _vector(p, u)
    return np.einsum("ijk,j->ik", _tensor(p), u)


def right_matrix(p: Problem, v) -> np.ndarray:
    """Matrix M with M u = apply_bilinear(p, u, v); M[i, j] = sum_k B[i, j*n+k] v_k."""
    v = _vector(p, v)
    return np.einsum("ijk,k->ij", _tensor(p), v)


def mean_matrix(p: Problem) -> np.ndarray:
    """Mean progeny matrix B(e kron I + I kron e): sum of both partial contractions at e.

    Its spectral radius classifies the process as subcritical (< 1),
    critical (= 1) or supercritical (> 1).
    """
    e = p.e
    return left_matrix(p, e) + right_matrix(p, e)


def criticality(p: Problem, tol: float = 1e-12) -> CriticalityReport:
    """Classify the process by the spectral radius of the mean progeny matrix.

    Raises ReducibleMeanMatrixError when the nonzero pattern of the mean
    matrix is not strongly connected; the classification would be unreliable
    for such models and the failure is reported instead of guessed around.
    """
    R = mean_matrix(p)
    if not eigen.is_irreducible(R):
        raise ReducibleMeanMatrixError("mean progeny matrix is reducible")
    rho = eigen.perron_pair(R).value
    if rho > 1.0 + tol:
        label = SUPERCRITICAL
    elif rho < 1.0 - tol:
        label = SUBCRITICAL
    else:
        label = CRITICAL
    return CriticalityReport(rho=rho, classification=label, tolerance=tol)


def residual(p: Problem, x) -> ResidualReport:
    """Residual x - a - B(x kron x) of the extinction equation and its 1-norm."""
    x = _vector(p, x)
    vec = x - p.a - apply_bilinear(p, x, x)
    return ResidualReport(vector=vec, norm1=float(np.abs(vec).sum()))


def survival_matrix(p: Problem, y) -> np.ndarray:
    """Iteration matrix M(y) of the survival-form equation y = M(y) y.

    M(y) = b(., e) + b(e, .) - b(y, .).  At y = 0 this is mean_matrix(p);
    the entries stay nonnegative whenever y <= e, and may go negative
    otherwise (callers fall back to the maximal eigenvector in that case).
    """
    y = _vector(p, y)
    return mean_matrix(p) - left_matrix(p, y)


def problem_to_dict(p: Problem) -> dict:
    return {"n": int(p.n), "a": p.a.tolist(), "B": p.B.tolist()}


def problem_from_dict(data: dict, tol: float = 1e-12) -> Problem:
    a = data["a"]
    B = data["B"]
    p = validate_problem(a, B, tol=tol)
    if "n" in data and int(data["n"]) != p.n:
        raise ShapeMismatchError(f"declared n={data['n']} but a has length {p.n}")
    return p


def save_problem(p: Problem, path) -> None:
    """Write the JSON problem format; floats round-trip exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(p), fh)
        fh.write("\n")


def load_problem(path, tol: float = 1e-12) -> Problem:
    with open(path, "r", encoding="utf-8") as fh:
        return problem_from_dict(json.load(fh), tol=tol)
