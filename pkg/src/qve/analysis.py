"""Convergence-rate tooling for the Perron iteration.

The Perron solver is a fixed-point iteration for the map F sending a
survival iterate y to the normalized dominant eigenvector of the survival
matrix at y.  This module provides the analytic Jacobian of F (built from
eigenvector perturbation theory with a pseudoinverse in place of the group
inverse), its specialization at the solution, a finite-difference oracle,
an empirical rate fit, and the closed-form limit of the convergence rate as
a one-parameter family approaches criticality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core, eigen
from .errors import (
    DegenerateProjectorError,
    InsufficientHistoryError,
    NotASolutionError,
    NotCriticalError,
    ReducibleMeanMatrixError,
)
from .solvers import normalization_factor


@dataclass(frozen=True)
class RateReport:
    spectral_radius: float
    predicted_rate: float
    empirical_rate: float | None
    limit_rate: float | None


def perron_map(p: core.Problem, y, w, eig_tol: float = 1e-12) -> np.ndarray:
    """One normalized dominant-eigenvector update of the survival iterate."""
    pair = eigen.maximal_eigenvector(core.survival_matrix(p, y), eig_tol)
    return normalization_factor(p, pair.right, w) * pair.right


def _projector_guard(inner: float, left_vec: np.ndarray, right_vec: np.ndarray, label: str) -> None:
    scale = float(np.linalg.norm(left_vec) * np.linalg.norm(right_vec))
    if abs(inner) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateProjectorError(f"{label} = {inner:.3e} is numerically zero")


def perron_jacobian(p: core.Problem, y, w, eig_tol: float = 1e-12, rank_tol: float = 1e-12) -> np.ndarray:
    """Analytic Jacobian of the Perron update map at a survival iterate y.

    With u the normalized dominant eigenvector of M(y), lam its eigenvalue,
    v the matching left eigenvector and
    sigma' = w'(I - b(e-u, .) - b(., e-u)), the Jacobian is

        (I - u sigma'/(sigma' u)) pinv(M(y) - lam I) (I - u v'/(v' u)) b(., u)

    In one dimension the leading projector collapses and the Jacobian is 0.
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    H = core.survival_matrix(p, y)
    pair = eigen.maximal_eigenvector(H, eig_tol)
    u = normalization_factor(p, pair.right, w) * pair.right
    v = pair.left
    lam = pair.value
    eye = np.eye(p.n)
    eu = p.e - u
    sigma = w @ (eye - core.left_matrix(p, eu) - core.right_matrix(p, eu))
    su = float(sigma @ u)
    vu = float(v @ u)
    _projector_guard(su, sigma, u, "sigma'u")
    _projector_guard(vu, v, u, "v'u")
    proj_out = eye - np.outer(u, sigma) / su
    proj_in = eye - np.outer(u, v) / vu
    core_inv = eigen.pseudoinverse(H - lam * eye, rank_tol)
    return proj_out @ core_inv @ proj_in @ core.right_matrix(p, u)


def perron_jacobian_at_solution(
    p: core.Problem, y_star, w, rank_tol: float = 1e-12,
    eig_tol: float = 1e-12, solution_tol: float = 1e-10,
) -> np.ndarray:
    """Jacobian of the Perron update evaluated at a solved survival vector.

    Uses the simplifications available at the solution: the eigenvalue is 1,
    sigma' y* equals w'b(y*, y*), and the shifted matrix becomes
    b(e-y*, .) + b(., e) - I.  Agrees with perron_jacobian at y* up to
    roundoff; its spectral radius is the asymptotic linear rate of the
    Perron solver.
    """
    y = np.asarray(y_star, dtype=float)
    w = np.asarray(w, dtype=float)
    H = core.survival_matrix(p, y)
    defect = float(np.abs(H @ y - y).sum())
    if defect > solution_tol:
        raise NotASolutionError(
            f"survival-equation residual {defect:.3e} exceeds {solution_tol:g}"
        )
    pair = eigen.maximal_eigenvector(H, eig_tol)
    v = pair.left
    eye = np.eye(p.n)
    wb = float(w @ core.apply_bilinear(p, y, y))
    if wb <= 0 or not np.isfinite(wb):
        raise DegenerateProjectorError(f"w'b(y*,y*) = {wb:.3e} is not positive")
    ey = p.e - y
    sigma = w @ (eye - core.left_matrix(p, ey) - core.right_matrix(p, ey))
    vy = float(v @ y)
    _projector_guard(vy, v, y, "v'y*")
    proj_out = eye - np.outer(y, sigma) / wb
    proj_in = eye - np.outer(y, v) / vy
    shifted = H - eye
    return proj_out @ eigen.pseudoinverse(shifted, rank_tol) @ proj_in @ core.right_matrix(p, y)


def critical_limit_rate(p: core.Problem, w, critical_tol: float = 1e-8) -> float:
    """Limiting Perron-iteration rate as a family reaches criticality.

    For the critical member (spectral radius of the mean matrix equal to 1)
    with right/left Perron vectors yh, vh of the mean matrix, the rate of
    the Perron iteration tends to

        | 1 - (vh'b(yh, yh) / w'b(yh, yh)) * (w'yh / vh'yh) |

    which vanishes when w is a scalar multiple of vh; that is why the left
    Perron vector is the default weight choice.
    """
    w = np.asarray(w, dtype=float)
    R = core.mean_matrix(p)
    if not eigen.is_irreducible(R):
        raise ReducibleMeanMatrixError("mean progeny matrix is reducible")
    pair = eigen.perron_pair(R)
    if abs(pair.value - 1.0) > critical_tol:
        raise NotCriticalError(
            f"spectral radius {pair.value:.12g} differs from 1 by more than {critical_tol:g}"
        )
    yh, vh = pair.right, pair.left
    byy = core.apply_bilinear(p, yh, yh)
    return float(abs(1.0 - (vh @ byy) / (w @ byy) * (w @ yh) / (vh @ yh)))


def estimate_linear_rate(history) -> float:
    """Per-iteration contraction factor fitted from a residual history.

    Fits a least-squares line to the log of the strictly positive tail of
    the history over the final quartile of iterations (at least 4 points)
    and returns exp(slope).
    """
    vals = np.asarray(list(history), dtype=float)
    end = vals.size
    startpos = end
    while startpos > 0 and vals[startpos - 1] > 0 and np.isfinite(vals[startpos - 1]):
        startpos -= 1
    tail = vals[startpos:end]
    m = tail.size
    if m < 4:
        raise InsufficientHistoryError(
            f"need at least 4 strictly positive trailing entries, got {m}"
        )
    window = max(4, -(-m // 4))
    seg = np.log(tail[-window:])
    slope = np.polyfit(np.arange(window), seg, 1)[0]
    return float(np.exp(slope))


def finite_difference_jacobian(p: core.Problem, y, w, h: float = 1e-6, eig_tol: float = 1e-12) -> np.ndarray:
    """Central-difference Jacobian of the Perron update map; oracle for perron_jacobian."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    jac = np.empty((p.n, p.n))
    for i in range(p.n):
        bump = np.zeros(p.n)
        bump[i] = h
        fp = perron_map(p, y + bump, w, eig_tol)
        fm = perron_map(p, y - bump, w, eig_tol)
        jac[:, i] = (fp - fm) / (2.0 * h)
    return jac


def spectral_radius(M) -> float:
    """Spectral radius of a square matrix (largest eigenvalue modulus)."""
    return float(np.abs(np.linalg.eigvals(np.asarray(M, dtype=float))).max())
