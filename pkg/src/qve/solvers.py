"""Root-finders for the extinction equation x = a + b(x, x).

All classical solvers start from the zero vector and increase monotonically
to the minimal nonnegative solution.  The Perron solver iterates on the
survival vector y = e - x instead, replacing y with the suitably normalized
dominant eigenvector of the survival iteration matrix at each step; it is
the method of choice close to criticality, where the classical iterations
slow down.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import core, eigen
from .errors import (
    ComplexDominantError,
    DegenerateNormalizationError,
    SingularJacobianError,
    SingularLinearSolveError,
)

CONVERGED = "converged"
MAX_ITERATIONS = "max-iterations"
DIVERGED = "diverged"
COMPLEX_DOMINANT = "complex-dominant"

FUNCTIONAL_VARIANTS = ("natural", "depth", "order", "thicknesses")

DEFAULT_MAX_ITER_FUNCTIONAL = 1_000_000
DEFAULT_MAX_ITER_NEWTON = 200
DEFAULT_MAX_ITER_PERRON = 200

W_CHOICES = ("left-perron", "right-perron", "ones")


@dataclass
class SolverConfig:
    """Shared solver knobs.

    epsilon is the per-component tolerance; every solver stops once its
    stopping functional drops below n * epsilon (the Perron loop guard uses
    epsilon itself).  max_iterations of None picks the solver default
    (10**6 for the functional variants, 200 for Newton and Perron).
    """

    epsilon: float = 1e-13
    max_iterations: int | None = None
    w_choice: str = "left-perron"
    eig_tol: float = 1e-12
    track_iterates: bool = False


@dataclass
class SolverResult:
    """Outcome of one solve.

    x is the extinction-probability iterate, y = e - x the survival iterate.
    residual_history holds the 1-norm of the extinction-equation residual at
    every iterate (length iterations + 1).  x_history is populated only when
    SolverConfig.track_iterates is set.
    """

    x: np.ndarray
    y: np.ndarray
    status: str
    iterations: int
    residual_history: list[float]
    elapsed: float
    x_history: list[np.ndarray] | None = None


def _limit(cfg: SolverConfig, default: int) -> int:
    return cfg.max_iterations if cfg.max_iterations is not None else default


def solve_functional(p: core.Problem, variant: str = "natural", cfg: SolverConfig | None = None) -> SolverResult:
    """Linearly convergent fixed-point iterations started from zero.

    natural        x <- a + b(x, x)
    depth          x' solves x' = a + b(x, x'), i.e. (I - b(x, .)) x' = a
    order          x' solves x' = a + b(x', x), i.e. (I - b(., x)) x' = a
    thicknesses    alternate depth (even steps) and order (odd steps)

    Raises SingularLinearSolveError when an inner system of depth/order is
    singular.
    """
    if variant not in FUNCTIONAL_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    cfg = cfg or SolverConfig()
    limit = _limit(cfg, DEFAULT_MAX_ITER_FUNCTIONAL)
    tol = p.n * cfg.epsilon
    eye = np.eye(p.n)
    start = time.perf_counter()
    x = np.zeros(p.n)
    res = core.residual(p, x)
    history = [res.norm1]
    trace = [x.copy()] if cfg.track_iterates else None
    k = 0
    status = MAX_ITERATIONS
    while True:
        if res.norm1 <= tol:
            status = CONVERGED
            break
        if k >= limit:
            status = MAX_ITERATIONS
            break
        if variant == "natural":
            x = p.a + core.apply_bilinear(p, x, x)
        else:
            if variant == "depth" or (variant == "thicknesses" and k % 2 == 0):
                mat = core.left_matrix(p, x)
            else:
                mat = core.right_matrix(p, x)
            try:
                x = np.linalg.solve(eye - mat, p.a)
            except np.linalg.LinAlgError as exc:
                raise SingularLinearSolveError(str(exc)) from exc
        k += 1
        if not np.isfinite(x).all():
            history.append(float("nan"))
            status = DIVERGED
            break
        res = core.residual(p, x)
        history.append(res.norm1)
        if trace is not None:
            trace.append(x.copy())
    return SolverResult(
        x=x, y=p.e - x, status=status, iterations=k,
        residual_history=history, elapsed=time.perf_counter() - start,
        x_history=trace,
    )


def solve_newton(p: core.Problem, cfg: SolverConfig | None = None) -> SolverResult:
    """Newton's method on F(x) = x - a - b(x, x) from the zero start.

    Each step solves (I - b(x, .) - b(., x)) d = -F(x).  From below the
    minimal solution the iterates increase monotonically; convergence is
    quadratic for supercritical problems and linear (rate 1/2) at
    criticality.
    """
    cfg = cfg or SolverConfig()
    limit = _limit(cfg, DEFAULT_MAX_ITER_NEWTON)
    tol = p.n * cfg.epsilon
    eye = np.eye(p.n)
    start = time.perf_counter()
    x = np.zeros(p.n)
    res = core.residual(p, x)
    history = [res.norm1]
    trace = [x.copy()] if cfg.track_iterates else None
    k = 0
    status = MAX_ITERATIONS
    while True:
        if res.norm1 <= tol:
            status = CONVERGED
            break
        if k >= limit:
            status = MAX_ITERATIONS
            break
        jac = eye - core.left_matrix(p, x) - core.right_matrix(p, x)
        try:
            step = np.linalg.solve(jac, -res.vector)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(str(exc)) from exc
        x = x + step
        k += 1
        if not np.isfinite(x).all():
            history.append(float("nan"))
            status = DIVERGED
            break
        res = core.residual(p, x)
        history.append(res.norm1)
        if trace is not None:
            trace.append(x.copy())
    return SolverResult(
        x=x, y=p.e - x, status=status, iterations=k,
        residual_history=history, elapsed=time.perf_counter() - start,
        x_history=trace,
    )


def normalization_factor(p: core.Problem, u, w) -> float:
    """Scale factor making y = factor * u residual-orthogonal to w.

    Solves w'(y - b(y, e) - b(e, y) + b(y, y)) = 0 for y proportional to u;
    the zero solution (which would recover the trivial fixed point y = 0) is
    excluded by construction.  Raises DegenerateNormalizationError when the
    quadratic coefficient w'b(u, u) is below the guard
    1e-14 * |w|_1 * |u|_1^2.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    denom = float(w @ core.apply_bilinear(p, u, u))
    guard = 1e-14 * float(np.abs(w).sum()) * float(np.abs(u).sum()) ** 2
    if denom == 0.0 or abs(denom) < guard:
        raise DegenerateNormalizationError(
            f"|w'b(u,u)| = {abs(denom):.3e} below guard {guard:.3e}"
        )
    e = p.e
    num = float(w @ (u - core.apply_bilinear(p, u, e) - core.apply_bilinear(p, e, u)))
    return -num / denom


def _weight_vector(p: core.Problem, cfg: SolverConfig) -> np.ndarray:
    if cfg.w_choice == "ones":
        return p.e
    pair = eigen.perron_pair(core.mean_matrix(p), cfg.eig_tol)
    if cfg.w_choice == "left-perron":
        return pair.left
    if cfg.w_choice == "right-perron":
        return pair.right
    raise ValueError(f"unknown w_choice {cfg.w_choice!r}; expected one of {W_CHOICES}")


def solve_perron(p: core.Problem, cfg: SolverConfig | None = None) -> SolverResult:
    """Perron iteration on the survival vector y = e - x.

    From y = 0, each step takes the maximal eigenvector of the survival
    iteration matrix at the current iterate and rescales it so the residual
    of the survival equation is orthogonal to a fixed weight vector w (by
    default the left Perron vector of the mean progeny matrix).  The loop
    stops once |M(y) y - y|_1 < epsilon; one step is always performed since
    the start y = 0 satisfies the guard trivially.

    Intended for supercritical problems.  On subcritical ones the iteration
    deliberately skips the known solution x = e and lands on a different
    root with x > e when one exists.
    """
    cfg = cfg or SolverConfig()
    limit = _limit(cfg, DEFAULT_MAX_ITER_PERRON)
    start = time.perf_counter()
    w = _weight_vector(p, cfg)
    e = p.e
    y = np.zeros(p.n)
    history = [core.residual(p, e - y).norm1]
    trace = [(e - y).copy()] if cfg.track_iterates else None
    H = core.survival_matrix(p, y)
    k = 0
    status = MAX_ITERATIONS
    while True:
        if k >= limit:
            status = MAX_ITERATIONS
            break
        try:
            pair = eigen.maximal_eigenvector(H, cfg.eig_tol)
        except ComplexDominantError:
            status = COMPLEX_DOMINANT
            break
        y = normalization_factor(p, pair.right, w) * pair.right
        k += 1
        history.append(core.residual(p, e - y).norm1)
        if trace is not None:
            trace.append(e - y)
        if not np.isfinite(y).all():
            status = DIVERGED
            break
        H = core.survival_matrix(p, y)
        guard = float(np.abs(H @ y - y).sum())
        if guard < cfg.epsilon:
            status = CONVERGED
            break
    return SolverResult(
        x=e - y, y=y, status=status, iterations=k,
        residual_history=history, elapsed=time.perf_counter() - start,
        x_history=trace,
    )
