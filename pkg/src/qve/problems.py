"""Problem generators and a Monte-Carlo extinction oracle.

Families are one-parameter lines of problems B(t) = t * c * base with a
seeded random base matrix, so the spectral radius of the mean matrix grows
continuously (in fact linearly) from 0 to the family maximum as t goes from
0 to 1.  All randomness flows through numpy's counter-based Philox
generator keyed by the 64-bit seed: identical seeds give bit-identical
output on every platform, and every Monte-Carlo start state draws from its
own counter-indexed substream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .errors import OutOfRangeError, TargetUnreachableError

POPULATION_CAP = 1_000_000
RING_WEIGHT = 0.01
# keeps every member strictly substochastic in B so a > 0 after rounding
_SCALE_MARGIN = 1e-13


@dataclass(frozen=True)
class FamilySpec:
    n: int
    seed: int


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo extinction estimate per starting state.

    stderr is the binomial standard error sqrt(p(1-p)/trials); truncated
    counts the runs still alive at the horizon (they score as surviving,
    biasing the extinction estimate downward).
    """

    extinction: np.ndarray
    stderr: np.ndarray
    trials: int
    truncated: int


def gen_scalar(beta: float) -> core.Problem:
    """One-type problem with branching probability beta and death probability 1 - beta.

    Supercritical exactly when beta > 1/2; the minimal solution is
    (1 - beta)/beta in that case and 1 otherwise.
    """
    if not np.isfinite(beta) or not 0.0 <= beta <= 1.0:
        raise OutOfRangeError(f"beta must lie in [0, 1], got {beta!r}")
    return core.validate_problem([1.0 - beta], [[beta]])


class Family:
    """One-parameter problem family, linear in the parameter.

    The base matrix is drawn entrywise uniform from [0, 1) and a small ring
    term linking consecutive types guarantees an irreducible mean-matrix
    pattern.  The scale is chosen so the parameter range [0, 1] spans
    branching masses from zero up to one on the heaviest row, which carries
    the mean-matrix spectral radius from 0 to the family's maximum (close
    to, but below, the hard bound of 2).  Construction is a pure function
    of the spec.
    """

    def __init__(self, spec: FamilySpec):
        if spec.n < 1:
            raise OutOfRangeError(f"family dimension must be >= 1, got {spec.n}")
        n = spec.n
        rng = np.random.Generator(np.random.Philox(key=spec.seed % 2**64))
        base = rng.random((n, n * n))
        for i in range(n):
            j = (i + 1) % n
            base[i, j * n + j] += RING_WEIGHT
        self.spec = spec
        self.base = base
        self.scale = (1.0 - _SCALE_MARGIN) / float(base.sum(axis=1).max())

    def problem_at(self, param: float) -> core.Problem:
        if not np.isfinite(param) or not 0.0 <= param <= 1.0:
            raise OutOfRangeError(f"family parameter must lie in [0, 1], got {param!r}")
        B = param * self.scale * self.base
        a = np.maximum(1.0 - B.sum(axis=1), 0.0)
        return core.validate_problem(a, B)

    def rho_at(self, param: float) -> float:
        """Spectral radius of the mean progeny matrix at this parameter."""
        R = core.mean_matrix(self.problem_at(param))
        return float(np.abs(np.linalg.eigvals(R)).max())

    @property
    def max_rho(self) -> float:
        return self.rho_at(1.0)

    def param_for_rho(self, target: float, tol: float = 1e-12) -> float:
        """Bisect for the parameter whose mean-matrix spectral radius hits target."""
        if not np.isfinite(target) or target < 0:
            raise OutOfRangeError(f"target spectral radius must be >= 0, got {target!r}")
        top = self.rho_at(1.0)
        if target > top + tol:
            raise TargetUnreachableError(
                f"target {target:g} exceeds the family maximum {top:.15g}"
            )
        if target >= top:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            r = self.rho_at(mid)
            if abs(r - target) <= tol:
                return mid
            if r < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def gen_family(spec: FamilySpec, param: float) -> core.Problem:
    return Family(spec).problem_at(param)


def find_param_for_rho(spec: FamilySpec, target: float, tol: float = 1e-12) -> float:
    return Family(spec).param_for_rho(target, tol)


def family_spec_to_dict(spec: FamilySpec, param: float) -> dict:
    return {"n": int(spec.n), "seed": int(spec.seed), "param": float(param)}


def family_spec_from_dict(data: dict) -> tuple[FamilySpec, float]:
    return FamilySpec(n=int(data["n"]), seed=int(data["seed"])), float(data["param"])


def _state_generator(seed: int, state: int) -> np.random.Generator:
    # disjoint 2**128-draw Philox substream per start state
    return np.random.Generator(np.random.Philox(key=seed % 2**64, counter=state << 128))


def monte_carlo_extinction(
    p: core.Problem, trials: int, horizon: int, seed: int,
    cap: int = POPULATION_CAP,
) -> McEstimate:
    """Simulate the branching process and estimate extinction probabilities.

    For each starting state, runs `trials` independent colonies started from
    one individual.  Per generation every individual of type i dies with
    probability a_i or is replaced by a pair (j, k) with probability
    B[i, j*n+k].  Colonies evolve as aggregate per-type counts; one
    batched multinomial draw per (generation, occupied type) advances every
    running colony at once, which leaves the trials independent and
    identically distributed.  A run is extinct when its population empties
    within `horizon` generations; runs growing past `cap` individuals are
    certified surviving and leave the batch, and runs still alive at the
    horizon also count as surviving (tallied in `truncated`).

    Randomness discipline: one counter-based Philox substream per start
    state (key = seed, counter = state * 2**128), consumed in generation
    order; identical seeds give bit-identical estimates.
    """
    if trials < 1 or horizon < 1:
        raise OutOfRangeError("trials and horizon must be >= 1")
    n = p.n
    outcome = [np.concatenate(([p.a[i]], p.B[i])) for i in range(n)]
    outcome = [np.maximum(row, 0.0) / np.maximum(row, 0.0).sum() for row in outcome]
    extinct = np.zeros(n, dtype=np.int64)
    truncated = 0
    for state in range(n):
        rng = _state_generator(seed, state)
        pops = np.zeros((trials, n), dtype=np.int64)
        pops[:, state] = 1
        n_extinct = 0
        for _ in range(horizon):
            totals = pops.sum(axis=1)
            n_extinct += int((totals == 0).sum())
            pops = pops[(totals > 0) & (totals <= cap)]
            if pops.shape[0] == 0:
                break
            nxt = np.zeros_like(pops)
            for i in range(n):
                if not pops[:, i].any():
                    continue
                counts = rng.multinomial(pops[:, i], outcome[i])
                pairs = counts[:, 1:].reshape(-1, n, n)
                nxt += pairs.sum(axis=2) + pairs.sum(axis=1)
            pops = nxt
        if pops.shape[0]:
            totals = pops.sum(axis=1)
            n_extinct += int((totals == 0).sum())
            truncated += int(((totals > 0) & (totals <= cap)).sum())
        extinct[state] = n_extinct
    phat = extinct / float(trials)
    stderr = np.sqrt(phat * (1.0 - phat) / trials)
    return McEstimate(extinction=phat, stderr=stderr, trials=trials, truncated=truncated)
