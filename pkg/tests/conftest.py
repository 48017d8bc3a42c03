import numpy as np

from qve import Family, FamilySpec, validate_problem


def supercritical_problem(n, seed, rho):
    """Family member with the requested mean-matrix spectral radius."""
    fam = Family(FamilySpec(n=n, seed=seed))
    return fam.problem_at(fam.param_for_rho(rho))


def family_and_problem(n, seed, rho):
    fam = Family(FamilySpec(n=n, seed=seed))
    return fam, fam.problem_at(fam.param_for_rho(rho))


def uneven_problem(n, seed, lo=0.2, hi=0.95):
    """Valid problem with uneven row masses (independent of the Family generator)."""
    rng = np.random.default_rng(seed)
    B = rng.uniform(0.0, 1.0, size=(n, n * n))
    B *= rng.uniform(lo, hi, size=(n, 1)) / B.sum(axis=1, keepdims=True)
    a = np.maximum(1.0 - B.sum(axis=1), 0.0)
    return validate_problem(a, B)
