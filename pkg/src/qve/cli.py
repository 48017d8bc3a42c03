"""Benchmark command line: solve problems, sweep families, analyze rates.

Subcommands
-----------
solve    run one solver on a problem file, a generated family member, or a
         one-type problem; exit 0 on convergence, 2 otherwise, 3 on bad input
sweep    run solvers over spectral-radius targets of a seeded family and
         emit one CSV row per (parameter, solver) cell
analyze  predicted vs empirical Perron-iteration rate as JSON
gen      write a generated problem in the JSON problem format
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys

import numpy as np

from . import analysis, core, problems, solvers
from .errors import QveError, TargetUnreachableError

CSV_COLUMNS = [
    "familyParam", "rhoR", "solver", "status", "iterations",
    "elapsedSeconds", "finalResidual", "predictedRate", "empiricalRate",
]
SOLVER_IDS = ("natural", "depth", "order", "thicknesses", "newton", "perron")

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_INPUT = 3


class CliInputError(Exception):
    """Bad command-line input or unreadable/invalid input file."""


def run_solver(p: core.Problem, solver_id: str, cfg: solvers.SolverConfig) -> solvers.SolverResult:
    if solver_id in solvers.FUNCTIONAL_VARIANTS:
        return solvers.solve_functional(p, solver_id, cfg)
    if solver_id == "newton":
        return solvers.solve_newton(p, cfg)
    if solver_id == "perron":
        return solvers.solve_perron(p, cfg)
    raise CliInputError(f"unknown solver {solver_id!r}; expected one of {SOLVER_IDS}")


def _weight_vector(p: core.Problem, w_choice: str) -> np.ndarray:
    from . import eigen

    if w_choice == "ones":
        return p.e
    pair = eigen.perron_pair(core.mean_matrix(p))
    return pair.left if w_choice == "left-perron" else pair.right


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _empirical_rate(result: solvers.SolverResult) -> float | None:
    if result.iterations < 5:
        return None
    try:
        return analysis.estimate_linear_rate(result.residual_history)
    except QveError:
        return None


def sweep_records(
    spec: problems.FamilySpec,
    rho_targets: list[float],
    solver_ids: list[str],
    cfg: solvers.SolverConfig,
    repeats: int = 1,
) -> list[dict]:
    """One record per (target, solver) cell, sorted by parameter then solver id.

    Unreachable targets yield rows with status "target-unreachable" instead
    of failing the sweep.  Timing is the median over `repeats` runs; every
    other field comes from the first run, which is deterministic.
    """
    family = problems.Family(spec)
    cells = []
    for target in rho_targets:
        try:
            param = family.param_for_rho(target)
        except TargetUnreachableError:
            cells.append((float("inf"), target, None))
            continue
        cells.append((param, target, family.problem_at(param)))
    records = []
    for param, target, p in cells:
        for solver_id in sorted(solver_ids):
            if p is None:
                records.append({
                    "familyParam": "", "rhoR": _fmt(target), "solver": solver_id,
                    "status": "target-unreachable", "iterations": "",
                    "elapsedSeconds": "", "finalResidual": "",
                    "predictedRate": "", "empiricalRate": "",
                    "sortKey": (param, solver_id),
                })
                continue
            runs = [run_solver(p, solver_id, cfg) for _ in range(repeats)]
            result = runs[0]
            predicted = None
            if solver_id == "perron":
                predicted = _predicted_rate(p, cfg)
            records.append({
                "familyParam": _fmt(param),
                "rhoR": _fmt(family.rho_at(param)),
                "solver": solver_id,
                "status": result.status,
                "iterations": _fmt(result.iterations),
                "elapsedSeconds": _fmt(statistics.median(r.elapsed for r in runs)),
                "finalResidual": _fmt(result.residual_history[-1]),
                "predictedRate": _fmt(predicted),
                "empiricalRate": _fmt(_empirical_rate(result)),
                "sortKey": (param, solver_id),
            })
    records.sort(key=lambda r: r.pop("sortKey"))
    return records


def _predicted_rate(p: core.Problem, cfg: solvers.SolverConfig) -> float | None:
    reference = solvers.solve_newton(p, solvers.SolverConfig(epsilon=cfg.epsilon))
    if reference.status != solvers.CONVERGED:
        return None
    try:
        w = _weight_vector(p, cfg.w_choice)
        jac = analysis.perron_jacobian_at_solution(p, reference.y, w)
    except QveError:
        return None
    return analysis.spectral_radius(jac)


def write_csv(records: list[dict], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)


def _load_input_file(path: str, tol: float) -> core.Problem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise CliInputError(f"{path}: expected a JSON object")
    try:
        if "a" in data and "B" in data:
            return core.problem_from_dict(data, tol=tol)
        if {"n", "seed", "param"} <= data.keys():
            spec, param = problems.family_spec_from_dict(data)
            return problems.Family(spec).problem_at(param)
    except (QveError, KeyError, TypeError, ValueError) as exc:
        raise CliInputError(f"{path}: {exc}") from exc
    raise CliInputError(f"{path}: neither a problem (a, B) nor a generator spec (n, seed, param)")


def _resolve_problem(args) -> core.Problem:
    sources = sum(
        1 for flag in (args.input, args.beta, args.n) if flag is not None
    )
    if sources != 1:
        raise CliInputError("provide exactly one of --input, --beta, or --n/--seed")
    if args.input is not None:
        return _load_input_file(args.input, tol=1e-9)
    try:
        if args.beta is not None:
            return problems.gen_scalar(args.beta)
        if args.seed is None:
            raise CliInputError("--seed is required with --n")
        family = problems.Family(problems.FamilySpec(n=args.n, seed=args.seed))
        if args.param is not None:
            return family.problem_at(args.param)
        if args.rho:
            return family.problem_at(family.param_for_rho(args.rho[0]))
        raise CliInputError("provide --rho or --param with --n/--seed")
    except QveError as exc:
        raise CliInputError(str(exc)) from exc


def _add_problem_flags(sub: argparse.ArgumentParser, repeat_rho: bool) -> None:
    sub.add_argument("--input", help="problem or generator-spec JSON file")
    sub.add_argument("--beta", type=float, help="one-type problem with branching probability beta")
    sub.add_argument("--n", type=int, help="family dimension")
    sub.add_argument("--seed", type=int, help="family seed")
    sub.add_argument("--rho", type=float, action="append", default=None,
                     help="target spectral radius of the mean matrix"
                     + (" (repeatable)" if repeat_rho else ""))
    sub.add_argument("--param", type=float, help="family parameter in [0, 1]")


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--tol", type=float, default=1e-13, help="per-component tolerance")
    sub.add_argument("--max-iters", type=int, default=None, help="iteration budget override")
    sub.add_argument("--w-choice", choices=solvers.W_CHOICES, default="left-perron",
                     help="weight vector for the Perron normalization")


def _config(args) -> solvers.SolverConfig:
    return solvers.SolverConfig(
        epsilon=args.tol, max_iterations=args.max_iters, w_choice=args.w_choice
    )


def _open_output(path):
    return open(path, "w", encoding="utf-8", newline="") if path else None


def cmd_solve(args) -> int:
    p = _resolve_problem(args)
    result = run_solver(p, args.solver, _config(args))
    print(f"solver = {args.solver}")
    print(f"status = {result.status}")
    print(f"iterations = {result.iterations}")
    print(f"x = {result.x.tolist()!r}")
    print(f"y = {result.y.tolist()!r}")
    print(f"residual = {result.residual_history[-1]!r}")
    print(f"elapsed = {result.elapsed:.6f}")
    return EXIT_OK if result.status == solvers.CONVERGED else EXIT_NOT_CONVERGED


def cmd_sweep(args) -> int:
    if not args.rho:
        raise CliInputError("sweep needs at least one --rho target")
    if args.n is None or args.seed is None:
        raise CliInputError("sweep needs --n and --seed")
    bad = [s for s in args.solver if s not in SOLVER_IDS]
    if bad:
        raise CliInputError(f"unknown solver(s) {bad}; expected {SOLVER_IDS}")
    spec = problems.FamilySpec(n=args.n, seed=args.seed)
    records = sweep_records(spec, args.rho, args.solver, _config(args), repeats=args.repeats)
    out = _open_output(args.output)
    try:
        write_csv(records, out if out else sys.stdout)
    finally:
        if out:
            out.close()
    return EXIT_OK


def cmd_analyze(args) -> int:
    p = _resolve_problem(args)
    report = criticality_guarded_report(p, args.w_choice, _config(args))
    payload = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    if report["perronStatus"] != solvers.CONVERGED:
        print(f"warning: perron solver status {report['perronStatus']}", file=sys.stderr)
    return EXIT_OK


def criticality_guarded_report(p: core.Problem, w_choice: str, cfg: solvers.SolverConfig) -> dict:
    """RateReport payload for a supercritical problem (raises CliInputError otherwise)."""
    try:
        crit = core.criticality(p)
    except QveError as exc:
        raise CliInputError(str(exc)) from exc
    if crit.classification != core.SUPERCRITICAL:
        raise CliInputError(f"analyze expects a supercritical problem, got {crit.classification}")
    reference = solvers.solve_newton(p, solvers.SolverConfig(epsilon=cfg.epsilon))
    w = _weight_vector(p, w_choice)
    jac = analysis.perron_jacobian_at_solution(p, reference.y, w)
    predicted = analysis.spectral_radius(jac)
    perron = solvers.solve_perron(p, cfg)
    empirical = _empirical_rate(perron)
    limit = None
    if abs(crit.rho - 1.0) <= 0.05:
        # the limit expression is invariant under the affine rescaling that
        # carries the problem to the critical member of its family
        limit = analysis.critical_limit_rate(p, w, critical_tol=0.05)
    return {
        "spectralRadius": predicted,
        "predictedRate": predicted,
        "empiricalRate": empirical,
        "limitRate": limit,
        "perronStatus": perron.status,
        "perronIterations": perron.iterations,
    }


def cmd_gen(args) -> int:
    p = _resolve_problem(args)
    if args.output:
        core.save_problem(p, args.output)
    else:
        print(json.dumps(core.problem_to_dict(p)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qve",
        description="Solvers and benchmarks for the branching-process quadratic vector equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="run one solver on one problem")
    _add_problem_flags(sp, repeat_rho=False)
    _add_solver_flags(sp)
    sp.add_argument("--solver", required=True, choices=SOLVER_IDS)
    sp.set_defaults(func=cmd_solve)

    sw = sub.add_parser("sweep", help="benchmark solvers over family targets, emit CSV")
    _add_problem_flags(sw, repeat_rho=True)
    _add_solver_flags(sw)
    sw.add_argument("--solver", action="append", required=True,
                    help="solver id (repeatable)")
    sw.add_argument("--repeats", type=int, default=1, help="timed repetitions per cell")
    sw.add_argument("--output", help="CSV path (default: standard output)")
    sw.set_defaults(func=cmd_sweep)

    an = sub.add_parser("analyze", help="predicted vs empirical Perron rate as JSON")
    _add_problem_flags(an, repeat_rho=False)
    _add_solver_flags(an)
    an.add_argument("--output", help="JSON path (default: standard output)")
    an.set_defaults(func=cmd_analyze)

    ge = sub.add_parser("gen", help="write a generated problem as JSON")
    _add_problem_flags(ge, repeat_rho=False)
    ge.add_argument("--output", help="problem path (default: standard output)")
    ge.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    raise SystemExit(main())
