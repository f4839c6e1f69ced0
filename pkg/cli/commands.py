"""
Command dispatch: one handler per command, each filling a Report
"""
import time

import numpy as np

from config.harness_config import DEFAULT_DIM, DEFAULT_EXPONENT, DEFAULT_TRIALS
from spaces.measure_space import DualFunctional, MeasureSpace, pairing, random_function, to_function
from spaces.norms import SpaceModel, dual_norm, luxemburg_solve, norm, orlicz_solve
from spaces.young import conjugate, young_from_json
from services.convexity import (
    hilbert_modulus,
    m_continuity_probe,
    maximizing_sequence_experiment,
    modulus_estimate,
)
from services.duality import (
    duality_map,
    mazur_inverse,
    mazur_map,
    reflexivity_witness,
    riesz_represent,
    second_dual_action,
)
from services.extension import extend_with_diagnostics, restrict, uniqueness_probe
from services.verification import SuiteParams, run_suites
from cli.problem import ProblemFile
from cli.report import Report
from utils.errors import DomainError, ProblemFileError
from utils.logger import setup_logger
from utils.validators import conjugate_exponent, validate_exponent

logger = setup_logger("commands")

DEFAULT_SIZES = (0.0, 1e-8, 1e-6, 1e-4, 1e-2)


def _require(problem: ProblemFile, command: str, *names: str):
    flags = {"model": "--model", "function": "--input", "functional": "--functional",
             "subspace": "--subspace", "action": "--action"}
    for name in names:
        if getattr(problem, name) is None:
            raise ProblemFileError(f"{command} needs {flags[name]}")


def _param(problem: ProblemFile, key: str, default=None, cast=float):
    value = problem.params.get(key, default)
    if value is None:
        raise ProblemFileError(f"missing parameter --{key}")
    try:
        return cast(value)
    except (TypeError, ValueError) as e:
        raise ProblemFileError(f"parameter --{key} has invalid value {value!r}") from e


def _sizes(problem: ProblemFile) -> list[float]:
    value = problem.params.get("sizes", DEFAULT_SIZES)
    if isinstance(value, str):
        value = value.split(",")
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError) as e:
        raise ProblemFileError(f"parameter --sizes has invalid value {value!r}") from e


def cmd_norm(problem: ProblemFile, report: Report):
    _require(problem, "norm", "model")
    if problem.function is None and problem.functional is None:
        raise ProblemFileError("norm needs --input or --functional")
    model = problem.model
    if problem.function is not None:
        report.results["norm"] = norm(model, problem.function)
        if model.kind == "orlicz":
            report.diagnostics["luxemburg"] = luxemburg_solve(model, problem.function).to_json()
    if problem.functional is not None:
        report.results["dual_norm"] = dual_norm(model, problem.functional)
        if model.kind == "orlicz":
            report.diagnostics["orlicz"] = orlicz_solve(model, problem.functional).to_json()


def cmd_conjugate(problem: ProblemFile, report: Report):
    family = problem.params.get("family", "power")
    spec = {"family": family}
    for key in ("p", "r"):
        if key in problem.params:
            spec[key] = _param(problem, key)
    P = young_from_json(spec)
    v = _param(problem, "v")
    value = conjugate(P, v)
    report.results.update({"young": P.label, "v": v, "conjugate": value})
    if P.family == "power" and P.normalized:
        q = conjugate_exponent(P.exponent)
        report.check("power_closed_form", abs(value - abs(v) ** q / q), 1e-8)


def cmd_dualize(problem: ProblemFile, report: Report):
    _require(problem, "dualize", "model", "functional")
    model = problem.model
    result = duality_map(model, problem.functional)
    report.results.update(result.to_json())
    report.residuals["duality"] = result.residual
    report.check("round_trip", result.residual, 1e-7)
    report.check("unit_point", abs(norm(model, result.point) - 1.0), 1e-9)
    report.check("norming", abs(pairing(model.space, result.functional, result.point) - 1.0), 1e-9)


def cmd_represent(problem: ProblemFile, report: Report):
    _require(problem, "represent", "model", "functional")
    model, y = problem.model, problem.functional
    rng = np.random.default_rng(problem.seed)
    density = riesz_represent(model, y, seed=problem.seed)
    report.results["density"] = density
    worst = 0.0
    for _ in range(_param(problem, "trials", DEFAULT_TRIALS, int)):
        f = random_function(model.space, rng)
        worst = max(worst, abs(pairing(model.space, density, f) - pairing(model.space, y, f)) / norm(model, f))
    report.residuals["representation"] = worst
    report.check("representation", worst, 1e-8)
    if model.kind != "orlicz":
        witness = reflexivity_witness(model, y)
        report.results["reflexivity_witness"] = witness
        defect = 0.0
        for _ in range(_param(problem, "trials", DEFAULT_TRIALS, int)):
            probe = DualFunctional(rng.standard_normal(model.space.dimension), model.space)
            scale = max(1.0, dual_norm(model, probe) * norm(model, to_function(y)))
            defect = max(defect, abs(second_dual_action(y, probe) - pairing(model.space, probe, witness)) / scale)
        report.residuals["reflexivity"] = defect
        report.check("reflexivity", defect, 1e-7)


def cmd_extend(problem: ProblemFile, report: Report):
    _require(problem, "extend", "model", "subspace", "action")
    model, sub, y1 = problem.model, problem.subspace, problem.action
    result = extend_with_diagnostics(model, sub, y1, seed=problem.seed)
    y = result.functional
    report.results.update({"functional": y, "point": result.point, "subspace_norm": result.subspace_norm,
                           "dual_norm": dual_norm(model, y)})
    report.diagnostics.update({"iterations": result.iterations, "restarts": result.restarts,
                               "stationarity": result.stationarity})
    report.check("norm_preservation", abs(report.results["dual_norm"] - result.subspace_norm), 1e-7)
    report.check("restriction", float(np.max(np.abs(restrict(model, sub, y).action - y1.action))), 1e-7)
    trials = problem.params.get("probe")
    if trials:
        probe = uniqueness_probe(model, sub, y1, y, int(trials), problem.seed)
        report.results["probe"] = probe
        report.check("uniqueness_distance", probe.worst_distance, 1e-6)
        report.check("uniqueness_violations", probe.violations, 0)


def cmd_modulus(problem: ProblemFile, report: Report):
    _require(problem, "modulus", "model")
    model = problem.model
    eps = _param(problem, "eps")
    estimate = modulus_estimate(model, eps, _param(problem, "samples", 10000, int), problem.seed)
    report.results.update(estimate.to_json())
    x, y = estimate.witness_x, estimate.witness_y
    report.check("witness_unit", max(abs(norm(model, x) - 1.0), abs(norm(model, y) - 1.0)), 1e-9)
    report.check("witness_separation", norm(model, x - y) - eps, -1e-9, ">=")
    if model.kind == "hilbert":
        report.check("hilbert_closed_form", abs(estimate.delta_estimate - hilbert_modulus(eps)), 1e-4)


def cmd_mazur(problem: ProblemFile, report: Report):
    p = _param(problem, "p", DEFAULT_EXPONENT)
    if not validate_exponent(p):
        raise DomainError(f"mazur needs 1 < p < ∞, got {p}")
    q = conjugate_exponent(p)
    if problem.function is not None:
        h = problem.function
    else:
        space = problem.model.space if problem.model is not None else MeasureSpace(
            np.ones(_param(problem, "n", DEFAULT_DIM, int)))
        h = random_function(space, np.random.default_rng(problem.seed))
    image = mazur_map(p, h)
    back = mazur_inverse(p, image)
    lp = SpaceModel.lebesgue(h.space, p)
    lq = SpaceModel.lebesgue(h.space, q)
    expected = norm(lp, h) ** (p / q)
    report.results.update({"input": h, "image": image, "p": p, "q": q})
    report.check("round_trip", float(np.max(np.abs(back.values - h.values))) / (1.0 + float(np.max(np.abs(h.values)))),
                 1e-10)
    report.check("norm_identity", abs(norm(lq, image) - expected) / max(1.0, expected), 1e-9)


def cmd_verify(problem: ProblemFile, report: Report):
    module = problem.params.get("module") or "all"
    params = SuiteParams(
        n=_param(problem, "n", DEFAULT_DIM, int),
        p=_param(problem, "p", DEFAULT_EXPONENT),
        trials=_param(problem, "trials", DEFAULT_TRIALS, int),
        seed=problem.seed,
    )
    suites = run_suites(module, params)
    report.results["suites"] = [{"module": s.module, "passed": s.passed} for s in suites]
    for suite in suites:
        for contract in suite.contracts:
            report.contracts.append({**contract.to_json(), "name": f"{suite.module}.{contract.name}"})
        report.rows.extend(suite.rows)


def cmd_probe_m(problem: ProblemFile, report: Report):
    _require(problem, "probe-m", "model", "functional")
    model, y = problem.model, problem.functional
    table = m_continuity_probe(model, y, _sizes(problem), problem.seed)
    report.rows = [row.to_json() for row in table.rows]
    report.results["continuity"] = table
    sequence = maximizing_sequence_experiment(model, y, _param(problem, "steps", 50, int), problem.seed)
    report.results["maximizing_sequence"] = sequence
    report.check("tail_monotone", 0.0 if sequence.monotone else 1.0, 0.0)
    report.check("midpoint_violations", sequence.midpoint_violations, 0)
    zero_rows = [row.displacement for row in table.rows if row.size == 0.0]
    if zero_rows:
        report.check("displacement_at_zero", max(zero_rows), 0.0)


COMMANDS = {
    "norm": cmd_norm,
    "conjugate": cmd_conjugate,
    "dualize": cmd_dualize,
    "represent": cmd_represent,
    "extend": cmd_extend,
    "modulus": cmd_modulus,
    "mazur": cmd_mazur,
    "verify": cmd_verify,
    "probe-m": cmd_probe_m,
}


def run_command(name: str, problem: ProblemFile) -> Report:
    """
    Run one command against a resolved problem

    Args:
        name: One of COMMANDS
        problem: Inputs, parameters and seed

    Returns:
        Report with results and every contract the command checked
    """
    if name not in COMMANDS:
        raise DomainError(f"unknown command {name!r}; choose from {', '.join(COMMANDS)}")
    report = Report(command=name, arguments=problem.to_json(), seed=problem.seed)
    logger.info(f"running {name} (seed={problem.seed})")
    start = time.perf_counter()
    COMMANDS[name](problem, report)
    report.wall_time = time.perf_counter() - start
    if not report.passed:
        failed = [c["name"] for c in report.contracts if not c["passed"]]
        logger.warning(f"{name}: {len(failed)} contract(s) failed: {', '.join(failed[:5])}")
    return report
